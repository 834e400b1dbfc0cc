// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <shadenorm/core.hpp>
#include <shadenorm/coverage.hpp>
#include <shadenorm/metrics.hpp>
#include <shadenorm/render.hpp>
#include <shadenorm/robustness.hpp>
#include <shadenorm/solver.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace shadenorm::io {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline constexpr int kSchemaVersion = 1;

// PNG

// Raw samples in row-major, channel-interleaved order.
struct PngImage {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1 (gray) or 3 (RGB)
    int bit_depth = 0; // 8 or 16
    std::vector<std::uint16_t> samples;
};

void write_png(const fs::path& path, const PngImage& img);
PngImage read_png(const fs::path& path);

// 8-bit grayscale: 255 = valid, 0 = invalid. Reading treats values >= 128 as valid.
void write_mask(const fs::path& path, const Mask& mask);
Mask read_mask(const fs::path& path);

// 16-bit RGB with channel = round((n + 1) / 2 * 65535); masked-out pixels
// are written as (32768, 32768, 32768).
std::uint16_t encode_normal_component(double c);
double decode_normal_component(std::uint16_t q);
void write_normal_map(const fs::path& png, const fs::path& mask_png, const NormalMap& normals);
// Decodes and renormalizes masked-in pixels.
NormalMap read_normal_map(const fs::path& png, const fs::path& mask_png);

// PFM (single channel "Pf", little-endian, scale -1.0, rows bottom-to-top)

struct FloatImage {
    int width = 0;
    int height = 0;
    std::vector<float> values; // row-major, top row first
};

void write_pfm(const fs::path& path, const FloatImage& img);
FloatImage read_pfm(const fs::path& path);

// Shading sequence directories

enum class FrameFormat { kPng16, kPfm };

struct SequenceManifest {
    int version = kSchemaVersion;
    std::vector<Vec3> lights;
    std::vector<std::string> frames;
    Encoding encoding = Encoding::kUnsigned01;
    std::string mask = "mask.png";
    int width = 0;
    int height = 0;
};

Json to_json(const SequenceManifest& m);
SequenceManifest manifest_from_json(const Json& j);

// Writes manifest.json, mask.png and one frame file per light. Unsigned
// sequences are signed-encoded first when encoding is kSigned11.
void write_sequence(const fs::path& dir, const ShadingSequence& seq, FrameFormat format = FrameFormat::kPng16,
                    Encoding encoding = Encoding::kUnsigned01);
// Always returns an unsigned01 sequence.
ShadingSequence read_sequence(const fs::path& dir);

// JSON documents

Json to_json(const LightPath& lights);
LightPath lightpath_from_json(const Json& j);
void write_lightpath(const fs::path& path, const LightPath& lights);
LightPath read_lightpath(const fs::path& path);

Json to_json(const MetricsReport& r);
MetricsReport metrics_from_json(const Json& j);
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& r);

Json to_json(const CoverageReport& r);
CoverageReport coverage_from_json(const Json& j);

Json to_json(const PerturbationReport& r);
PerturbationReport perturbation_from_json(const Json& j);
// Rows = target, columns = sigma, cells = mean delta MAE in degrees.
std::string perturbation_csv(const PerturbationReport& r);

Json solve_summary_json(const SolveResult& result, bool naive, double threshold);

// Pretty-printed with a trailing newline; no timestamps.
std::string dump(const Json& j);
void write_json(const fs::path& path, const Json& j);
Json read_json(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

// Rejects keys outside `allowed` with a FormatError naming the schema version.
void require_keys(const Json& j, std::initializer_list<const char*> allowed, std::initializer_list<const char*> required,
                  const char* what);

} // namespace shadenorm::io
