// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#include <shadenorm/io.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace shadenorm::io {

namespace {

constexpr const char* kManifestName = "manifest.json";

std::uint16_t quantize16(double unit)
{
    return static_cast<std::uint16_t>(std::clamp(std::round(unit * 65535.0), 0.0, 65535.0));
}

std::string frame_name(std::size_t i, FrameFormat format)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%03zu.%s", i, format == FrameFormat::kPng16 ? "png" : "pfm");
    return buf;
}

Encoding encoding_from(const std::string& tag)
{
    if (tag == "unsigned01") {
        return Encoding::kUnsigned01;
    }
    if (tag == "signed11") {
        return Encoding::kSigned11;
    }
    throw FormatError("sequence manifest: unknown encoding tag '" + tag + "'");
}

} // namespace

Json to_json(const SequenceManifest& m)
{
    Json j;
    j["version"] = m.version;
    j["dims"] = Json::array({m.width, m.height});
    j["encoding"] = encoding_name(m.encoding);
    j["mask"] = m.mask;
    j["frames"] = m.frames;
    Json lights = Json::array();
    for (const auto& l : m.lights) {
        lights.push_back(Json::array({l.x(), l.y(), l.z()}));
    }
    j["lights"] = std::move(lights);
    return j;
}

SequenceManifest manifest_from_json(const Json& j)
{
    require_keys(j, {"version", "dims", "encoding", "mask", "frames", "lights"},
                 {"version", "dims", "encoding", "mask", "frames", "lights"}, "sequence manifest");
    SequenceManifest m;
    try {
        m.version = j.at("version").get<int>();
        const auto dims = j.at("dims").get<std::vector<int>>();
        if (dims.size() != 2) {
            throw FormatError("sequence manifest: 'dims' must be [width, height]");
        }
        m.width = dims[0];
        m.height = dims[1];
        m.encoding = encoding_from(j.at("encoding").get<std::string>());
        m.mask = j.at("mask").get<std::string>();
        m.frames = j.at("frames").get<std::vector<std::string>>();
        for (const auto& l : j.at("lights")) {
            const auto v = l.get<std::vector<double>>();
            if (v.size() != 3) {
                throw FormatError("sequence manifest: each light must be [x, y, z]");
            }
            m.lights.emplace_back(v[0], v[1], v[2]);
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("sequence manifest: ") + e.what());
    }
    if (m.version != kSchemaVersion) {
        throw FormatError("sequence manifest: unsupported schema version " + std::to_string(m.version));
    }
    if (m.frames.size() != m.lights.size()) {
        throw FormatError("sequence manifest lists " + std::to_string(m.frames.size()) + " frames but " +
                          std::to_string(m.lights.size()) + " lights");
    }
    if (m.width <= 0 || m.height <= 0) {
        throw FormatError("sequence manifest: dims must be positive");
    }
    return m;
}

void write_sequence(const fs::path& dir, const ShadingSequence& seq, FrameFormat format, Encoding encoding)
{
    seq.validate();
    ShadingSequence stored = seq;
    if (seq.encoding != encoding) {
        stored = encoding == Encoding::kSigned11 ? encode_signed(seq) : decode_signed(seq);
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw FormatError("cannot create " + dir.string() + ": " + ec.message());
    }

    SequenceManifest m;
    m.encoding = encoding;
    m.width = stored.width();
    m.height = stored.height();
    for (std::size_t i = 0; i < stored.size(); ++i) {
        const auto& frame = stored.frames[i];
        const auto name = frame_name(i, format);
        m.frames.push_back(name);
        m.lights.push_back(stored.lights[i].vec());
        if (format == FrameFormat::kPng16) {
            PngImage img{frame.width, frame.height, 1, 16, {}};
            img.samples.resize(frame.values.size());
            for (std::size_t p = 0; p < frame.values.size(); ++p) {
                const double v = frame.values[p];
                img.samples[p] = quantize16(encoding == Encoding::kSigned11 ? (v + 1.0) * 0.5 : v);
            }
            write_png(dir / name, img);
        } else {
            FloatImage img{frame.width, frame.height, {}};
            img.values.resize(frame.values.size());
            std::transform(frame.values.begin(), frame.values.end(), img.values.begin(),
                           [](double v) { return static_cast<float>(v); });
            write_pfm(dir / name, img);
        }
    }
    write_mask(dir / m.mask, stored.mask());
    write_json(dir / kManifestName, to_json(m));
}

ShadingSequence read_sequence(const fs::path& dir)
{
    const auto manifest_path = dir / kManifestName;
    if (!fs::exists(manifest_path)) {
        throw FormatError("no " + std::string(kManifestName) + " in " + dir.string());
    }
    const auto m = manifest_from_json(read_json(manifest_path));
    if (!fs::exists(dir / m.mask)) {
        throw FormatError("sequence manifest references missing mask " + (dir / m.mask).string());
    }
    const Mask mask = read_mask(dir / m.mask);
    if (mask.width != m.width || mask.height != m.height) {
        throw FormatError("sequence mask dimensions disagree with the manifest");
    }

    std::vector<UnitVec3> dirs;
    try {
        for (const auto& l : m.lights) {
            dirs.push_back(UnitVec3::from_unit(l));
        }
    } catch (const DomainError& e) {
        throw FormatError(std::string("sequence manifest: ") + e.what());
    }

    ShadingSequence seq;
    seq.encoding = m.encoding;
    try {
        seq.lights = LightPath(std::move(dirs));
    } catch (const Error& e) {
        throw FormatError(std::string("sequence manifest: ") + e.what());
    }
    const double background = m.encoding == Encoding::kSigned11 ? -1.0 : 0.0;
    for (const auto& name : m.frames) {
        const auto path = dir / name;
        if (!fs::exists(path)) {
            throw FormatError("sequence manifest references missing frame " + path.string());
        }
        ShadingFrame frame(mask);
        const bool is_pfm = path.extension() == ".pfm";
        if (is_pfm) {
            const auto img = read_pfm(path);
            if (img.width != m.width || img.height != m.height) {
                throw FormatError(path.string() + ": frame dimensions disagree with the manifest");
            }
            for (std::size_t p = 0; p < frame.values.size(); ++p) {
                frame.values[p] = mask[p] ? static_cast<double>(img.values[p]) : background;
            }
        } else {
            const auto img = read_png(path);
            if (img.channels != 1 || img.bit_depth != 16) {
                throw FormatError(path.string() + ": shading frames must be 16-bit grayscale PNGs");
            }
            if (img.width != m.width || img.height != m.height) {
                throw FormatError(path.string() + ": frame dimensions disagree with the manifest");
            }
            for (std::size_t p = 0; p < frame.values.size(); ++p) {
                const double unit = static_cast<double>(img.samples[p]) / 65535.0;
                const double v = m.encoding == Encoding::kSigned11 ? 2.0 * unit - 1.0 : to_working_precision(unit);
                frame.values[p] = mask[p] ? v : background;
            }
        }
        seq.frames.push_back(std::move(frame));
    }
    try {
        seq.validate();
    } catch (const Error& e) {
        throw FormatError(dir.string() + ": " + e.what());
    }
    return seq.encoding == Encoding::kSigned11 ? decode_signed(seq) : seq;
}

} // namespace shadenorm::io
