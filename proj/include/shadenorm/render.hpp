// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <shadenorm/core.hpp>

#include <vector>

namespace shadenorm {

enum class Encoding {
    kUnsigned01, // shading values in [0, 1]
    kSigned11,   // 2 s - 1, values in [-1, 1]
};

// One shading map. Masked-out pixels hold 0 (or -1 once signed-encoded).
struct ShadingFrame {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    Mask mask;

    ShadingFrame() = default;
    explicit ShadingFrame(const Mask& m);

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    double at(int x, int y) const { return values[index(x, y)]; }
};

// Frames aligned one-to-one with the light path that produced them.
struct ShadingSequence {
    std::vector<ShadingFrame> frames;
    LightPath lights;
    Encoding encoding = Encoding::kUnsigned01;

    std::size_t size() const { return frames.size(); }
    int width() const { return frames.empty() ? 0 : frames.front().width; }
    int height() const { return frames.empty() ? 0 : frames.front().height; }
    const Mask& mask() const { return frames.front().mask; }

    // Checks frame/light counts, shared dimensions and mask, and value
    // ranges for the sequence's encoding. Throws StructuralError or DomainError.
    void validate() const;
};

// Shading values live on the fixed-point grid k * 2^-53, k in [0, 2^53].
// On that grid the signed codec is an exact bijection.
double to_working_precision(double value);

ShadingFrame render_frame(const NormalMap& normals, const UnitVec3& light);

// frame i, pixel p: max(n_p . l_i, 0) for masked-in p, else 0.
ShadingSequence render_shading(const NormalMap& normals, const LightPath& lights);

// S -> 2 S - 1 on every pixel (masked-out background becomes -1).
ShadingSequence encode_signed(const ShadingSequence& seq);
// Inverse of encode_signed.
ShadingSequence decode_signed(const ShadingSequence& seq);

const char* encoding_name(Encoding e);

} // namespace shadenorm
