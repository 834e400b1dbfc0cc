// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#include <shadenorm/render.hpp>

#include <shadenorm/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace shadenorm {

ShadingFrame::ShadingFrame(const Mask& m)
    : width(m.width), height(m.height), values(m.size(), 0.0), mask(m)
{
}

void ShadingSequence::validate() const
{
    if (frames.empty()) {
        throw StructuralError("shading sequence has no frames");
    }
    if (frames.size() != lights.size()) {
        throw StructuralError("shading sequence has " + std::to_string(frames.size()) + " frames but " +
                              std::to_string(lights.size()) + " lights");
    }
    const auto& first = frames.front();
    const double lo = encoding == Encoding::kUnsigned01 ? 0.0 : -1.0;
    for (const auto& f : frames) {
        if (f.width != first.width || f.height != first.height ||
            f.values.size() != static_cast<std::size_t>(f.width) * f.height) {
            throw StructuralError("shading frames differ in dimensions");
        }
        if (!(f.mask == first.mask) || f.mask.width != f.width || f.mask.height != f.height) {
            throw StructuralError("shading frames must share one mask");
        }
        for (double v : f.values) {
            if (!(v >= lo && v <= 1.0)) {
                throw DomainError("shading value " + std::to_string(v) + " outside the " +
                                  encoding_name(encoding) + " range");
            }
        }
    }
}

double to_working_precision(double value)
{
    return std::nearbyint(value * 0x1p53) * 0x1p-53;
}

ShadingFrame render_frame(const NormalMap& normals, const UnitVec3& light)
{
    ShadingFrame frame(normals.mask);
    const Vec3& l = light.vec();
    parallel_for(static_cast<std::size_t>(normals.height), [&](std::size_t y0, std::size_t y1) {
        for (std::size_t i = y0 * normals.width; i < y1 * normals.width; ++i) {
            if (!normals.mask[i]) {
                continue;
            }
            const Vec3& n = normals.normals[i];
            const double dot = n.x() * l.x() + n.y() * l.y() + n.z() * l.z();
            frame.values[i] = to_working_precision(std::clamp(dot, 0.0, 1.0));
        }
    });
    return frame;
}

ShadingSequence render_shading(const NormalMap& normals, const LightPath& lights)
{
    normals.validate();
    if (lights.empty()) {
        throw ParameterError("cannot render with an empty light path");
    }
    ShadingSequence seq;
    seq.lights = lights;
    seq.frames.reserve(lights.size());
    for (const auto& l : lights.directions()) {
        seq.frames.push_back(render_frame(normals, l));
    }
    return seq;
}

namespace {

template <typename Fn>
ShadingSequence map_values(const ShadingSequence& seq, Encoding out, Fn&& fn)
{
    ShadingSequence result = seq;
    result.encoding = out;
    for (auto& f : result.frames) {
        std::transform(f.values.begin(), f.values.end(), f.values.begin(), fn);
    }
    return result;
}

} // namespace

ShadingSequence encode_signed(const ShadingSequence& seq)
{
    if (seq.encoding != Encoding::kUnsigned01) {
        throw DomainError("encode_signed expects an unsigned01 sequence");
    }
    return map_values(seq, Encoding::kSigned11, [](double s) {
        if (!(s >= 0.0 && s <= 1.0)) {
            throw DomainError("encode_signed input " + std::to_string(s) + " outside [0, 1]");
        }
        return 2.0 * to_working_precision(s) - 1.0;
    });
}

ShadingSequence decode_signed(const ShadingSequence& seq)
{
    if (seq.encoding != Encoding::kSigned11) {
        throw DomainError("decode_signed expects a signed11 sequence");
    }
    return map_values(seq, Encoding::kUnsigned01, [](double v) {
        if (!(v >= -1.0 && v <= 1.0)) {
            throw DomainError("decode_signed input " + std::to_string(v) + " outside [-1, 1]");
        }
        return to_working_precision((v + 1.0) * 0.5);
    });
}

const char* encoding_name(Encoding e)
{
    return e == Encoding::kUnsigned01 ? "unsigned01" : "signed11";
}

} // namespace shadenorm
