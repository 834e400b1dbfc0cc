// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#include <shadenorm/core.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shadenorm {

UnitVec3 UnitVec3::normalize(const Vec3& v)
{
    const double len = v.norm();
    if (!(len > 1e-300) || !std::isfinite(len)) {
        throw DomainError("cannot normalize a zero or non-finite vector");
    }
    return UnitVec3(v / len);
}

UnitVec3 UnitVec3::from_unit(const Vec3& v)
{
    const double len = v.norm();
    if (!std::isfinite(len) || std::abs(len - 1.0) > kTolerance) {
        std::ostringstream msg;
        msg << "vector (" << v.x() << ", " << v.y() << ", " << v.z() << ") is not unit length";
        throw DomainError(msg.str());
    }
    return UnitVec3(v);
}

void RingSpec::validate() const
{
    if (count < 1) {
        throw ParameterError("ring light count must be >= 1");
    }
    if (!(elevation_deg > 0.0 && elevation_deg < 90.0)) {
        throw ParameterError("ring elevation must lie strictly between 0 and 90 degrees");
    }
    if (!(phase_deg >= 0.0 && phase_deg < 360.0)) {
        throw ParameterError("ring phase must lie in [0, 360) degrees");
    }
}

LightPath::LightPath(std::vector<UnitVec3> directions, std::optional<RingSpec> ring)
    : directions_(std::move(directions)), ring_(std::move(ring))
{
    if (directions_.empty()) {
        throw ParameterError("a light path needs at least one direction");
    }
    for (const auto& d : directions_) {
        if (!(d.z() > 0.0)) {
            throw DomainError("light directions must lie in the upper hemisphere (z > 0)");
        }
    }
}

bool LightPath::full_rank() const
{
    if (directions_.size() < 3) {
        return false;
    }
    Eigen::MatrixXd m(3, directions_.size());
    for (std::size_t i = 0; i < directions_.size(); ++i) {
        m.col(static_cast<Eigen::Index>(i)) = directions_[i].vec();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    return s(2) > 1e-8 * s(0);
}

LightPath LightPath::with_light(const UnitVec3& extra) const
{
    auto dirs = directions_;
    dirs.push_back(extra);
    return LightPath(std::move(dirs));
}

Mask::Mask(int w, int h, bool fill)
    : width(w), height(h), valid(static_cast<std::size_t>(w) * h, fill ? 1 : 0)
{
    if (w < 0 || h < 0) {
        throw ParameterError("mask dimensions must be non-negative");
    }
}

std::size_t Mask::count() const
{
    return static_cast<std::size_t>(std::count_if(valid.begin(), valid.end(), [](auto v) { return v != 0; }));
}

Mask Mask::intersect(const Mask& o) const
{
    if (!same_shape(o)) {
        throw StructuralError("mask dimensions differ");
    }
    Mask out(width, height);
    for (std::size_t i = 0; i < valid.size(); ++i) {
        out.valid[i] = (valid[i] && o.valid[i]) ? 1 : 0;
    }
    return out;
}

NormalMap::NormalMap(int w, int h)
    : width(w), height(h), normals(static_cast<std::size_t>(w) * h, Vec3::Zero()), mask(w, h)
{
}

void NormalMap::set(std::size_t i, const UnitVec3& n)
{
    normals[i] = n.vec();
    mask.valid[i] = 1;
}

void NormalMap::clear(std::size_t i)
{
    normals[i].setZero();
    mask.valid[i] = 0;
}

void NormalMap::validate() const
{
    const auto n = static_cast<std::size_t>(width) * height;
    if (width < 0 || height < 0 || normals.size() != n || mask.width != width || mask.height != height ||
        mask.size() != n) {
        throw StructuralError("normal map buffers do not match its dimensions");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (mask[i]) {
            if (std::abs(normals[i].norm() - 1.0) > UnitVec3::kTolerance) {
                throw DomainError("masked-in normal at index " + std::to_string(i) + " is not unit length");
            }
        } else if (!normals[i].isZero(0.0)) {
            throw DomainError("masked-out normal at index " + std::to_string(i) + " is not zero");
        }
    }
}

bool NormalMap::camera_facing() const
{
    for (std::size_t i = 0; i < normals.size(); ++i) {
        if (mask[i] && !(normals[i].z() > 0.0)) {
            return false;
        }
    }
    return true;
}

RingSpec default_ring()
{
    return RingSpec{};
}

LightPath gen_ring(const RingSpec& spec)
{
    spec.validate();
    const double e = deg2rad(spec.elevation_deg);
    const double ce = std::cos(e);
    const double se = std::sin(e);
    std::vector<UnitVec3> dirs;
    dirs.reserve(static_cast<std::size_t>(spec.count));
    for (int i = 0; i < spec.count; ++i) {
        const double theta = deg2rad(spec.phase_deg) + 2.0 * kPi * i / spec.count;
        dirs.push_back(UnitVec3::from_unit(Vec3(ce * std::cos(theta), ce * std::sin(theta), se)));
    }
    return LightPath(std::move(dirs), spec);
}

std::vector<UnitVec3> sample_cap(std::size_t n, double min_z, std::uint64_t seed)
{
    if (n < 1) {
        throw ParameterError("sample_cap needs n >= 1");
    }
    if (!(min_z >= 0.0 && min_z < 1.0)) {
        throw ParameterError("sample_cap min_z must lie in [0, 1)");
    }
    // Archimedes: z is uniform on the cap under the area measure.
    auto rng = make_stream(seed, 0);
    std::vector<UnitVec3> out;
    out.reserve(n);
    while (out.size() < n) {
        const double z = min_z + (1.0 - min_z) * (1.0 - uniform01(rng));
        const double phi = 2.0 * kPi * uniform01(rng);
        if (!(z > min_z)) {
            continue;
        }
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        out.push_back(UnitVec3::normalize(Vec3(r * std::cos(phi), r * std::sin(phi), z)));
    }
    return out;
}

NormalMap synth_sphere(int size)
{
    if (size < 4) {
        throw ParameterError("sphere fixture size must be >= 4");
    }
    NormalMap map(size, size);
    const double radius = 0.45 * size;
    const int c = size / 2;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double u = (x - c) / radius;
            const double v = (c - y) / radius;
            const double r2 = u * u + v * v;
            if (r2 < 1.0) {
                const std::size_t i = map.index(x, y);
                map.normals[i] = Vec3(u, v, std::sqrt(1.0 - r2));
                map.mask.valid[i] = 1;
            }
        }
    }
    return map;
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

} // namespace shadenorm
