// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <shadenorm/errors.hpp>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace shadenorm {

using Vec3 = Eigen::Vector3d;

// Right-handed frame, camera on +z looking toward -z. Normals and light
// directions point away from the surface, so "camera facing" means z > 0.
class UnitVec3 {
public:
    static constexpr double kTolerance = 1e-6;

    UnitVec3() : v_(0.0, 0.0, 1.0) {}

    // Scales v to unit length. Throws DomainError for (near) zero vectors.
    static UnitVec3 normalize(const Vec3& v);
    // Accepts v as-is if it is unit length within kTolerance.
    static UnitVec3 from_unit(const Vec3& v);

    const Vec3& vec() const { return v_; }
    double x() const { return v_.x(); }
    double y() const { return v_.y(); }
    double z() const { return v_.z(); }

    double dot(const Vec3& o) const { return v_.x() * o.x() + v_.y() * o.y() + v_.z() * o.z(); }
    double dot(const UnitVec3& o) const { return dot(o.v_); }

    bool operator==(const UnitVec3& o) const { return v_ == o.v_; }

private:
    explicit UnitVec3(const Vec3& v) : v_(v) {}
    Vec3 v_;
};

struct RingSpec {
    int count = 9;
    double elevation_deg = 45.0;
    double phase_deg = 0.0;

    // count >= 1, elevation in (0, 90), phase in [0, 360).
    void validate() const;
    bool operator==(const RingSpec&) const = default;
};

// Ordered parallel-light directions, all in the upper hemisphere.
class LightPath {
public:
    LightPath() = default;
    explicit LightPath(std::vector<UnitVec3> directions, std::optional<RingSpec> ring = std::nullopt);

    std::size_t size() const { return directions_.size(); }
    bool empty() const { return directions_.empty(); }
    const std::vector<UnitVec3>& directions() const { return directions_; }
    const UnitVec3& operator[](std::size_t i) const { return directions_[i]; }

    // Ring parameters when generated by gen_ring, nullopt for custom paths.
    const std::optional<RingSpec>& ring() const { return ring_; }

    // f >= 3 and the 3 x f direction matrix has smallest singular value
    // > 1e-8 x largest.
    bool full_rank() const;

    // Copy of this path with one more direction appended (provenance becomes custom).
    LightPath with_light(const UnitVec3& extra) const;

private:
    std::vector<UnitVec3> directions_;
    std::optional<RingSpec> ring_;
};

struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> valid;

    Mask() = default;
    Mask(int w, int h, bool fill = false);

    std::size_t size() const { return valid.size(); }
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool operator()(int x, int y) const { return valid[index(x, y)] != 0; }
    bool operator[](std::size_t i) const { return valid[i] != 0; }
    void set(int x, int y, bool v) { valid[index(x, y)] = v ? 1 : 0; }
    std::size_t count() const;

    bool same_shape(const Mask& o) const { return width == o.width && height == o.height; }
    Mask intersect(const Mask& o) const;
    bool operator==(const Mask&) const = default;
};

// Per-pixel unit normals. Masked-out pixels hold the zero vector.
struct NormalMap {
    int width = 0;
    int height = 0;
    std::vector<Vec3> normals;
    Mask mask;

    NormalMap() = default;
    NormalMap(int w, int h);

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    const Vec3& at(int x, int y) const { return normals[index(x, y)]; }
    void set(std::size_t i, const UnitVec3& n);
    void clear(std::size_t i);

    // Throws StructuralError on inconsistent buffers and DomainError when a
    // masked-in pixel is not unit length or a masked-out pixel is nonzero.
    void validate() const;
    // True when every masked-in pixel has n_z > 0.
    bool camera_facing() const;
};

RingSpec default_ring();

LightPath gen_ring(const RingSpec& spec);

// Uniform (area measure) draws from the cap {v : v_z > min_z}.
std::vector<UnitVec3> sample_cap(std::size_t n, double min_z, std::uint64_t seed);

// Orthographic unit sphere of radius 0.45 * size centred at pixel (size/2, size/2).
// Image rows grow downward while the normal's y axis points up.
NormalMap synth_sphere(int size);

// Random streams

// Independent stream derived from (seed, stream). Stable for a given standard library.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double d) { return d * (kPi / 180.0); }
inline double rad2deg(double r) { return r * (180.0 / kPi); }

} // namespace shadenorm
