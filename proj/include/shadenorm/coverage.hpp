// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <shadenorm/core.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace shadenorm {

// A normal counts as illuminated by light i when v . l_i > 0 (strict, no
// threshold). Coverage is evaluated on the cap {v : v_z > min_z}.
struct CoverageOptions {
    int required = 3;            // m
    double min_z = 1e-3;
    std::size_t samples = 1'000'000; // Monte Carlo draws; 0 disables the Monte Carlo pass
    std::uint64_t seed = 0;
    int azimuth_steps = 721;     // 0.5 degree spacing over [0, 360]
    int elevation_steps = 181;
};

struct CoveragePass {
    std::size_t evaluated = 0;
    int min_positive_count = 0;
    std::vector<std::size_t> histogram; // histogram[k] = normals seeing exactly k lights
    UnitVec3 worst_normal;
    double fraction_meeting = 0.0;      // share of normals with count >= required
};

struct CoverageReport {
    int required = 0;
    double min_z = 0.0;
    std::uint64_t seed = 0;
    int light_count = 0;
    int min_positive_count = 0; // over both passes
    UnitVec3 worst_normal;
    bool meets_requirement = false;
    CoveragePass grid;
    std::optional<CoveragePass> monte_carlo;
};

// Positive-shading count of one normal.
int positive_count(const LightPath& lights, const Vec3& v);

// Deterministic azimuth x elevation grid on the cap, elevation cells sampled
// at their midpoints so every node satisfies z > min_z.
std::vector<UnitVec3> coverage_grid(double min_z, int azimuth_steps, int elevation_steps);

CoverageReport verify_coverage(const LightPath& lights, const CoverageOptions& opts = {});

struct RingFailure {
    int count = 0;
    double phase_deg = 0.0;
    int min_positive_count = 0;
    UnitVec3 worst_normal;
};

struct MinLightsResult {
    bool found = false;
    int count = 0;                          // valid when found
    std::optional<RingFailure> below;       // evidence that count - 1 fails
    std::vector<RingFailure> failures;      // one entry per rejected count
    std::string diagnostics;
};

struct MinLightsOptions {
    double elevation_deg = 45.0;
    int required = 3;
    double min_z = 1e-3;
    int max_count = 16;
    double phase_step_deg = 0.5;
    std::size_t samples = 0; // Monte Carlo draws per candidate ring; grid only when 0
    std::uint64_t seed = 0;
};

// Smallest ring size whose coverage holds for every phase on the phase grid.
MinLightsResult min_lights(const MinLightsOptions& opts);

} // namespace shadenorm
