// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#include <shadenorm/coverage.hpp>

#include <shadenorm/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace shadenorm {

int positive_count(const LightPath& lights, const Vec3& v)
{
    int c = 0;
    for (const auto& l : lights.directions()) {
        if (l.dot(v) > 0.0) {
            ++c;
        }
    }
    return c;
}

std::vector<UnitVec3> coverage_grid(double min_z, int azimuth_steps, int elevation_steps)
{
    if (azimuth_steps < 1 || elevation_steps < 1) {
        throw ParameterError("coverage grid needs at least one step per axis");
    }
    const double el_min = std::asin(min_z);
    const double el_span = kPi / 2.0 - el_min;
    std::vector<UnitVec3> grid;
    grid.reserve(static_cast<std::size_t>(azimuth_steps) * elevation_steps);
    for (int j = 0; j < elevation_steps; ++j) {
        const double el = el_min + el_span * (j + 0.5) / elevation_steps;
        const double z = std::sin(el);
        const double r = std::cos(el);
        for (int k = 0; k < azimuth_steps; ++k) {
            const double az = azimuth_steps > 1 ? 2.0 * kPi * k / (azimuth_steps - 1) : 0.0;
            grid.push_back(UnitVec3::normalize(Vec3(r * std::cos(az), r * std::sin(az), z)));
        }
    }
    return grid;
}

namespace {

struct Partial {
    std::vector<std::size_t> histogram;
    int min_count = std::numeric_limits<int>::max();
    std::size_t min_index = 0;
};

CoveragePass evaluate(const LightPath& lights, const std::vector<UnitVec3>& normals, int required)
{
    const std::size_t f = lights.size();
    std::mutex m;
    // Partials are keyed by chunk start and merged in index order below.
    std::vector<std::pair<std::size_t, Partial>> chunks;
    parallel_for(normals.size(), [&](std::size_t b, std::size_t e) {
        Partial p;
        p.histogram.assign(f + 1, 0);
        for (std::size_t i = b; i < e; ++i) {
            const int c = positive_count(lights, normals[i].vec());
            ++p.histogram[static_cast<std::size_t>(c)];
            if (c < p.min_count) {
                p.min_count = c;
                p.min_index = i;
            }
        }
        std::lock_guard lock(m);
        chunks.emplace_back(b, std::move(p));
    }, 4096);
    std::sort(chunks.begin(), chunks.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    CoveragePass pass;
    pass.evaluated = normals.size();
    pass.histogram.assign(f + 1, 0);
    int best = std::numeric_limits<int>::max();
    std::size_t best_index = 0;
    for (const auto& [start, p] : chunks) {
        for (std::size_t k = 0; k <= f; ++k) {
            pass.histogram[k] += p.histogram[k];
        }
        if (p.min_count < best) {
            best = p.min_count;
            best_index = p.min_index;
        }
    }
    pass.min_positive_count = best;
    pass.worst_normal = normals[best_index];
    std::size_t meeting = 0;
    for (std::size_t k = static_cast<std::size_t>(std::max(required, 0)); k <= f; ++k) {
        meeting += pass.histogram[k];
    }
    pass.fraction_meeting = static_cast<double>(meeting) / static_cast<double>(normals.size());
    return pass;
}

void check(const LightPath& lights, int required, double min_z)
{
    if (lights.empty()) {
        throw ParameterError("coverage needs a nonempty light path");
    }
    if (required < 1) {
        throw ParameterError("required positive count m must be >= 1");
    }
    if (!(min_z >= 0.0 && min_z < 1.0)) {
        throw ParameterError("min_z must lie in [0, 1)");
    }
}

} // namespace

CoverageReport verify_coverage(const LightPath& lights, const CoverageOptions& opts)
{
    check(lights, opts.required, opts.min_z);

    CoverageReport report;
    report.required = opts.required;
    report.min_z = opts.min_z;
    report.seed = opts.seed;
    report.light_count = static_cast<int>(lights.size());
    report.grid = evaluate(lights, coverage_grid(opts.min_z, opts.azimuth_steps, opts.elevation_steps), opts.required);
    report.min_positive_count = report.grid.min_positive_count;
    report.worst_normal = report.grid.worst_normal;
    if (opts.samples > 0) {
        report.monte_carlo = evaluate(lights, sample_cap(opts.samples, opts.min_z, opts.seed), opts.required);
        if (report.monte_carlo->min_positive_count < report.min_positive_count) {
            report.min_positive_count = report.monte_carlo->min_positive_count;
            report.worst_normal = report.monte_carlo->worst_normal;
        }
    }
    report.meets_requirement = report.min_positive_count >= opts.required;
    return report;
}

MinLightsResult min_lights(const MinLightsOptions& opts)
{
    RingSpec probe{1, opts.elevation_deg, 0.0};
    probe.validate();
    if (!(opts.phase_step_deg > 0.0)) {
        throw ParameterError("phase step must be positive");
    }
    if (opts.max_count < 1) {
        throw ParameterError("max_count must be >= 1");
    }

    const auto grid = coverage_grid(opts.min_z, CoverageOptions{}.azimuth_steps, CoverageOptions{}.elevation_steps);
    std::vector<UnitVec3> mc;
    if (opts.samples > 0) {
        mc = sample_cap(opts.samples, opts.min_z, opts.seed);
    }
    const auto phases = static_cast<int>(std::ceil(360.0 / opts.phase_step_deg));

    MinLightsResult result;
    for (int count = 1; count <= opts.max_count; ++count) {
        std::optional<RingFailure> failure;
        for (int k = 0; k < phases && !failure; ++k) {
            const double phase = k * opts.phase_step_deg;
            if (phase >= 360.0) {
                break;
            }
            const auto ring = gen_ring(RingSpec{count, opts.elevation_deg, phase});
            check(ring, opts.required, opts.min_z);
            auto pass = evaluate(ring, grid, opts.required);
            if (!mc.empty()) {
                auto mc_pass = evaluate(ring, mc, opts.required);
                if (mc_pass.min_positive_count < pass.min_positive_count) {
                    pass = std::move(mc_pass);
                }
            }
            if (pass.min_positive_count < opts.required) {
                failure = RingFailure{count, phase, pass.min_positive_count, pass.worst_normal};
            }
        }
        if (!failure) {
            result.found = true;
            result.count = count;
            if (!result.failures.empty()) {
                result.below = result.failures.back();
            }
            return result;
        }
        result.failures.push_back(*failure);
    }

    std::ostringstream msg;
    msg << "no ring with at most " << opts.max_count << " lights at elevation " << opts.elevation_deg
        << " deg gives every normal with z > " << opts.min_z << " at least " << opts.required
        << " positive shadings";
    if (!result.failures.empty()) {
        const auto& last = result.failures.back();
        msg << "; " << last.count << " lights reach only " << last.min_positive_count << " at phase "
            << last.phase_deg << " deg";
        result.below = last;
    }
    result.diagnostics = msg.str();
    return result;
}

} // namespace shadenorm
