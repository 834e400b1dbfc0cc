// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <shadenorm/core.hpp>
#include <shadenorm/render.hpp>
#include <shadenorm/solver.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace shadenorm {

// Adds i.i.d. N(0, sigma^2) to the selected frames at masked-in pixels,
// then clamps to [0, 1]. Frame i draws from stream (seed, i), so a frame's
// noise does not depend on which other frames are selected.
ShadingSequence perturb_shading(const ShadingSequence& seq, const std::vector<int>& frame_indices, double sigma,
                                std::uint64_t seed);

// n' = normalize(n + eta), eta ~ N(0, sigma^2 I); zero-length draws are redrawn.
NormalMap perturb_normals(const NormalMap& normals, double sigma, std::uint64_t seed);

enum class PerturbTarget { kShading, kNormal };

struct PerturbationRow {
    PerturbTarget target = PerturbTarget::kShading;
    int frames = 0; // perturbed frame count (shading rows only)
    double sigma = 0.0;
    double delta_mae_deg = 0.0; // mean over runs
    double std_dev_deg = 0.0;   // sample standard deviation over runs
    int runs = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<double> run_deltas;
};

struct PerturbationReport {
    double clean_mae_deg = 0.0;
    std::vector<double> sigmas;
    std::vector<int> frame_counts;
    int runs = 0;
    std::uint64_t base_seed = 0;
    // Noisy shadings are clamped to [0, 1] before solving.
    std::string noise_handling = "clamp01";
    std::vector<PerturbationRow> rows; // shading rows by frame count, then the normal row; sigma ascending inside
};

struct RobustnessConfig {
    std::vector<double> sigmas = {0.05, 0.1, 0.2, 0.3, 0.4};
    std::vector<int> frame_counts = {1, 9}; // perturbs frames 0..k-1
    bool include_normal = true;
    int runs = 5;
    std::uint64_t base_seed = 42;
    SolveOptions solve;
};

// Clean MAE from render -> solve_masked; each row reports the MAE change
// after perturbing, averaged over runs with seeds base_seed + run.
PerturbationReport run_robustness(const NormalMap& normals_gt, const LightPath& lights,
                                  const RobustnessConfig& cfg = {});

} // namespace shadenorm
