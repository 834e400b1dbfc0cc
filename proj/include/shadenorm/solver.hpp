// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <shadenorm/core.hpp>
#include <shadenorm/render.hpp>

#include <array>
#include <cstdint>
#include <vector>

namespace shadenorm {

enum class PixelStatus : std::uint8_t {
    kOk,
    kUnderdetermined, // fewer than 3 usable equations
    kRankDeficient,   // usable lights span less than 3 dimensions
    kDegenerateNorm,  // least-squares solution shorter than 1e-6
    kBackground,      // outside the input mask; not counted in stats
};

const char* status_name(PixelStatus s);

struct SolveOptions {
    // Frames with shading above this value count as valid equations.
    // Slightly above zero so quantized zeros stay excluded.
    double positive_threshold = 1e-4;
};

struct SolveStats {
    std::size_t ok = 0;
    std::size_t underdetermined = 0;
    std::size_t rank_deficient = 0;
    std::size_t degenerate_norm = 0;
    double mean_residual = 0.0; // mean of per-pixel RMS residuals over ok pixels
    double rms_residual = 0.0;  // sqrt(mean squared residual) over ok pixels

    std::size_t masked_in() const { return ok + underdetermined + rank_deficient + degenerate_norm; }
};

struct SolveResult {
    NormalMap normals;                // masked-in exactly where status == kOk
    std::vector<PixelStatus> status;  // per pixel
    std::vector<double> residual;     // per-pixel RMS of (l . n_raw - s) over used equations
    std::vector<double> raw_norm;     // |n_raw| before normalization
    std::vector<std::uint8_t> used;   // equations entering the solve per pixel
    SolveStats stats;
};

// Least squares over frames with shading > threshold only.
SolveResult solve_masked(const ShadingSequence& seq, const SolveOptions& opts = {});

// Least squares over all frames, clamped zeros included. Biased wherever
// a frame was clamped; kept for comparison.
SolveResult solve_naive(const ShadingSequence& seq);

} // namespace shadenorm
