// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <shadenorm/core.hpp>
#include <shadenorm/render.hpp>

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace shadenorm {

// Angular-error thresholds (degrees) reported as pct_below.
inline constexpr std::array<double, 6> kErrorThresholdsDeg = {3.0, 5.0, 7.5, 11.25, 22.5, 30.0};
inline constexpr std::array<std::string_view, 6> kErrorThresholdNames = {"3", "5", "7.5", "11.25", "22.5", "30"};

// Per-pixel angular error in degrees; mask is the intersection of both inputs.
struct ErrorMap {
    int width = 0;
    int height = 0;
    std::vector<double> degrees;
    Mask mask;
};

struct MaeStats {
    double mean = 0.0;
    double median = 0.0; // lower-middle element for even counts
    std::array<double, 6> pct_below{};
    std::size_t n = 0;
};

struct TvComparison {
    double normal = 0.0;  // colour-encoded normal map
    double shading = 0.0; // mean over the frames of a shading sequence
    double ratio() const { return shading / normal; }
};

struct MetricsReport {
    double mae_deg = 0.0;
    double median_deg = 0.0;
    std::array<double, 6> pct_below{};
    std::size_t n_pixels = 0;
    std::optional<double> sne_deg;
    std::optional<TvComparison> tv;
    std::optional<double> psnr_db;
    std::optional<double> ssim;
};

// Angle between two vectors in degrees, via atan2(|a x b|, a . b).
double angle_deg(const Vec3& a, const Vec3& b);

ErrorMap angular_error_map(const NormalMap& est, const NormalMap& gt);

MaeStats mae_stats(const ErrorMap& errors);

MetricsReport make_report(const MaeStats& stats);

// Masked-in pixels next to a mask crossing, or whose right/lower neighbour
// differs by more than angle_thresh_deg, dilated by a square of radius dilate_px.
Mask extract_boundary(const NormalMap& gt, double angle_thresh_deg = 15.0, int dilate_px = 1);

// Mean angular error over boundary and both masks.
double sne(const NormalMap& est, const NormalMap& gt, const Mask& boundary);

// Mean first-order gradient magnitude over pixels whose right and lower
// neighbours are masked in. Normal maps are colour-encoded as (n + 1) / 2.
double tv(const ShadingFrame& frame);
double tv(const NormalMap& normals);
double tv(const ShadingSequence& seq);

inline constexpr double kPsnrCapDb = 99.0;

// 10 log10(1 / MSE) over the intersection mask, capped at 99 dB.
double psnr(const ShadingFrame& est, const ShadingFrame& gt);

// Gaussian-window SSIM (11 x 11, sigma 1.5, K1 0.01, K2 0.03, range 1),
// averaged over windows lying entirely inside both masks.
double ssim(const ShadingFrame& est, const ShadingFrame& gt);

// The normalised 11 x 11 window, row-major.
std::array<double, 121> ssim_window();

} // namespace shadenorm
