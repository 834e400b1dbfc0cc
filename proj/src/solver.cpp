// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#include <shadenorm/solver.hpp>

#include <shadenorm/parallel.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <map>

namespace shadenorm {

const char* status_name(PixelStatus s)
{
    switch (s) {
    case PixelStatus::kOk: return "ok";
    case PixelStatus::kUnderdetermined: return "underdetermined";
    case PixelStatus::kRankDeficient: return "rank_deficient";
    case PixelStatus::kDegenerateNorm: return "degenerate_norm";
    case PixelStatus::kBackground: return "background";
    }
    return "unknown";
}

namespace {

constexpr double kRankTolerance = 1e-8;
constexpr double kMinNorm = 1e-6;

// Frame subset selecting the equations of one pixel.
using Subset = std::vector<bool>;

// Pseudo-inverse (L_V^T L_V)^-1 L_V^T for one subset, or the reason it
// cannot be formed.
struct Factor {
    PixelStatus status = PixelStatus::kOk;
    std::vector<int> frames;
    Eigen::Matrix3Xd pinv;
};

Factor factorize(const LightPath& lights, const Subset& subset)
{
    Factor f;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (subset[i]) {
            f.frames.push_back(static_cast<int>(i));
        }
    }
    if (f.frames.size() < 3) {
        f.status = PixelStatus::kUnderdetermined;
        return f;
    }
    const auto rows = static_cast<Eigen::Index>(f.frames.size());
    Eigen::MatrixX3d lv(rows, 3);
    for (Eigen::Index r = 0; r < rows; ++r) {
        lv.row(r) = lights[static_cast<std::size_t>(f.frames[r])].vec().transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixX3d> svd(lv);
    const auto& sv = svd.singularValues();
    if (!(sv(2) >= kRankTolerance * sv(0))) {
        f.status = PixelStatus::kRankDeficient;
        return f;
    }
    const Eigen::Matrix3d gram = lv.transpose() * lv;
    f.pinv = gram.ldlt().solve(lv.transpose());
    return f;
}

SolveResult solve_impl(const ShadingSequence& seq, bool use_all, double threshold)
{
    seq.validate();
    if (seq.encoding != Encoding::kUnsigned01) {
        throw StructuralError("solver expects an unsigned01 shading sequence; decode it first");
    }
    if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
        throw ParameterError("positive threshold must be a finite value >= 0");
    }

    const std::size_t f = seq.size();
    const Mask& mask = seq.mask();
    const std::size_t npix = mask.size();

    // Pass 1: the equation subset of every pixel.
    std::vector<Subset> subset(npix);
    parallel_for(npix, [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            if (!mask[p]) {
                continue;
            }
            Subset s(f);
            for (std::size_t i = 0; i < f; ++i) {
                s[i] = use_all || seq.frames[i].values[p] > threshold;
            }
            subset[p] = std::move(s);
        }
    }, 1024);

    // Pass 2: one factorization per distinct subset.
    std::map<Subset, Factor> factors;
    for (std::size_t p = 0; p < npix; ++p) {
        if (mask[p] && !factors.contains(subset[p])) {
            factors.emplace(subset[p], factorize(seq.lights, subset[p]));
        }
    }

    SolveResult result;
    result.normals = NormalMap(mask.width, mask.height);
    result.status.assign(npix, PixelStatus::kBackground);
    result.residual.assign(npix, 0.0);
    result.raw_norm.assign(npix, 0.0);
    result.used.assign(npix, 0);

    // Pass 3: per-pixel solves against the shared factors.
    parallel_for(npix, [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            if (!mask[p]) {
                continue;
            }
            const Factor& fac = factors.at(subset[p]);
            result.used[p] = static_cast<std::uint8_t>(std::min<std::size_t>(fac.frames.size(), 255));
            if (fac.status != PixelStatus::kOk) {
                result.status[p] = fac.status;
                continue;
            }
            Vec3 n = Vec3::Zero();
            for (std::size_t k = 0; k < fac.frames.size(); ++k) {
                n += fac.pinv.col(static_cast<Eigen::Index>(k)) * seq.frames[fac.frames[k]].values[p];
            }
            double sq = 0.0;
            for (int i : fac.frames) {
                const double r = seq.lights[static_cast<std::size_t>(i)].dot(n) - seq.frames[i].values[p];
                sq += r * r;
            }
            const double len = n.norm();
            result.raw_norm[p] = len;
            result.residual[p] = std::sqrt(sq / static_cast<double>(fac.frames.size()));
            if (!(len >= kMinNorm)) {
                result.status[p] = PixelStatus::kDegenerateNorm;
                continue;
            }
            result.status[p] = PixelStatus::kOk;
            result.normals.normals[p] = n / len;
            result.normals.mask.valid[p] = 1;
        }
    }, 1024);

    // Stats in fixed pixel order.
    SolveStats& st = result.stats;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t p = 0; p < npix; ++p) {
        switch (result.status[p]) {
        case PixelStatus::kOk:
            ++st.ok;
            sum += result.residual[p];
            sum_sq += result.residual[p] * result.residual[p];
            break;
        case PixelStatus::kUnderdetermined: ++st.underdetermined; break;
        case PixelStatus::kRankDeficient: ++st.rank_deficient; break;
        case PixelStatus::kDegenerateNorm: ++st.degenerate_norm; break;
        case PixelStatus::kBackground: break;
        }
    }
    if (st.ok > 0) {
        st.mean_residual = sum / static_cast<double>(st.ok);
        st.rms_residual = std::sqrt(sum_sq / static_cast<double>(st.ok));
    }
    return result;
}

} // namespace

SolveResult solve_masked(const ShadingSequence& seq, const SolveOptions& opts)
{
    return solve_impl(seq, false, opts.positive_threshold);
}

SolveResult solve_naive(const ShadingSequence& seq)
{
    return solve_impl(seq, true, 0.0);
}

} // namespace shadenorm
