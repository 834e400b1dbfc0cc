// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#include <shadenorm/robustness.hpp>

#include <shadenorm/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace shadenorm {

namespace {

constexpr std::uint64_t kNormalStream = 0x6e6f726d616cULL;

double mae(const NormalMap& est, const NormalMap& gt)
{
    return mae_stats(angular_error_map(est, gt)).mean;
}

} // namespace

ShadingSequence perturb_shading(const ShadingSequence& seq, const std::vector<int>& frame_indices, double sigma,
                                std::uint64_t seed)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw ParameterError("noise sigma must be finite and >= 0");
    }
    if (seq.encoding != Encoding::kUnsigned01) {
        throw StructuralError("perturb_shading expects an unsigned01 sequence");
    }
    std::set<int> unique;
    for (int i : frame_indices) {
        if (i < 0 || static_cast<std::size_t>(i) >= seq.size()) {
            throw ParameterError("frame index " + std::to_string(i) + " out of range for " +
                                 std::to_string(seq.size()) + " frames");
        }
        if (!unique.insert(i).second) {
            throw ParameterError("frame index " + std::to_string(i) + " listed twice");
        }
    }
    ShadingSequence out = seq;
    if (sigma == 0.0) {
        return out;
    }
    for (int fi : unique) {
        auto rng = make_stream(seed, static_cast<std::uint64_t>(fi));
        std::normal_distribution<double> gauss(0.0, 1.0);
        auto& frame = out.frames[static_cast<std::size_t>(fi)];
        for (std::size_t p = 0; p < frame.values.size(); ++p) {
            if (!frame.mask[p]) {
                continue;
            }
            const double noisy = frame.values[p] + sigma * gauss(rng);
            frame.values[p] = to_working_precision(std::clamp(noisy, 0.0, 1.0));
        }
    }
    return out;
}

NormalMap perturb_normals(const NormalMap& normals, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw ParameterError("noise sigma must be finite and >= 0");
    }
    NormalMap out = normals;
    if (sigma == 0.0) {
        return out;
    }
    auto rng = make_stream(seed, kNormalStream);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t p = 0; p < out.normals.size(); ++p) {
        if (!out.mask[p]) {
            continue;
        }
        for (;;) {
            const Vec3 eta(gauss(rng), gauss(rng), gauss(rng));
            const Vec3 m = out.normals[p] + sigma * eta;
            const double len = m.norm();
            if (len > 1e-12) {
                out.normals[p] = m / len;
                break;
            }
        }
    }
    return out;
}

PerturbationReport run_robustness(const NormalMap& normals_gt, const LightPath& lights, const RobustnessConfig& cfg)
{
    if (cfg.runs < 1) {
        throw ParameterError("robustness study needs runs >= 1");
    }
    for (double s : cfg.sigmas) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw ParameterError("noise sigma must be finite and >= 0");
        }
    }
    for (int k : cfg.frame_counts) {
        if (k < 1 || static_cast<std::size_t>(k) > lights.size()) {
            throw ParameterError("perturbed frame count " + std::to_string(k) + " outside 1.." +
                                 std::to_string(lights.size()));
        }
    }

    const auto clean_seq = render_shading(normals_gt, lights);
    const auto clean = solve_masked(clean_seq, cfg.solve);
    const double clean_mae = mae(clean.normals, normals_gt);

    PerturbationReport report;
    report.clean_mae_deg = clean_mae;
    report.sigmas = cfg.sigmas;
    report.frame_counts = cfg.frame_counts;
    report.runs = cfg.runs;
    report.base_seed = cfg.base_seed;

    auto summarize = [&](PerturbationRow& row) {
        double sum = 0.0;
        for (double d : row.run_deltas) {
            sum += d;
        }
        row.delta_mae_deg = sum / row.runs;
        double var = 0.0;
        for (double d : row.run_deltas) {
            var += (d - row.delta_mae_deg) * (d - row.delta_mae_deg);
        }
        row.std_dev_deg = row.runs > 1 ? std::sqrt(var / (row.runs - 1)) : 0.0;
    };

    for (int k : cfg.frame_counts) {
        std::vector<int> idx(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            idx[static_cast<std::size_t>(i)] = i;
        }
        for (double sigma : cfg.sigmas) {
            PerturbationRow row{PerturbTarget::kShading, k, sigma, 0.0, 0.0, cfg.runs, {}, {}};
            for (int r = 0; r < cfg.runs; ++r) {
                const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(r);
                const auto noisy = perturb_shading(clean_seq, idx, sigma, seed);
                const auto solved = solve_masked(noisy, cfg.solve);
                row.seeds.push_back(seed);
                row.run_deltas.push_back(mae(solved.normals, normals_gt) - clean_mae);
            }
            summarize(row);
            report.rows.push_back(std::move(row));
        }
    }
    if (cfg.include_normal) {
        for (double sigma : cfg.sigmas) {
            PerturbationRow row{PerturbTarget::kNormal, 0, sigma, 0.0, 0.0, cfg.runs, {}, {}};
            for (int r = 0; r < cfg.runs; ++r) {
                const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(r);
                const auto noisy = perturb_normals(clean.normals, sigma, seed);
                row.seeds.push_back(seed);
                row.run_deltas.push_back(mae(noisy, normals_gt) - clean_mae);
            }
            summarize(row);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

} // namespace shadenorm
