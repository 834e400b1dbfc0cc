// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#include <shadenorm/metrics.hpp>

#include <algorithm>
#include <cmath>

namespace shadenorm {

double angle_deg(const Vec3& a, const Vec3& b)
{
    return rad2deg(std::atan2(a.cross(b).norm(), a.dot(b)));
}

ErrorMap angular_error_map(const NormalMap& est, const NormalMap& gt)
{
    if (est.width != gt.width || est.height != gt.height) {
        throw StructuralError("normal maps differ in dimensions");
    }
    ErrorMap out;
    out.width = gt.width;
    out.height = gt.height;
    out.mask = est.mask.intersect(gt.mask);
    out.degrees.assign(out.mask.size(), 0.0);
    for (std::size_t i = 0; i < out.degrees.size(); ++i) {
        if (out.mask[i]) {
            out.degrees[i] = angle_deg(est.normals[i], gt.normals[i]);
        }
    }
    return out;
}

MaeStats mae_stats(const ErrorMap& errors)
{
    std::vector<double> vals;
    vals.reserve(errors.mask.count());
    for (std::size_t i = 0; i < errors.degrees.size(); ++i) {
        if (errors.mask[i]) {
            vals.push_back(errors.degrees[i]);
        }
    }
    if (vals.empty()) {
        throw EmptyInputError("no pixels to evaluate: the intersection mask is empty");
    }

    MaeStats s;
    s.n = vals.size();
    std::array<std::size_t, kErrorThresholdsDeg.size()> below{};
    double sum = 0.0;
    for (double v : vals) {
        sum += v;
        for (std::size_t t = 0; t < kErrorThresholdsDeg.size(); ++t) {
            below[t] += v < kErrorThresholdsDeg[t] ? 1 : 0;
        }
    }
    s.mean = sum / static_cast<double>(s.n);
    for (std::size_t t = 0; t < below.size(); ++t) {
        s.pct_below[t] = 100.0 * static_cast<double>(below[t]) / static_cast<double>(s.n);
    }
    const auto mid = vals.begin() + static_cast<std::ptrdiff_t>((s.n - 1) / 2);
    std::nth_element(vals.begin(), mid, vals.end());
    s.median = *mid;
    return s;
}

MetricsReport make_report(const MaeStats& stats)
{
    MetricsReport r;
    r.mae_deg = stats.mean;
    r.median_deg = stats.median;
    r.pct_below = stats.pct_below;
    r.n_pixels = stats.n;
    return r;
}

Mask extract_boundary(const NormalMap& gt, double angle_thresh_deg, int dilate_px)
{
    if (dilate_px < 0) {
        throw ParameterError("boundary dilation must be >= 0");
    }
    const int w = gt.width;
    const int h = gt.height;
    Mask seam(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!gt.mask(x, y)) {
                continue;
            }
            bool edge = false;
            // Mask crossings mark the masked-in side, whichever direction.
            constexpr int dx[4] = {1, -1, 0, 0};
            constexpr int dy[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4 && !edge; ++k) {
                const int nx = x + dx[k];
                const int ny = y + dy[k];
                if (nx >= 0 && ny >= 0 && nx < w && ny < h && !gt.mask(nx, ny)) {
                    edge = true;
                }
            }
            // Angular jumps mark one pixel per jump: the left or upper side.
            if (!edge && x + 1 < w && gt.mask(x + 1, y)) {
                edge = angle_deg(gt.at(x, y), gt.at(x + 1, y)) > angle_thresh_deg;
            }
            if (!edge && y + 1 < h && gt.mask(x, y + 1)) {
                edge = angle_deg(gt.at(x, y), gt.at(x, y + 1)) > angle_thresh_deg;
            }
            seam.set(x, y, edge);
        }
    }
    if (dilate_px == 0) {
        return seam;
    }
    Mask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!gt.mask(x, y)) {
                continue;
            }
            bool hit = false;
            for (int oy = std::max(0, y - dilate_px); oy <= std::min(h - 1, y + dilate_px) && !hit; ++oy) {
                for (int ox = std::max(0, x - dilate_px); ox <= std::min(w - 1, x + dilate_px) && !hit; ++ox) {
                    hit = seam(ox, oy);
                }
            }
            out.set(x, y, hit);
        }
    }
    return out;
}

double sne(const NormalMap& est, const NormalMap& gt, const Mask& boundary)
{
    auto errors = angular_error_map(est, gt);
    if (!boundary.same_shape(errors.mask)) {
        throw StructuralError("boundary mask dimensions differ from the normal maps");
    }
    errors.mask = errors.mask.intersect(boundary);
    if (errors.mask.count() == 0) {
        throw EmptyInputError("boundary region is empty after intersecting with the valid masks (" +
                              std::to_string(boundary.count()) + " boundary pixels before)");
    }
    return mae_stats(errors).mean;
}

namespace {

// channels(i) returns the channel values at pixel i.
template <int C, typename Channels>
double mean_gradient(int w, int h, const Mask& mask, Channels&& channels)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (int y = 0; y + 1 < h; ++y) {
        for (int x = 0; x + 1 < w; ++x) {
            if (!mask(x, y) || !mask(x + 1, y) || !mask(x, y + 1)) {
                continue;
            }
            const auto c = channels(mask.index(x, y));
            const auto cr = channels(mask.index(x + 1, y));
            const auto cd = channels(mask.index(x, y + 1));
            for (int k = 0; k < C; ++k) {
                const double dx = cr[k] - c[k];
                const double dy = cd[k] - c[k];
                sum += std::sqrt(dx * dx + dy * dy);
            }
            n += C;
        }
    }
    if (n == 0) {
        throw EmptyInputError("total variation needs at least one pixel with masked-in right and lower neighbours");
    }
    return sum / static_cast<double>(n);
}

} // namespace

double tv(const ShadingFrame& frame)
{
    return mean_gradient<1>(frame.width, frame.height, frame.mask,
                            [&](std::size_t i) { return std::array<double, 1>{frame.values[i]}; });
}

double tv(const NormalMap& normals)
{
    return mean_gradient<3>(normals.width, normals.height, normals.mask, [&](std::size_t i) {
        const Vec3& n = normals.normals[i];
        return std::array<double, 3>{(n.x() + 1.0) * 0.5, (n.y() + 1.0) * 0.5, (n.z() + 1.0) * 0.5};
    });
}

double tv(const ShadingSequence& seq)
{
    if (seq.frames.empty()) {
        throw EmptyInputError("total variation of an empty sequence");
    }
    double sum = 0.0;
    for (const auto& f : seq.frames) {
        sum += tv(f);
    }
    return sum / static_cast<double>(seq.frames.size());
}

namespace {

Mask frame_pair_mask(const ShadingFrame& est, const ShadingFrame& gt)
{
    if (est.width != gt.width || est.height != gt.height) {
        throw StructuralError("shading frames differ in dimensions");
    }
    auto m = est.mask.intersect(gt.mask);
    if (m.count() == 0) {
        throw EmptyInputError("shading frames share no masked-in pixels");
    }
    return m;
}

} // namespace

double psnr(const ShadingFrame& est, const ShadingFrame& gt)
{
    const Mask m = frame_pair_mask(est, gt);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i]) {
            const double d = est.values[i] - gt.values[i];
            sum += d * d;
            ++n;
        }
    }
    const double mse = sum / static_cast<double>(n);
    if (mse < 1e-12) {
        return kPsnrCapDb;
    }
    return std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
}

std::array<double, 121> ssim_window()
{
    std::array<double, 121> w{};
    constexpr double sigma = 1.5;
    double sum = 0.0;
    for (int y = -5; y <= 5; ++y) {
        for (int x = -5; x <= 5; ++x) {
            const double v = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
            w[static_cast<std::size_t>((y + 5) * 11 + (x + 5))] = v;
            sum += v;
        }
    }
    for (double& v : w) {
        v /= sum;
    }
    return w;
}

double ssim(const ShadingFrame& est, const ShadingFrame& gt)
{
    const Mask m = frame_pair_mask(est, gt);
    constexpr double c1 = (0.01 * 1.0) * (0.01 * 1.0);
    constexpr double c2 = (0.03 * 1.0) * (0.03 * 1.0);
    const auto win = ssim_window();
    const int w = m.width;
    const int h = m.height;

    // Summed-area table of the mask for the "window fully inside" test.
    std::vector<int> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            sat[(y + 1) * (w + 1) + x + 1] = (m(x, y) ? 1 : 0) + sat[y * (w + 1) + x + 1] +
                                             sat[(y + 1) * (w + 1) + x] - sat[y * (w + 1) + x];
        }
    }

    double total = 0.0;
    std::size_t windows = 0;
    for (int cy = 5; cy + 5 < h; ++cy) {
        for (int cx = 5; cx + 5 < w; ++cx) {
            const int x0 = cx - 5, y0 = cy - 5, x1 = cx + 6, y1 = cy + 6;
            const int inside = sat[y1 * (w + 1) + x1] - sat[y0 * (w + 1) + x1] - sat[y1 * (w + 1) + x0] +
                               sat[y0 * (w + 1) + x0];
            if (inside != 121) {
                continue;
            }
            double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (int dy = 0; dy < 11; ++dy) {
                for (int dx = 0; dx < 11; ++dx) {
                    const double wt = win[static_cast<std::size_t>(dy * 11 + dx)];
                    const std::size_t i = m.index(x0 + dx, y0 + dy);
                    const double a = est.values[i];
                    const double b = gt.values[i];
                    mx += wt * a;
                    my += wt * b;
                    sxx += wt * a * a;
                    syy += wt * b * b;
                    sxy += wt * a * b;
                }
            }
            const double vx = sxx - mx * mx;
            const double vy = syy - my * my;
            const double cxy = sxy - mx * my;
            total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++windows;
        }
    }
    if (windows == 0) {
        throw EmptyInputError("no 11x11 SSIM window lies entirely inside the masks");
    }
    return total / static_cast<double>(windows);
}

} // namespace shadenorm
