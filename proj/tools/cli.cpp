// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <shadenorm/coverage.hpp>
#include <shadenorm/io.hpp>
#include <shadenorm/metrics.hpp>
#include <shadenorm/render.hpp>
#include <shadenorm/robustness.hpp>
#include <shadenorm/solver.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <ostream>

namespace shadenorm::cli {

namespace {

namespace fs = std::filesystem;

// Flag-level misuse detected after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path sibling_mask(const fs::path& image)
{
    return image.parent_path() / (image.stem().string() + "_mask.png");
}

fs::path sibling(const fs::path& image, const std::string& suffix)
{
    return image.parent_path() / (image.stem().string() + suffix);
}

void require_file(const fs::path& p, const char* what)
{
    if (!fs::exists(p)) {
        throw FormatError(std::string(what) + " not found: " + p.string());
    }
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

const CLI::Validator kOpenElevation(
    [](std::string& s) -> std::string {
        try {
            const double v = std::stod(s);
            return v > 0.0 && v < 90.0 ? std::string() : "elevation must lie strictly between 0 and 90 degrees";
        } catch (const std::exception&) {
            return "elevation must be a number";
        }
    },
    "(0,90)");

const CLI::Validator kPhase(
    [](std::string& s) -> std::string {
        try {
            const double v = std::stod(s);
            return v >= 0.0 && v < 360.0 ? std::string() : "phase must lie in [0, 360) degrees";
        } catch (const std::exception&) {
            return "phase must be a number";
        }
    },
    "[0,360)");

struct LightpathArgs {
    int count = 9;
    double elevation = 45.0;
    double phase = 0.0;
    std::string out;
};

struct FixtureArgs {
    int size = 256;
    std::string out;
    std::string mask;
};

struct RenderArgs {
    std::string normals, mask, lights, out;
    std::string format = "png";
    std::string encoding = "unsigned01";
};

struct SolveArgs {
    std::string shading, out;
    bool naive = false;
    double threshold = SolveOptions{}.positive_threshold;
};

struct CoverageArgs {
    std::string lights, out;
    int m = 3;
    double min_z = 1e-3;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 0;
};

struct EvalArgs {
    std::string est, est_mask, gt, gt_mask, lights, json;
    bool sne = false;
    bool tv = false;
    bool csv_row = false;
    double sne_thresh = 15.0;
    int sne_dilate = 1;
};

struct PerturbArgs {
    std::string normals, mask, lights, out, csv;
    std::vector<double> sigmas = RobustnessConfig{}.sigmas;
    std::vector<int> frames = RobustnessConfig{}.frame_counts;
    int runs = 5;
    std::uint64_t seed = 42;
};

struct ShadingEvalArgs {
    std::string est, gt, json;
};

int cmd_lightpath(const LightpathArgs& a, std::ostream& out, std::ostream& err)
{
    LightPath path;
    try {
        path = gen_ring(RingSpec{a.count, a.elevation, a.phase});
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
    io::write_lightpath(a.out, path);
    err << "wrote " << a.count << "-light ring at " << a.elevation << " deg elevation (phase " << a.phase
        << " deg), full rank: " << (path.full_rank() ? "yes" : "no") << "\n";
    out << a.out << "\n";
    return kExitOk;
}

int cmd_fixture(const FixtureArgs& a, std::ostream& out, std::ostream& err)
{
    NormalMap sphere;
    try {
        sphere = synth_sphere(a.size);
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
    const fs::path png = a.out;
    const fs::path mask = a.mask.empty() ? sibling_mask(png) : fs::path(a.mask);
    io::write_normal_map(png, mask, sphere);
    err << "sphere fixture " << a.size << "x" << a.size << ", " << sphere.mask.count() << " object pixels\n";
    out << png.string() << "\n" << mask.string() << "\n";
    return kExitOk;
}

int cmd_render(const RenderArgs& a, std::ostream& out, std::ostream& err)
{
    const fs::path png = a.normals;
    const fs::path mask = a.mask.empty() ? sibling_mask(png) : fs::path(a.mask);
    require_file(png, "normal map");
    require_file(mask, "mask");
    require_file(a.lights, "light path");
    const auto normals = io::read_normal_map(png, mask);
    const auto lights = io::read_lightpath(a.lights);
    const auto seq = render_shading(normals, lights);
    const auto format = a.format == "pfm" ? io::FrameFormat::kPfm : io::FrameFormat::kPng16;
    const auto encoding = a.encoding == "signed11" ? Encoding::kSigned11 : Encoding::kUnsigned01;
    io::write_sequence(a.out, seq, format, encoding);
    err << "rendered " << seq.size() << " frames (" << seq.width() << "x" << seq.height() << ", " << a.format << ", "
        << a.encoding << ")\n";
    out << (fs::path(a.out) / "manifest.json").string() << "\n";
    return kExitOk;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err)
{
    require_file(a.shading, "shading directory");
    const auto seq = io::read_sequence(a.shading);
    SolveResult result;
    try {
        result = a.naive ? solve_naive(seq) : solve_masked(seq, SolveOptions{a.threshold});
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
    const fs::path png = a.out;
    const auto mask = sibling_mask(png);
    const auto summary = sibling(png, "_status.json");
    io::write_normal_map(png, mask, result.normals);
    io::write_json(summary, io::solve_summary_json(result, a.naive, a.threshold));
    const auto& s = result.stats;
    err << (a.naive ? "naive" : "masked") << " solve: " << s.ok << " ok, " << s.underdetermined
        << " underdetermined, " << s.rank_deficient << " rank-deficient, " << s.degenerate_norm
        << " degenerate of " << s.masked_in() << " object pixels; mean residual " << fmt("%.3g", s.mean_residual)
        << "\n";
    out << png.string() << "\n" << mask.string() << "\n" << summary.string() << "\n";
    return kExitOk;
}

int cmd_coverage(const CoverageArgs& a, std::ostream& out, std::ostream& err)
{
    require_file(a.lights, "light path");
    const auto lights = io::read_lightpath(a.lights);
    CoverageOptions opts;
    opts.required = a.m;
    opts.min_z = a.min_z;
    opts.samples = a.samples;
    opts.seed = a.seed;
    CoverageReport report;
    try {
        report = verify_coverage(lights, opts);
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
    const auto text = io::dump(io::to_json(report));
    if (a.out.empty()) {
        out << text;
    } else {
        io::write_text(a.out, text);
        out << a.out << "\n";
    }
    const auto& w = report.worst_normal;
    err << lights.size() << " lights: minimum positive-shading count " << report.min_positive_count << " (need "
        << a.m << ") at normal (" << fmt("%.4f", w.x()) << ", " << fmt("%.4f", w.y()) << ", " << fmt("%.4f", w.z())
        << ") -> " << (report.meets_requirement ? "requirement met" : "requirement NOT met") << "\n";
    return report.meets_requirement ? kExitOk : kExitDomain;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err)
{
    const fs::path est_png = a.est;
    const fs::path gt_png = a.gt;
    const fs::path est_mask = a.est_mask.empty() ? sibling_mask(est_png) : fs::path(a.est_mask);
    const fs::path gt_mask = a.gt_mask.empty() ? sibling_mask(gt_png) : fs::path(a.gt_mask);
    for (const auto& [p, what] : {std::pair{est_png, "estimate"}, {est_mask, "estimate mask"}, {gt_png, "ground truth"},
                                  {gt_mask, "ground-truth mask"}}) {
        require_file(p, what);
    }
    const auto est = io::read_normal_map(est_png, est_mask);
    const auto gt = io::read_normal_map(gt_png, gt_mask);
    auto report = make_report(mae_stats(angular_error_map(est, gt)));
    if (a.sne) {
        report.sne_deg = sne(est, gt, extract_boundary(gt, a.sne_thresh, a.sne_dilate));
    }
    if (a.tv) {
        LightPath lights;
        if (a.lights.empty()) {
            lights = gen_ring(default_ring());
        } else {
            require_file(a.lights, "light path");
            lights = io::read_lightpath(a.lights);
        }
        report.tv = TvComparison{tv(gt), tv(render_shading(gt, lights))};
    }

    err << "MAE " << fmt("%.4f", report.mae_deg) << " deg, median " << fmt("%.4f", report.median_deg) << " deg over "
        << report.n_pixels << " pixels";
    if (report.sne_deg) {
        err << ", SNE " << fmt("%.4f", *report.sne_deg) << " deg";
    }
    if (report.tv) {
        err << ", TV shading/normal " << fmt("%.4f", report.tv->shading) << "/" << fmt("%.4f", report.tv->normal)
            << " (ratio " << fmt("%.3f", report.tv->ratio()) << ")";
    }
    err << "\n";

    if (!a.json.empty()) {
        io::write_json(a.json, io::to_json(report));
        out << a.json << "\n";
    }
    if (a.csv_row) {
        out << io::metrics_csv_row(report) << "\n";
    }
    if (a.json.empty() && !a.csv_row) {
        out << io::dump(io::to_json(report));
    }
    return kExitOk;
}

int cmd_perturb(const PerturbArgs& a, std::ostream& out, std::ostream& err)
{
    const fs::path png = a.normals;
    const fs::path mask = a.mask.empty() ? sibling_mask(png) : fs::path(a.mask);
    require_file(png, "normal map");
    require_file(mask, "mask");
    require_file(a.lights, "light path");
    const auto gt = io::read_normal_map(png, mask);
    const auto lights = io::read_lightpath(a.lights);
    RobustnessConfig cfg;
    cfg.sigmas = a.sigmas;
    cfg.frame_counts = a.frames;
    cfg.runs = a.runs;
    cfg.base_seed = a.seed;
    PerturbationReport report;
    try {
        report = run_robustness(gt, lights, cfg);
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
    const auto text = io::dump(io::to_json(report));
    if (a.out.empty()) {
        out << text;
    } else {
        io::write_text(a.out, text);
        out << a.out << "\n";
    }
    if (!a.csv.empty()) {
        io::write_text(a.csv, io::perturbation_csv(report));
        out << a.csv << "\n";
    }
    err << "clean MAE " << fmt("%.6f", report.clean_mae_deg) << " deg; delta MAE (deg) by sigma:\n"
        << io::perturbation_csv(report);
    return kExitOk;
}

int cmd_shading_eval(const ShadingEvalArgs& a, std::ostream& out, std::ostream& err)
{
    require_file(a.est, "estimated shading directory");
    require_file(a.gt, "ground-truth shading directory");
    const auto est = io::read_sequence(a.est);
    const auto gt = io::read_sequence(a.gt);
    if (est.size() != gt.size()) {
        throw StructuralError("shading sequences differ in length (" + std::to_string(est.size()) + " vs " +
                              std::to_string(gt.size()) + ")");
    }
    io::Json j;
    j["version"] = io::kSchemaVersion;
    io::Json frames = io::Json::array();
    double sum_psnr = 0.0;
    double sum_ssim = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        const double p = psnr(est.frames[i], gt.frames[i]);
        const double s = ssim(est.frames[i], gt.frames[i]);
        sum_psnr += p;
        sum_ssim += s;
        frames.push_back({{"index", i}, {"psnr_db", p}, {"ssim", s}});
    }
    const double n = static_cast<double>(est.size());
    j["frames"] = std::move(frames);
    j["mean_psnr_db"] = sum_psnr / n;
    j["mean_ssim"] = sum_ssim / n;
    err << est.size() << " frames: mean PSNR " << fmt("%.3f", sum_psnr / n) << " dB, mean SSIM "
        << fmt("%.4f", sum_ssim / n) << "\n";
    if (a.json.empty()) {
        out << io::dump(j);
    } else {
        io::write_json(a.json, j);
        out << a.json << "\n";
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Shading-sequence normal estimation toolkit: light paths, rendering, least-squares recovery, "
                 "coverage checks and evaluation"};
    app.name("shadenorm");
    app.require_subcommand(1);
    std::function<int()> action;

    // lightpath gen
    LightpathArgs lp;
    auto* lightpath = app.add_subcommand("lightpath", "Light path utilities");
    lightpath->require_subcommand(1);
    auto* gen = lightpath->add_subcommand("gen", "Generate a ring of parallel lights");
    gen->add_option("--count", lp.count, "Number of lights on the ring (default 9 lights)")
        ->capture_default_str()
        ->check(CLI::Range(1, 100000));
    gen->add_option("--elevation-deg", lp.elevation, "Ring elevation in degrees, in (0, 90) (default 45)")
        ->capture_default_str()
        ->check(kOpenElevation);
    gen->add_option("--phase-deg", lp.phase, "Azimuth of the first light in degrees, in [0, 360)")
        ->capture_default_str()
        ->check(kPhase);
    gen->add_option("-o,--output", lp.out, "Output light path JSON")->required();
    gen->callback([&] { action = [&] { return cmd_lightpath(lp, out, err); }; });

    // fixture sphere
    FixtureArgs fx;
    auto* fixture = app.add_subcommand("fixture", "Synthetic test fixtures");
    fixture->require_subcommand(1);
    auto* sphere = fixture->add_subcommand("sphere", "Orthographic unit sphere normal map (radius 0.45 * size)");
    sphere->add_option("--size", fx.size, "Image width and height in pixels (>= 4)")
        ->capture_default_str()
        ->check(CLI::Range(4, 1 << 15));
    sphere->add_option("-o,--output", fx.out, "Output 16-bit normal map PNG")->required();
    sphere->add_option("--mask", fx.mask, "Output mask PNG (default <output stem>_mask.png)");
    sphere->callback([&] { action = [&] { return cmd_fixture(fx, out, err); }; });

    // render
    RenderArgs ra;
    auto* render = app.add_subcommand("render", "Render a shading sequence from a normal map and a light path");
    render->add_option("--normals", ra.normals, "Normal map PNG")->required();
    render->add_option("--mask", ra.mask, "Mask PNG (default <normals stem>_mask.png)");
    render->add_option("--lights", ra.lights, "Light path JSON")->required();
    render->add_option("-o,--output", ra.out, "Output shading directory")->required();
    render->add_option("--format", ra.format, "Frame format")->capture_default_str()->check(CLI::IsMember({"png", "pfm"}));
    render->add_option("--encoding", ra.encoding, "Stored value encoding")
        ->capture_default_str()
        ->check(CLI::IsMember({"unsigned01", "signed11"}));
    render->callback([&] { action = [&] { return cmd_render(ra, out, err); }; });

    // solve
    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Recover normals from a shading directory by least squares");
    solve->add_option("--shading", sa.shading, "Shading directory (with manifest.json)")->required();
    solve->add_option("-o,--output", sa.out, "Output normal map PNG; mask and status JSON are written beside it")
        ->required();
    solve->add_flag("--naive", sa.naive, "Use every frame, clamped zeros included (biased)");
    solve->add_option("--threshold", sa.threshold, "Shadings above this value are valid equations")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    solve->callback([&] { action = [&] { return cmd_solve(sa, out, err); }; });

    // coverage
    CoverageArgs ca;
    auto* coverage = app.add_subcommand("coverage", "Check that every camera-facing normal sees enough lights; "
                                                    "exits 1 when the requirement is unmet");
    coverage->add_option("--lights", ca.lights, "Light path JSON")->required();
    coverage->add_option("--m", ca.m, "Required number of strictly positive shadings")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    coverage->add_option("--min-z", ca.min_z, "Only normals with z > min-z are checked")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 0.999999));
    coverage->add_option("--samples", ca.samples, "Monte Carlo samples (0 = grid only)")->capture_default_str();
    coverage->add_option("--seed", ca.seed, "Monte Carlo seed")->capture_default_str();
    coverage->add_option("-o,--output", ca.out, "Report JSON (default: stdout)");
    coverage->callback([&] { action = [&] { return cmd_coverage(ca, out, err); }; });

    // eval
    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "Angular-error metrics between two normal maps");
    eval->add_option("--est", ea.est, "Estimated normal map PNG")->required();
    eval->add_option("--est-mask", ea.est_mask, "Estimate mask (default <est stem>_mask.png)");
    eval->add_option("--gt", ea.gt, "Ground-truth normal map PNG")->required();
    eval->add_option("--gt-mask", ea.gt_mask, "Ground-truth mask (default <gt stem>_mask.png)");
    eval->add_flag("--sne", ea.sne, "Also report the boundary-region error");
    eval->add_option("--sne-thresh", ea.sne_thresh, "Boundary angular jump threshold in degrees")->capture_default_str();
    eval->add_option("--sne-dilate", ea.sne_dilate, "Boundary dilation radius in pixels")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    eval->add_flag("--tv", ea.tv, "Report total variation of the ground truth as normals and as shadings");
    eval->add_option("--lights", ea.lights, "Light path for --tv (default: 9 lights at 45 deg)");
    eval->add_option("--json", ea.json, "Write the report JSON here instead of stdout");
    eval->add_flag("--csv-row", ea.csv_row, "Print one CSV row of the report");
    eval->callback([&] { action = [&] { return cmd_eval(ea, out, err); }; });

    // perturb
    PerturbArgs pa;
    auto* perturb = app.add_subcommand("perturb", "Noise-robustness study: perturb shadings or normals and re-solve");
    perturb->add_option("--normals", pa.normals, "Ground-truth normal map PNG")->required();
    perturb->add_option("--mask", pa.mask, "Mask PNG (default <normals stem>_mask.png)");
    perturb->add_option("--lights", pa.lights, "Light path JSON")->required();
    perturb->add_option("--sigmas", pa.sigmas, "Noise standard deviations (default 0.05,0.1,0.2,0.3,0.4)")
        ->delimiter(',')
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    perturb->add_option("--frames", pa.frames, "Perturbed frame counts; k perturbs frames 0..k-1 (default 1,9)")
        ->delimiter(',')
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    perturb->add_option("--runs", pa.runs, "Runs per configuration (default 5)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    perturb->add_option("--seed", pa.seed, "Base seed; run r uses seed + r")->capture_default_str();
    perturb->add_option("-o,--output", pa.out, "Report JSON (default: stdout)");
    perturb->add_option("--csv", pa.csv, "Also write the target x sigma table as CSV");
    perturb->callback([&] { action = [&] { return cmd_perturb(pa, out, err); }; });

    // shading-eval
    ShadingEvalArgs se;
    auto* shading_eval = app.add_subcommand("shading-eval", "Per-frame PSNR and SSIM between two shading directories");
    shading_eval->add_option("--est", se.est, "Estimated shading directory")->required();
    shading_eval->add_option("--gt", se.gt, "Ground-truth shading directory")->required();
    shading_eval->add_option("--json", se.json, "Write the report JSON here instead of stdout");
    shading_eval->callback([&] { action = [&] { return cmd_shading_eval(se, out, err); }; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (!action) {
        err << app.help();
        return kExitUsage;
    }
    try {
        return action();
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

} // namespace shadenorm::cli
