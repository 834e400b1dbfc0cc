// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#include <shadenorm/io.hpp>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

namespace shadenorm::io {

namespace {

Json vec_json(const Vec3& v)
{
    return Json::array({v.x(), v.y(), v.z()});
}

Vec3 vec_from(const Json& j, const char* what)
{
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
        throw FormatError(std::string(what) + ": expected an array of three numbers");
    }
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

void check_version(const Json& j, const char* what)
{
    if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != kSchemaVersion) {
        throw FormatError(std::string(what) + ": unsupported or missing schema version (expected " +
                          std::to_string(kSchemaVersion) + ")");
    }
}

template <typename T>
T get_as(const Json& j, const char* key, const char* what)
{
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string(what) + ": bad field '" + key + "': " + e.what());
    }
}

std::string format_fixed(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string format_short(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

void require_keys(const Json& j, std::initializer_list<const char*> allowed, std::initializer_list<const char*> required,
                  const char* what)
{
    if (!j.is_object()) {
        throw FormatError(std::string(what) + ": expected a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw FormatError(std::string(what) + " (schema v" + std::to_string(kSchemaVersion) + "): unknown key '" +
                              key + "'");
        }
    }
    for (const char* r : required) {
        if (!j.contains(r)) {
            throw FormatError(std::string(what) + " (schema v" + std::to_string(kSchemaVersion) +
                              "): missing key '" + r + "'");
        }
    }
}

std::string dump(const Json& j)
{
    return j.dump(2) + "\n";
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw FormatError("writing " + path.string() + " failed");
    }
}

void write_json(const fs::path& path, const Json& j)
{
    write_text(path, dump(j));
}

Json read_json(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

// Light paths

Json to_json(const LightPath& lights)
{
    Json j;
    j["version"] = kSchemaVersion;
    Json dirs = Json::array();
    for (const auto& d : lights.directions()) {
        dirs.push_back(vec_json(d.vec()));
    }
    j["directions"] = std::move(dirs);
    if (const auto& ring = lights.ring()) {
        j["provenance"] = {{"type", "ring"},
                           {"count", ring->count},
                           {"elevation_deg", ring->elevation_deg},
                           {"phase_deg", ring->phase_deg}};
    } else {
        j["provenance"] = {{"type", "custom"}};
    }
    return j;
}

LightPath lightpath_from_json(const Json& j)
{
    constexpr const char* what = "light path";
    require_keys(j, {"version", "directions", "provenance"}, {"version", "directions"}, what);
    check_version(j, what);
    const auto& dirs = j["directions"];
    if (!dirs.is_array() || dirs.empty()) {
        throw FormatError("light path: 'directions' must be a nonempty array");
    }
    std::vector<UnitVec3> out;
    try {
        for (const auto& d : dirs) {
            out.push_back(UnitVec3::from_unit(vec_from(d, what)));
        }
    } catch (const DomainError& e) {
        throw FormatError(std::string("light path: ") + e.what());
    }
    std::optional<RingSpec> ring;
    if (j.contains("provenance")) {
        const auto& p = j["provenance"];
        require_keys(p, {"type", "count", "elevation_deg", "phase_deg"}, {"type"}, "light path provenance");
        const auto type = get_as<std::string>(p, "type", what);
        if (type == "ring") {
            require_keys(p, {"type", "count", "elevation_deg", "phase_deg"},
                         {"type", "count", "elevation_deg", "phase_deg"}, "light path provenance");
            ring = RingSpec{get_as<int>(p, "count", what), get_as<double>(p, "elevation_deg", what),
                            get_as<double>(p, "phase_deg", what)};
            if (ring->count != static_cast<int>(out.size())) {
                throw FormatError("light path: ring count disagrees with the number of directions");
            }
        } else if (type != "custom") {
            throw FormatError("light path: unknown provenance type '" + type + "'");
        }
    }
    try {
        return LightPath(std::move(out), ring);
    } catch (const Error& e) {
        throw FormatError(std::string("light path: ") + e.what());
    }
}

void write_lightpath(const fs::path& path, const LightPath& lights)
{
    write_json(path, to_json(lights));
}

LightPath read_lightpath(const fs::path& path)
{
    return lightpath_from_json(read_json(path));
}

// Metrics

Json to_json(const MetricsReport& r)
{
    Json j;
    j["version"] = kSchemaVersion;
    j["mae_deg"] = r.mae_deg;
    j["median_deg"] = r.median_deg;
    Json pct;
    for (std::size_t t = 0; t < kErrorThresholdNames.size(); ++t) {
        pct[std::string(kErrorThresholdNames[t])] = r.pct_below[t];
    }
    j["pct_below"] = std::move(pct);
    j["n_pixels"] = r.n_pixels;
    if (r.sne_deg) {
        j["sne_deg"] = *r.sne_deg;
    }
    if (r.tv) {
        j["tv"] = {{"normal", r.tv->normal}, {"shading", r.tv->shading}, {"shading_over_normal", r.tv->ratio()}};
    }
    if (r.psnr_db) {
        j["psnr_db"] = *r.psnr_db;
    }
    if (r.ssim) {
        j["ssim"] = *r.ssim;
    }
    return j;
}

MetricsReport metrics_from_json(const Json& j)
{
    constexpr const char* what = "metrics report";
    require_keys(j, {"version", "mae_deg", "median_deg", "pct_below", "n_pixels", "sne_deg", "tv", "psnr_db", "ssim"},
                 {"version", "mae_deg", "median_deg", "pct_below", "n_pixels"}, what);
    check_version(j, what);
    MetricsReport r;
    r.mae_deg = get_as<double>(j, "mae_deg", what);
    r.median_deg = get_as<double>(j, "median_deg", what);
    r.n_pixels = get_as<std::size_t>(j, "n_pixels", what);
    const auto& pct = j["pct_below"];
    require_keys(pct, {"3", "5", "7.5", "11.25", "22.5", "30"}, {"3", "5", "7.5", "11.25", "22.5", "30"},
                 "metrics pct_below");
    for (std::size_t t = 0; t < kErrorThresholdNames.size(); ++t) {
        r.pct_below[t] = get_as<double>(pct, std::string(kErrorThresholdNames[t]).c_str(), what);
    }
    if (j.contains("sne_deg")) {
        r.sne_deg = get_as<double>(j, "sne_deg", what);
    }
    if (j.contains("tv")) {
        const auto& tv = j["tv"];
        require_keys(tv, {"normal", "shading", "shading_over_normal"}, {"normal", "shading"}, "metrics tv");
        r.tv = TvComparison{get_as<double>(tv, "normal", what), get_as<double>(tv, "shading", what)};
    }
    if (j.contains("psnr_db")) {
        r.psnr_db = get_as<double>(j, "psnr_db", what);
    }
    if (j.contains("ssim")) {
        r.ssim = get_as<double>(j, "ssim", what);
    }
    return r;
}

std::string metrics_csv_header()
{
    std::string h = "mae_deg,median_deg";
    for (auto name : kErrorThresholdNames) {
        h += ",pct_below_";
        h += name;
    }
    h += ",n_pixels,sne_deg,tv_normal,tv_shading,psnr_db,ssim";
    return h;
}

std::string metrics_csv_row(const MetricsReport& r)
{
    auto opt = [](const std::optional<double>& v) { return v ? format_fixed(*v) : std::string(); };
    std::string row = format_fixed(r.mae_deg) + "," + format_fixed(r.median_deg);
    for (double p : r.pct_below) {
        row += "," + format_fixed(p);
    }
    row += "," + std::to_string(r.n_pixels);
    row += "," + opt(r.sne_deg);
    row += "," + (r.tv ? format_fixed(r.tv->normal) : std::string());
    row += "," + (r.tv ? format_fixed(r.tv->shading) : std::string());
    row += "," + opt(r.psnr_db);
    row += "," + opt(r.ssim);
    return row;
}

// Coverage

namespace {

Json pass_json(const CoveragePass& p, const char* mode, double min_z)
{
    Json j;
    j["mode"] = mode;
    j["n"] = p.evaluated;
    j["min_z"] = min_z;
    j["min_positive_count"] = p.min_positive_count;
    j["histogram"] = p.histogram;
    j["worst_normal"] = vec_json(p.worst_normal.vec());
    j["fraction_meeting"] = p.fraction_meeting;
    return j;
}

CoveragePass pass_from(const Json& j)
{
    constexpr const char* what = "coverage pass";
    require_keys(j, {"mode", "n", "min_z", "seed", "min_positive_count", "histogram", "worst_normal", "fraction_meeting"},
                 {"mode", "n", "min_z", "min_positive_count", "histogram", "worst_normal", "fraction_meeting"}, what);
    CoveragePass p;
    p.evaluated = get_as<std::size_t>(j, "n", what);
    p.min_positive_count = get_as<int>(j, "min_positive_count", what);
    p.histogram = get_as<std::vector<std::size_t>>(j, "histogram", what);
    p.worst_normal = UnitVec3::normalize(vec_from(j["worst_normal"], what));
    p.fraction_meeting = get_as<double>(j, "fraction_meeting", what);
    return p;
}

} // namespace

Json to_json(const CoverageReport& r)
{
    Json j;
    j["version"] = kSchemaVersion;
    j["light_count"] = r.light_count;
    j["required"] = r.required;
    j["min_z"] = r.min_z;
    j["min_positive_count"] = r.min_positive_count;
    j["meets_requirement"] = r.meets_requirement;
    j["worst_normal"] = vec_json(r.worst_normal.vec());
    Json passes = Json::array();
    passes.push_back(pass_json(r.grid, "grid", r.min_z));
    if (r.monte_carlo) {
        Json mc = pass_json(*r.monte_carlo, "monte_carlo", r.min_z);
        mc["seed"] = r.seed;
        passes.push_back(std::move(mc));
    }
    j["sampling"] = std::move(passes);
    return j;
}

CoverageReport coverage_from_json(const Json& j)
{
    constexpr const char* what = "coverage report";
    require_keys(j, {"version", "light_count", "required", "min_z", "min_positive_count", "meets_requirement",
                     "worst_normal", "sampling"},
                 {"version", "light_count", "required", "min_z", "min_positive_count", "meets_requirement",
                  "worst_normal", "sampling"},
                 what);
    check_version(j, what);
    CoverageReport r;
    r.light_count = get_as<int>(j, "light_count", what);
    r.required = get_as<int>(j, "required", what);
    r.min_z = get_as<double>(j, "min_z", what);
    r.min_positive_count = get_as<int>(j, "min_positive_count", what);
    r.meets_requirement = get_as<bool>(j, "meets_requirement", what);
    r.worst_normal = UnitVec3::normalize(vec_from(j["worst_normal"], what));
    const auto& passes = j["sampling"];
    if (!passes.is_array() || passes.empty()) {
        throw FormatError("coverage report: 'sampling' must list at least the grid pass");
    }
    for (const auto& p : passes) {
        const auto mode = get_as<std::string>(p, "mode", what);
        if (mode == "grid") {
            r.grid = pass_from(p);
        } else if (mode == "monte_carlo") {
            r.monte_carlo = pass_from(p);
            r.seed = get_as<std::uint64_t>(p, "seed", what);
        } else {
            throw FormatError("coverage report: unknown sampling mode '" + mode + "'");
        }
    }
    return r;
}

// Perturbation

Json to_json(const PerturbationReport& r)
{
    Json j;
    j["version"] = kSchemaVersion;
    j["clean_mae_deg"] = r.clean_mae_deg;
    j["noise_handling"] = r.noise_handling;
    j["runs"] = r.runs;
    j["base_seed"] = r.base_seed;
    j["sigmas"] = r.sigmas;
    j["frame_counts"] = r.frame_counts;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json jr;
        jr["target"] = row.target == PerturbTarget::kShading ? "shading" : "normal";
        if (row.target == PerturbTarget::kShading) {
            jr["frames"] = row.frames;
        }
        jr["sigma"] = row.sigma;
        jr["delta_mae_deg"] = row.delta_mae_deg;
        jr["std_dev_deg"] = row.std_dev_deg;
        jr["runs"] = row.runs;
        jr["seeds"] = row.seeds;
        jr["run_deltas"] = row.run_deltas;
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    return j;
}

PerturbationReport perturbation_from_json(const Json& j)
{
    constexpr const char* what = "perturbation report";
    require_keys(j, {"version", "clean_mae_deg", "noise_handling", "runs", "base_seed", "sigmas", "frame_counts", "rows"},
                 {"version", "clean_mae_deg", "runs", "base_seed", "sigmas", "frame_counts", "rows"}, what);
    check_version(j, what);
    PerturbationReport r;
    r.clean_mae_deg = get_as<double>(j, "clean_mae_deg", what);
    if (j.contains("noise_handling")) {
        r.noise_handling = get_as<std::string>(j, "noise_handling", what);
    }
    r.runs = get_as<int>(j, "runs", what);
    r.base_seed = get_as<std::uint64_t>(j, "base_seed", what);
    r.sigmas = get_as<std::vector<double>>(j, "sigmas", what);
    r.frame_counts = get_as<std::vector<int>>(j, "frame_counts", what);
    for (const auto& jr : j.at("rows")) {
        require_keys(jr, {"target", "frames", "sigma", "delta_mae_deg", "std_dev_deg", "runs", "seeds", "run_deltas"},
                     {"target", "sigma", "delta_mae_deg", "std_dev_deg", "runs", "seeds"}, "perturbation row");
        PerturbationRow row;
        const auto target = get_as<std::string>(jr, "target", what);
        if (target == "shading") {
            row.target = PerturbTarget::kShading;
            row.frames = get_as<int>(jr, "frames", what);
        } else if (target == "normal") {
            row.target = PerturbTarget::kNormal;
        } else {
            throw FormatError("perturbation report: unknown target '" + target + "'");
        }
        row.sigma = get_as<double>(jr, "sigma", what);
        row.delta_mae_deg = get_as<double>(jr, "delta_mae_deg", what);
        row.std_dev_deg = get_as<double>(jr, "std_dev_deg", what);
        row.runs = get_as<int>(jr, "runs", what);
        row.seeds = get_as<std::vector<std::uint64_t>>(jr, "seeds", what);
        if (jr.contains("run_deltas")) {
            row.run_deltas = get_as<std::vector<double>>(jr, "run_deltas", what);
        }
        r.rows.push_back(std::move(row));
    }
    return r;
}

std::string perturbation_csv(const PerturbationReport& r)
{
    std::string out = "target";
    for (double s : r.sigmas) {
        out += "," + format_short(s);
    }
    out += "\n";
    auto emit = [&](const std::string& label, PerturbTarget target, int frames) {
        std::string line = label;
        bool any = false;
        for (double s : r.sigmas) {
            std::string cell;
            for (const auto& row : r.rows) {
                if (row.target == target && row.sigma == s && (target == PerturbTarget::kNormal || row.frames == frames)) {
                    cell = format_fixed(row.delta_mae_deg);
                    any = true;
                }
            }
            line += "," + cell;
        }
        if (any) {
            out += line + "\n";
        }
    };
    for (int k : r.frame_counts) {
        emit("shading_" + std::to_string(k), PerturbTarget::kShading, k);
    }
    emit("normal", PerturbTarget::kNormal, 0);
    return out;
}

Json solve_summary_json(const SolveResult& result, bool naive, double threshold)
{
    Json j;
    j["version"] = kSchemaVersion;
    j["mode"] = naive ? "naive" : "masked";
    if (!naive) {
        j["positive_threshold"] = threshold;
    }
    const auto& s = result.stats;
    j["masked_in"] = s.masked_in();
    j["counts"] = {{"ok", s.ok},
                   {"underdetermined", s.underdetermined},
                   {"rank_deficient", s.rank_deficient},
                   {"degenerate_norm", s.degenerate_norm}};
    j["mean_residual"] = s.mean_residual;
    j["rms_residual"] = s.rms_residual;
    return j;
}

} // namespace shadenorm::io
