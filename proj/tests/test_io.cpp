// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#include <shadenorm/io.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

namespace shadenorm {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("shadenorm_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

NormalMap random_map(std::mt19937_64& rng, int w, int h)
{
    std::normal_distribution<double> g;
    NormalMap nm(w, h);
    for (std::size_t i = 0; i < nm.normals.size(); ++i) {
        if (uniform01(rng) < 0.25) {
            continue;
        }
        nm.set(i, UnitVec3::normalize(Vec3(g(rng), g(rng), std::abs(g(rng)) + 1e-3)));
    }
    return nm;
}

TEST(NormalCodec, ComponentEncoding)
{
    EXPECT_EQ(io::encode_normal_component(0.0), 32768);
    EXPECT_EQ(io::encode_normal_component(1.0), 65535);
    EXPECT_EQ(io::encode_normal_component(-1.0), 0);
    EXPECT_NEAR(io::decode_normal_component(32768), 0.0, 1.0 / 65535.0);
}

TEST_F(IoTest, ApexPixelValue)
{
    NormalMap nm(2, 1);
    nm.set(0, UnitVec3{});
    io::write_normal_map(dir_ / "n.png", dir_ / "m.png", nm);
    const auto png = io::read_png(dir_ / "n.png");
    EXPECT_EQ(png.channels, 3);
    EXPECT_EQ(png.bit_depth, 16);
    EXPECT_EQ(png.samples[0], 32768);
    EXPECT_EQ(png.samples[1], 32768);
    EXPECT_EQ(png.samples[2], 65535);
    // Background written as mid-gray.
    EXPECT_EQ(png.samples[3], 32768);
    EXPECT_EQ(png.samples[5], 32768);
    const auto mask = io::read_png(dir_ / "m.png");
    EXPECT_EQ(mask.bit_depth, 8);
    EXPECT_EQ(mask.samples[0], 255);
    EXPECT_EQ(mask.samples[1], 0);
}

TEST_F(IoTest, NormalMapRoundTrips)
{
    auto rng = make_stream(41, 0);
    for (int t = 0; t < 100; ++t) {
        const auto nm = random_map(rng, 3 + static_cast<int>(rng() % 17), 3 + static_cast<int>(rng() % 17));
        io::write_normal_map(dir_ / "n.png", dir_ / "m.png", nm);
        const auto back = io::read_normal_map(dir_ / "n.png", dir_ / "m.png");
        ASSERT_EQ(back.mask, nm.mask);
        const auto raw = io::read_png(dir_ / "n.png");
        for (std::size_t i = 0; i < nm.normals.size(); ++i) {
            if (!nm.mask[i]) {
                ASSERT_EQ(back.normals[i], Vec3::Zero());
                continue;
            }
            for (int c = 0; c < 3; ++c) {
                const double before = io::decode_normal_component(raw.samples[3 * i + c]);
                ASSERT_LE(std::abs(before - nm.normals[i][c]), 1.0 / 65535.0);
                ASSERT_LT(std::abs(back.normals[i][c] - nm.normals[i][c]), 3e-5);
            }
            ASSERT_NEAR(back.normals[i].norm(), 1.0, 1e-12);
        }
    }
}

TEST_F(IoTest, MaskRoundTripBitwise)
{
    auto rng = make_stream(42, 0);
    Mask m(31, 7);
    for (auto& v : m.valid) {
        v = uniform01(rng) < 0.5 ? 1 : 0;
    }
    io::write_mask(dir_ / "m.png", m);
    EXPECT_EQ(io::read_mask(dir_ / "m.png"), m);
}

TEST_F(IoTest, NormalMapMaskDimensionMismatch)
{
    const auto s = synth_sphere(8);
    io::write_normal_map(dir_ / "n.png", dir_ / "m.png", s);
    io::write_mask(dir_ / "other.png", Mask(9, 8, true));
    EXPECT_THROW(io::read_normal_map(dir_ / "n.png", dir_ / "other.png"), FormatError);
}

TEST_F(IoTest, MalformedFilesRejected)
{
    io::write_text(dir_ / "junk.png", "not a png at all");
    EXPECT_THROW(io::read_png(dir_ / "junk.png"), FormatError);
    EXPECT_THROW(io::read_png(dir_ / "missing.png"), FormatError);
    io::write_text(dir_ / "junk.pfm", "PF\n2 2\n-1.0\n");
    EXPECT_THROW(io::read_pfm(dir_ / "junk.pfm"), FormatError);
    io::write_text(dir_ / "short.pfm", "Pf\n2 2\n-1.0\nab");
    EXPECT_THROW(io::read_pfm(dir_ / "short.pfm"), FormatError);
}

TEST_F(IoTest, PfmLayout)
{
    io::FloatImage img{2, 2, {0.25f, 0.5f, 0.75f, 1.0f}};
    io::write_pfm(dir_ / "a.pfm", img);
    const auto bytes = slurp(dir_ / "a.pfm");
    const std::string header = "Pf\n2 2\n-1.0\n";
    ASSERT_EQ(bytes.substr(0, header.size()), header);
    ASSERT_EQ(bytes.size(), header.size() + 16);
    // Bottom row first, little-endian.
    float first = 0.0f;
    std::memcpy(&first, bytes.data() + header.size(), 4);
    EXPECT_EQ(first, 0.75f);
    const auto back = io::read_pfm(dir_ / "a.pfm");
    EXPECT_EQ(back.values, img.values);
}

TEST_F(IoTest, PfmBigEndianRead)
{
    std::string bytes = "Pf\n1 1\n1.0\n";
    const float v = 0.3f;
    unsigned char raw[4];
    std::memcpy(raw, &v, 4);
    for (int k = 3; k >= 0; --k) {
        bytes.push_back(static_cast<char>(raw[k]));
    }
    io::write_text(dir_ / "be.pfm", bytes);
    EXPECT_EQ(io::read_pfm(dir_ / "be.pfm").values[0], 0.3f);
}

TEST_F(IoTest, SequenceRoundTrips)
{
    auto rng = make_stream(43, 0);
    for (int t = 0; t < 100; ++t) {
        const auto nm = random_map(rng, 4 + static_cast<int>(rng() % 12), 4 + static_cast<int>(rng() % 12));
        const auto seq = render_shading(nm, gen_ring({3 + static_cast<int>(rng() % 7), 45.0, 0.0}));
        io::write_sequence(dir_ / "png", seq, io::FrameFormat::kPng16, Encoding::kUnsigned01);
        io::write_sequence(dir_ / "spng", seq, io::FrameFormat::kPng16, Encoding::kSigned11);
        io::write_sequence(dir_ / "pfm", seq, io::FrameFormat::kPfm, Encoding::kUnsigned01);
        const auto png = io::read_sequence(dir_ / "png");
        const auto spng = io::read_sequence(dir_ / "spng");
        const auto pfm = io::read_sequence(dir_ / "pfm");
        ASSERT_EQ(png.size(), seq.size());
        ASSERT_EQ(png.mask(), seq.mask());
        for (std::size_t k = 0; k < seq.size(); ++k) {
            ASSERT_EQ(png.lights[k].vec(), seq.lights[k].vec());
            for (std::size_t i = 0; i < seq.frames[k].values.size(); ++i) {
                const double v = seq.frames[k].values[i];
                ASSERT_LE(std::abs(png.frames[k].values[i] - v), 1.0 / 65535.0);
                ASSERT_LE(std::abs(spng.frames[k].values[i] - png.frames[k].values[i]), 2.0 / 65535.0);
                ASSERT_EQ(pfm.frames[k].values[i], static_cast<double>(static_cast<float>(v)));
            }
        }
    }
}

TEST_F(IoTest, ManifestContents)
{
    const auto seq = render_shading(synth_sphere(8), gen_ring({3, 45.0, 0.0}));
    io::write_sequence(dir_ / "s", seq, io::FrameFormat::kPfm, Encoding::kSigned11);
    const auto j = io::read_json(dir_ / "s" / "manifest.json");
    EXPECT_EQ(j["version"], 1);
    EXPECT_EQ(j["encoding"], "signed11");
    EXPECT_EQ(j["mask"], "mask.png");
    EXPECT_EQ(j["frames"].size(), 3u);
    EXPECT_EQ(j["lights"].size(), 3u);
    EXPECT_EQ(j["dims"], io::Json::array({8, 8}));
    const auto m = io::manifest_from_json(j);
    EXPECT_EQ(m.encoding, Encoding::kSigned11);
    EXPECT_EQ(m.frames[0], "frame_000.pfm");
}

TEST_F(IoTest, ManifestErrors)
{
    const auto seq = render_shading(synth_sphere(8), gen_ring({3, 45.0, 0.0}));
    io::write_sequence(dir_ / "s", seq);
    auto j = io::read_json(dir_ / "s" / "manifest.json");

    auto bad = j;
    bad["encoding"] = "log";
    EXPECT_THROW(io::manifest_from_json(bad), FormatError);
    bad = j;
    bad["frames"].erase(2);
    io::write_json(dir_ / "s" / "manifest.json", bad);
    EXPECT_THROW(io::read_sequence(dir_ / "s"), FormatError);
    bad = j;
    bad["extra"] = 1;
    EXPECT_THROW(io::manifest_from_json(bad), FormatError);
    io::write_json(dir_ / "s" / "manifest.json", j);
    fs::remove(dir_ / "s" / "frame_001.png");
    EXPECT_THROW(io::read_sequence(dir_ / "s"), FormatError);
}

TEST_F(IoTest, FilesByteIdenticalAcrossWrites)
{
    const auto seq = render_shading(synth_sphere(24), gen_ring(default_ring()));
    io::write_sequence(dir_ / "a", seq);
    io::write_sequence(dir_ / "b", seq);
    for (const auto& e : fs::directory_iterator(dir_ / "a")) {
        EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / e.path().filename()));
    }
}

TEST(LightPathJson, RingProvenance)
{
    const auto j = io::to_json(gen_ring(default_ring()));
    EXPECT_EQ(j["version"], 1);
    EXPECT_EQ(j["provenance"]["type"], "ring");
    EXPECT_EQ(j["provenance"]["count"], 9);
    EXPECT_EQ(j["provenance"]["elevation_deg"], 45.0);
    EXPECT_EQ(j["provenance"]["phase_deg"], 0.0);
    EXPECT_EQ(j["directions"].size(), 9u);
    EXPECT_NE(io::dump(j).find("\"elevation_deg\": 45.0"), std::string::npos);
}

TEST_F(IoTest, LightPathRoundTripExact)
{
    auto rng = make_stream(44, 0);
    std::normal_distribution<double> g;
    std::vector<UnitVec3> dirs;
    for (int i = 0; i < 12; ++i) {
        dirs.push_back(UnitVec3::normalize(Vec3(g(rng), g(rng), std::abs(g(rng)) + 0.01)));
    }
    const LightPath custom(dirs);
    io::write_lightpath(dir_ / "l.json", custom);
    const auto back = io::read_lightpath(dir_ / "l.json");
    ASSERT_EQ(back.size(), custom.size());
    for (std::size_t i = 0; i < custom.size(); ++i) {
        EXPECT_EQ(back[i].vec(), custom[i].vec());
    }
    EXPECT_FALSE(back.ring().has_value());
    const auto ring = io::lightpath_from_json(io::to_json(gen_ring({7, 30.0, 15.0})));
    EXPECT_EQ(*ring.ring(), (RingSpec{7, 30.0, 15.0}));
}

TEST(LightPathJson, SchemaViolations)
{
    auto j = io::to_json(gen_ring({3, 45.0, 0.0}));
    auto bad = j;
    bad["color"] = "red";
    EXPECT_THROW(io::lightpath_from_json(bad), FormatError);
    try {
        io::lightpath_from_json(bad);
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("v1"), std::string::npos);
    }
    bad = j;
    bad["version"] = 2;
    EXPECT_THROW(io::lightpath_from_json(bad), FormatError);
    bad = j;
    bad["provenance"]["count"] = 4;
    EXPECT_THROW(io::lightpath_from_json(bad), FormatError);
    bad = j;
    bad["directions"][0] = io::Json::array({1.0, 0.0, -1.0});
    EXPECT_THROW(io::lightpath_from_json(bad), Error);
    bad = j;
    bad.erase("directions");
    EXPECT_THROW(io::lightpath_from_json(bad), FormatError);
}

TEST(MetricsJson, KeysAndRoundTrip)
{
    MetricsReport r;
    r.mae_deg = 1.5;
    r.median_deg = 1.25;
    r.pct_below = {10, 20, 30, 40, 50, 60};
    r.n_pixels = 77;
    r.sne_deg = 4.5;
    r.tv = TvComparison{0.1, 0.3};
    const auto j = io::to_json(r);
    for (const char* k : {"version", "mae_deg", "median_deg", "pct_below", "n_pixels", "sne_deg", "tv"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    for (const char* k : {"3", "5", "7.5", "11.25", "22.5", "30"}) {
        EXPECT_TRUE(j["pct_below"].contains(k)) << k;
    }
    EXPECT_NEAR(j["tv"]["shading_over_normal"].get<double>(), 3.0, 1e-12);
    EXPECT_FALSE(j.contains("psnr_db"));
    const auto back = io::metrics_from_json(j);
    EXPECT_EQ(back.mae_deg, 1.5);
    EXPECT_EQ(back.pct_below, r.pct_below);
    EXPECT_EQ(*back.sne_deg, 4.5);
    EXPECT_EQ(back.tv->shading, 0.3);
    auto bad = j;
    bad["pct_below"]["4"] = 1.0;
    EXPECT_THROW(io::metrics_from_json(bad), FormatError);
}

TEST(MetricsJson, CsvRow)
{
    MetricsReport r;
    r.mae_deg = 2.0;
    r.n_pixels = 3;
    const auto header = io::metrics_csv_header();
    const auto row = io::metrics_csv_row(r);
    EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
    EXPECT_EQ(header.rfind("mae_deg", 0), 0u);
}

TEST(CoverageJson, RoundTrip)
{
    CoverageOptions o;
    o.samples = 1000;
    o.seed = 5;
    const auto r = verify_coverage(gen_ring({5, 45.0, 0.0}), o);
    const auto j = io::to_json(r);
    EXPECT_EQ(j["sampling"].size(), 2u);
    EXPECT_EQ(j["sampling"][0]["mode"], "grid");
    EXPECT_EQ(j["sampling"][1]["mode"], "monte_carlo");
    EXPECT_EQ(j["sampling"][1]["seed"], 5);
    const auto back = io::coverage_from_json(j);
    EXPECT_EQ(back.min_positive_count, r.min_positive_count);
    EXPECT_EQ(back.grid.histogram, r.grid.histogram);
    EXPECT_EQ(back.monte_carlo->histogram, r.monte_carlo->histogram);
    EXPECT_EQ(back.worst_normal.vec(), r.worst_normal.vec());
    EXPECT_EQ(io::dump(io::to_json(back)), io::dump(j));
}

TEST(PerturbationJson, RoundTripAndCsv)
{
    RobustnessConfig cfg;
    cfg.sigmas = {0.05, 0.1};
    cfg.frame_counts = {1};
    cfg.runs = 2;
    const auto r = run_robustness(synth_sphere(24), gen_ring(default_ring()), cfg);
    const auto j = io::to_json(r);
    EXPECT_EQ(j["noise_handling"], "clamp01");
    const auto back = io::perturbation_from_json(j);
    EXPECT_EQ(io::dump(io::to_json(back)), io::dump(j));
    const auto csv = io::perturbation_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "target,0.05,0.1");
    EXPECT_NE(csv.find("\nshading_1,"), std::string::npos);
    EXPECT_NE(csv.find("\nnormal,"), std::string::npos);
}

TEST(SolveSummary, Fields)
{
    const auto res = solve_masked(render_shading(synth_sphere(16), gen_ring(default_ring())));
    const auto j = io::solve_summary_json(res, false, 1e-4);
    EXPECT_EQ(j["mode"], "masked");
    EXPECT_EQ(j["positive_threshold"], 1e-4);
    EXPECT_EQ(j["counts"]["ok"], res.stats.ok);
    const auto n = io::solve_summary_json(res, true, 1e-4);
    EXPECT_EQ(n["mode"], "naive");
    EXPECT_FALSE(n.contains("positive_threshold"));
}

} // namespace
} // namespace shadenorm
