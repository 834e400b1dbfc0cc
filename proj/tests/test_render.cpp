// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#include <shadenorm/render.hpp>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace shadenorm {
namespace {

NormalMap single(const Vec3& n)
{
    NormalMap nm(1, 1);
    nm.set(0, UnitVec3::normalize(n));
    return nm;
}

NormalMap random_map(std::mt19937_64& rng, int w, int h, bool facing = true)
{
    std::normal_distribution<double> g;
    NormalMap nm(w, h);
    for (std::size_t i = 0; i < nm.normals.size(); ++i) {
        if (uniform01(rng) < 0.1) {
            continue;
        }
        Vec3 v(g(rng), g(rng), g(rng));
        if (facing) {
            v.z() = std::abs(v.z()) + 1e-3;
        }
        nm.set(i, UnitVec3::normalize(v));
    }
    return nm;
}

TEST(Render, ApexUnderRing)
{
    const auto seq = render_shading(single(Vec3(0, 0, 1)), gen_ring(default_ring()));
    ASSERT_EQ(seq.size(), 9u);
    for (const auto& f : seq.frames) {
        EXPECT_NEAR(f.values[0], std::sqrt(2.0) / 2.0, 1e-15);
    }
}

TEST(Render, NormalEqualsLight)
{
    const auto lights = gen_ring({5, 30.0, 10.0});
    const auto seq = render_shading(single(lights[3].vec()), lights);
    EXPECT_NEAR(seq.frames[3].values[0], 1.0, 1e-15);
}

TEST(Render, ClampsNegative)
{
    const auto l = UnitVec3::normalize(Vec3(-1, 0, 1));
    const auto f = render_frame(single(Vec3(1, 0, 0)), l);
    EXPECT_EQ(f.values[0], 0.0);
}

TEST(Render, BackgroundIsZeroAndMaskShared)
{
    const auto sphere = synth_sphere(32);
    const auto seq = render_shading(sphere, gen_ring(default_ring()));
    EXPECT_NO_THROW(seq.validate());
    for (const auto& f : seq.frames) {
        EXPECT_EQ(f.mask, sphere.mask);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            if (!sphere.mask[i]) {
                EXPECT_EQ(f.values[i], 0.0);
            }
        }
    }
}

TEST(Render, SphereMatchesBruteForceOracle)
{
    const auto sphere = synth_sphere(64);
    const auto light = UnitVec3::normalize(Vec3(0.3, -0.5, 0.8));
    const auto f = render_frame(sphere, light);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const Vec3& n = sphere.normals[i];
        const double d = n.x() * light.x() + n.y() * light.y() + n.z() * light.z();
        const double expected = sphere.mask[i] ? to_working_precision(std::max(d, 0.0)) : 0.0;
        ASSERT_EQ(f.values[i], expected) << i;
        ASSERT_LE(std::abs(f.values[i] - std::max(d, 0.0) * (sphere.mask[i] ? 1 : 0)), 0x1p-53);
    }
}

TEST(Render, ValuesStayInUnitInterval)
{
    auto rng = make_stream(11, 0);
    for (int t = 0; t < 20; ++t) {
        const auto nm = random_map(rng, 12, 9, false);
        const auto seq = render_shading(nm, gen_ring({7, 20.0 + t, 3.0 * t}));
        for (const auto& f : seq.frames) {
            for (double v : f.values) {
                ASSERT_GE(v, 0.0);
                ASSERT_LE(v, 1.0);
            }
        }
    }
}

TEST(Render, RotationEquivariance)
{
    auto rng = make_stream(12, 0);
    std::normal_distribution<double> g;
    const auto nm = random_map(rng, 32, 32, false);
    const auto lights = gen_ring(default_ring());
    for (int t = 0; t < 100; ++t) {
        const Eigen::Matrix3d r = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized().toRotationMatrix();
        NormalMap rot(nm.width, nm.height);
        for (std::size_t i = 0; i < nm.normals.size(); ++i) {
            if (nm.mask[i]) {
                rot.set(i, UnitVec3::normalize(r * nm.normals[i]));
            }
        }
        for (const auto& l : lights.directions()) {
            const auto a = render_frame(nm, l);
            const auto b = render_frame(rot, UnitVec3::normalize(r * l.vec()));
            for (std::size_t i = 0; i < a.values.size(); ++i) {
                ASSERT_NEAR(a.values[i], b.values[i], 1e-12);
            }
        }
    }
}

TEST(Render, RejectsBadInputs)
{
    NormalMap bad(1, 1);
    bad.mask.set(0, 0, true);
    bad.normals[0] = Vec3(0, 0, 3);
    EXPECT_THROW(render_shading(bad, gen_ring(default_ring())), DomainError);
    EXPECT_THROW(render_shading(single(Vec3(0, 0, 1)), LightPath{}), ParameterError);
}

TEST(WorkingPrecision, GridSnap)
{
    EXPECT_EQ(to_working_precision(0.5), 0.5);
    EXPECT_EQ(to_working_precision(1.0), 1.0);
    EXPECT_EQ(to_working_precision(0.0), 0.0);
    const double v = to_working_precision(0.123456789);
    EXPECT_EQ(v * 0x1p53, std::nearbyint(v * 0x1p53));
}

TEST(SignedCodec, EndpointsAndMidpoint)
{
    ShadingSequence seq;
    seq.lights = gen_ring({3, 45.0, 0.0});
    for (double v : {0.0, 1.0, 0.5}) {
        ShadingFrame f(Mask(1, 1, true));
        f.values[0] = v;
        seq.frames.push_back(f);
    }
    const auto enc = encode_signed(seq);
    EXPECT_EQ(enc.encoding, Encoding::kSigned11);
    EXPECT_EQ(enc.frames[0].values[0], -1.0);
    EXPECT_EQ(enc.frames[1].values[0], 1.0);
    EXPECT_EQ(enc.frames[2].values[0], 0.0);
    EXPECT_EQ(decode_signed(enc).frames[2].values[0], 0.5);
}

TEST(SignedCodec, BackgroundEncodesToMinusOne)
{
    const auto sphere = synth_sphere(16);
    const auto enc = encode_signed(render_shading(sphere, gen_ring(default_ring())));
    for (const auto& f : enc.frames) {
        EXPECT_EQ(f.mask, sphere.mask);
        EXPECT_EQ(f.values[0], -1.0);
    }
}

TEST(SignedCodec, SphereRoundTripBitExact)
{
    const auto seq = render_shading(synth_sphere(64), gen_ring(default_ring()));
    const auto back = decode_signed(encode_signed(seq));
    EXPECT_EQ(back.encoding, Encoding::kUnsigned01);
    for (std::size_t k = 0; k < seq.size(); ++k) {
        EXPECT_EQ(back.frames[k].values, seq.frames[k].values);
    }
}

TEST(SignedCodec, RoundTripOnWorkingGrid)
{
    auto rng = make_stream(13, 0);
    ShadingSequence seq;
    seq.lights = gen_ring({3, 45.0, 0.0});
    for (int k = 0; k < 3; ++k) {
        ShadingFrame f(Mask(100, 100, true));
        for (double& v : f.values) {
            v = to_working_precision(uniform01(rng));
        }
        seq.frames.push_back(f);
    }
    const auto back = decode_signed(encode_signed(seq));
    for (std::size_t k = 0; k < seq.size(); ++k) {
        EXPECT_EQ(back.frames[k].values, seq.frames[k].values);
    }
}

TEST(SignedCodec, DomainErrors)
{
    ShadingSequence seq;
    seq.lights = gen_ring({1, 45.0, 0.0});
    ShadingFrame f(Mask(1, 1, true));
    f.values[0] = 1.5;
    seq.frames.push_back(f);
    EXPECT_THROW(encode_signed(seq), DomainError);
    seq.frames[0].values[0] = 0.5;
    EXPECT_THROW(decode_signed(seq), DomainError);
    seq.encoding = Encoding::kSigned11;
    seq.frames[0].values[0] = -1.5;
    EXPECT_THROW(decode_signed(seq), DomainError);
}

TEST(Sequence, ValidateStructure)
{
    ShadingSequence seq;
    EXPECT_THROW(seq.validate(), StructuralError);
    seq.lights = gen_ring({2, 45.0, 0.0});
    seq.frames.emplace_back(Mask(2, 2, true));
    EXPECT_THROW(seq.validate(), StructuralError);
    seq.frames.emplace_back(Mask(2, 2, false));
    EXPECT_THROW(seq.validate(), StructuralError);
    seq.frames[1] = ShadingFrame(Mask(2, 2, true));
    EXPECT_NO_THROW(seq.validate());
}

TEST(Encoding, Names)
{
    EXPECT_STREQ(encoding_name(Encoding::kUnsigned01), "unsigned01");
    EXPECT_STREQ(encoding_name(Encoding::kSigned11), "signed11");
}

} // namespace
} // namespace shadenorm
