// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stagewise/errors.hpp"
#include "stagewise/guidance.hpp"
#include "stagewise/mock/toy_denoiser.hpp"

using namespace stagewise;
using stagewise::mock::ToyDenoiser;

namespace {

BlockAttention uniform_block(int w, int h, int tokens) {
    BlockAttention b;
    b.width = w;
    b.height = h;
    b.tokens = tokens;
    b.values.assign(static_cast<size_t>(w) * h * tokens, 1.0 / (w * h));
    return b;
}

bool bit_equal(double a, double b) {
    return std::memcmp(&a, &b, sizeof a) == 0;
}

GuidanceConfig config(int steps, int guide_until, int combine_until) {
    GuidanceConfig c;
    c.steps = steps;
    c.guide_until = guide_until;
    c.combine_until = combine_until;
    return c;
}

/// Backend whose gradient is always NaN.
class NanGradient : public ToyDenoiser {
public:
    LatentState energy_gradient(const LatentState& z, int, const std::string&, const BBox&, int, BlockGroup) override {
        return LatentState(z.channels, z.height, z.width, std::nan(""));
    }
};

}  // namespace

TEST(AttentionEnergy, AllMassInsideIsZero) {
    auto b = uniform_block(4, 4, 1);
    std::fill(b.values.begin(), b.values.end(), 0.0);
    b.values[5] = 1.0;  // cell (1,1)
    EXPECT_DOUBLE_EQ(block_energy(b, BBox{0, 0, 8, 8}, Canvas{16, 16}, 0).energy, 0.0);
}

TEST(AttentionEnergy, UniformHalfCanvasIsQuarter) {
    const auto b = uniform_block(8, 8, 2);
    const auto e = block_energy(b, BBox{0, 0, 8, 16}, Canvas{16, 16}, 1);
    EXPECT_DOUBLE_EQ(e.energy, 0.25);
    EXPECT_DOUBLE_EQ(e.inside_ratio, 0.5);
}

TEST(AttentionEnergy, DegenerateColumn) {
    auto b = uniform_block(4, 4, 1);
    std::fill(b.values.begin(), b.values.end(), 0.0);
    const auto e = block_energy(b, BBox{0, 0, 8, 8}, Canvas{16, 16}, 0);
    EXPECT_TRUE(e.degenerate);
    EXPECT_DOUBLE_EQ(e.energy, 1.0);
}

TEST(AttentionEnergy, MatchesBruteForce) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        AttentionMaps maps;
        const int tokens = std::uniform_int_distribution<int>(1, 5)(rng);
        for (auto [g, w] : {std::pair{BlockGroup::near_middle, 8}, {BlockGroup::near_middle, 4}, {BlockGroup::near_input, 16}})
            maps.blocks.push_back(oracle::random_block(rng, g, w, w, tokens));
        const Canvas canvas{32, 32};
        const int x = std::uniform_int_distribution<int>(0, 31)(rng);
        const int y = std::uniform_int_distribution<int>(0, 31)(rng);
        const BBox box{x, y, std::uniform_int_distribution<int>(1, 32 - x)(rng),
                       std::uniform_int_distribution<int>(1, 32 - y)(rng)};
        const int k = std::uniform_int_distribution<int>(0, tokens - 1)(rng);
        const auto e = attention_energy(maps, box, canvas, k, BlockGroup::near_middle);
        const double expected = oracle::energy(maps, BlockGroup::near_middle, box, canvas, k);
        EXPECT_LE(std::abs(e.total - expected), 1e-10 * std::max(1e-300, std::abs(expected)));
        ASSERT_EQ(e.blocks.size(), 2u);
        for (const auto& b : e.blocks) {
            EXPECT_GE(b.energy, 0.0);
            EXPECT_LE(b.energy, 1.0);
        }
    }
}

TEST(MeanTokenMap, PreservesMass) {
    std::mt19937_64 rng(4);
    AttentionMaps maps;
    maps.blocks.push_back(oracle::random_block(rng, BlockGroup::near_middle, 8, 8, 2));
    const auto m = mean_token_map(maps, BlockGroup::near_middle, 1, Canvas{16, 16});
    double a = 0, b = 0;
    for (double v : m.values)
        a += v;
    for (int c = 0; c < 64; ++c)
        b += maps.blocks[0].at(c, 1);
    EXPECT_NEAR(a, b, 1e-12);
    EXPECT_DOUBLE_EQ(m.at(3, 5), maps.blocks[0].at(2 * 8 + 1, 1) / 4);
}

TEST(GuidanceStep, ZeroEtaLeavesLatent) {
    ToyDenoiser toy;
    std::mt19937_64 rng(1);
    const auto z = oracle::random_latent(rng, 4, 16, 16);
    auto cfg = config(4, 0, 0);
    cfg.eta = 0.0;
    EXPECT_EQ(guidance_step(z, 4, SubPrompt{1, "door", 0}, BBox{0, 0, 8, 16}, cfg, toy), z);
}

TEST(GuidanceStep, StationaryWhenAllMassInside) {
    ToyDenoiser toy;
    std::mt19937_64 rng(1);
    const auto z = oracle::random_latent(rng, 4, 16, 16);
    EXPECT_EQ(guidance_step(z, 4, SubPrompt{1, "door", 0}, BBox{0, 0, 16, 16}, config(4, 0, 0), toy), z);
}

TEST(GuidanceStep, SmallStepDecreasesEnergy) {
    ToyDenoiser toy;
    std::mt19937_64 rng(8);
    auto cfg = config(4, 0, 0);
    cfg.eta = 1.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto z = oracle::random_latent(rng, 4, 16, 16, 0.5);
        const BBox box{0, 0, 8, 16};
        const double before = toy.energy(z, "black door", box, 1, cfg.blocks);
        const auto next = guidance_step(z, 4, SubPrompt{1, "black door", 1}, box, cfg, toy);
        EXPECT_LT(toy.energy(next, "black door", box, 1, cfg.blocks), before);
    }
}

TEST(GuidanceStep, NonFiniteGradientIsNumericError) {
    NanGradient port;
    try {
        guidance_step(LatentState(4, 16, 16), 4, SubPrompt{1, "door", 0}, BBox{0, 0, 8, 16}, config(4, 0, 0), port);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::numeric);
    }
}

TEST(CombineLatents, OnesZerosAndHalves) {
    std::mt19937_64 rng(5);
    const auto a = oracle::random_latent(rng, 4, 6, 6);
    const auto b = oracle::random_latent(rng, 4, 6, 6);
    const Canvas c{6, 6};
    EXPECT_EQ(combine_latents(a, b, indicator_mask(full_canvas(c), c, c)), a);
    BinaryMask zeros{6, 6, std::vector<std::uint8_t>(36, 0)};
    EXPECT_EQ(combine_latents(a, b, zeros), b);
    const auto half = combine_latents(a, b, indicator_mask(BBox{0, 0, 3, 6}, c, c));
    for (int ch = 0; ch < 4; ++ch)
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 6; ++x)
                EXPECT_TRUE(bit_equal(half.at(ch, y, x), x < 3 ? a.at(ch, y, x) : b.at(ch, y, x)));
}

TEST(CombineLatents, Idempotent) {
    std::mt19937_64 rng(6);
    const auto a = oracle::random_latent(rng, 2, 5, 7);
    BinaryMask m{7, 5, std::vector<std::uint8_t>(35)};
    for (auto& v : m.cells)
        v = static_cast<std::uint8_t>(rng() & 1);
    EXPECT_EQ(combine_latents(a, a, m), a);
}

TEST(CombineLatents, ShapeMismatch) {
    EXPECT_THROW(combine_latents(LatentState(1, 2, 2), LatentState(1, 2, 3), BinaryMask{2, 2, {1, 1, 1, 1}}), Error);
}

TEST(SingleObjectDiffusion, FourStepsConcentrateLeft) {
    ToyDenoiser toy;
    const BBox left{0, 0, 8, 16};
    const auto rec = single_object_diffusion({1, SubPrompt{1, "black door", 1}, left, nullptr, config(4, 0, 0), 11}, toy);
    ASSERT_EQ(rec.trajectory.size(), 5u);
    double inside = 0, total = 0;
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            total += rec.final_attention.at(x, y);
            if (x < 8)
                inside += rec.final_attention.at(x, y);
        }
    EXPECT_GE(inside / total, 0.6);
    EXPECT_TRUE(within(rec.precise_mask, Canvas{16, 16}));
    EXPECT_EQ(rec.final_latent, rec.trajectory.back());
}

TEST(SingleObjectDiffusion, NoGuidanceEqualsPlainRollout) {
    ToyDenoiser toy;
    const auto rec = single_object_diffusion({1, SubPrompt{1, "door", 0}, BBox{0, 0, 8, 16}, nullptr, config(6, 6, 6), 3}, toy);
    auto z = toy.initial_latent(3);
    for (int t = 6; t >= 1; --t)
        z = toy.step(z, t, "door").latent;
    EXPECT_EQ(rec.final_latent, z);
}

TEST(SingleObjectDiffusion, CombinationKeepsPreviousOutsideMask) {
    // With combine_until = 0 every step combines (t > 0 always holds); the
    // cells outside the rough mask then equal the previous trajectory's last
    // latent bit for bit.
    ToyDenoiser toy;
    const auto first = single_object_diffusion({1, SubPrompt{1, "door", 0}, BBox{0, 0, 8, 16}, nullptr, config(5, 2, 2), 1}, toy);
    const BBox right{8, 0, 8, 16};
    const auto second = single_object_diffusion(
        {2, SubPrompt{2, "pumpkin and door", 0}, right, &first, config(5, 2, 0), 2}, toy);
    for (size_t i = 1; i < second.trajectory.size(); ++i) {
        const auto& prev = first.trajectory[i];
        const auto& cur = second.trajectory[i];
        for (int c = 0; c < 4; ++c)
            for (int y = 0; y < 16; ++y)
                for (int x = 0; x < 8; ++x)
                    ASSERT_TRUE(bit_equal(cur.at(c, y, x), prev.at(c, y, x))) << i;
    }
}

TEST(SingleObjectDiffusion, CombinationStopsAtThreshold) {
    ToyDenoiser toy;
    const auto first = single_object_diffusion({1, SubPrompt{1, "door", 0}, BBox{0, 0, 8, 16}, nullptr, config(6, 3, 3), 1}, toy);
    const auto second = single_object_diffusion(
        {2, SubPrompt{2, "pumpkin and door", 0}, BBox{8, 0, 8, 16}, &first, config(6, 3, 3), 2}, toy);
    // Latents after steps t = 6, 5, 4 (indices 1..3) were combined.
    for (size_t i = 1; i <= 3; ++i)
        EXPECT_TRUE(bit_equal(second.trajectory[i].at(0, 0, 0), first.trajectory[i].at(0, 0, 0)));
    EXPECT_FALSE(bit_equal(second.trajectory[4].at(0, 0, 0), first.trajectory[4].at(0, 0, 0)));
}

TEST(SingleObjectDiffusion, Deterministic) {
    ToyDenoiser toy;
    const StageRequest req{1, SubPrompt{1, "red apple", 1}, BBox{0, 8, 16, 8}, nullptr, config(8, 4, 4), 99};
    const auto a = single_object_diffusion(req, toy);
    const auto b = single_object_diffusion(req, toy);
    ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
    for (size_t i = 0; i < a.trajectory.size(); ++i)
        EXPECT_EQ(digest(a.trajectory[i]), digest(b.trajectory[i]));
    EXPECT_EQ(a.precise_mask, b.precise_mask);
}

TEST(SingleObjectDiffusion, NumericFailureKeepsPartialTrajectory) {
    NanGradient port;
    try {
        single_object_diffusion({1, SubPrompt{1, "door", 0}, BBox{0, 0, 8, 16}, nullptr, config(6, 3, 3), 1}, port);
        FAIL();
    } catch (const StageFailure& f) {
        EXPECT_EQ(f.kind(), ErrorKind::numeric);
        ASSERT_NE(f.partial(), nullptr);
        EXPECT_EQ(f.partial()->trajectory.size(), 1u);
    }
}

TEST(GuidanceConfig, Validation) {
    EXPECT_NO_THROW(GuidanceConfig{}.validate());
    EXPECT_THROW(config(4, 5, 0).validate(), Error);
    EXPECT_THROW(config(4, 0, -1).validate(), Error);
    auto c = config(4, 0, 0);
    c.eta = 0.0;
    EXPECT_THROW(c.validate(), Error);
}
