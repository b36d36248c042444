// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stagewise/errors.hpp"
#include "stagewise/geometry.hpp"

using namespace stagewise;

namespace {

const Canvas k64{64, 64};

template <typename F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorKind::contract;
}

}  // namespace

TEST(RoughMaskFirst, SingleObjectTakesCanvas) {
    EXPECT_EQ(rough_mask_first(Position::left, 1, k64), (BBox{0, 0, 64, 64}));
}

TEST(RoughMaskFirst, LeftHalf) {
    EXPECT_EQ(rough_mask_first(Position::left, 2, k64), (BBox{0, 0, 32, 64}));
}

TEST(RoughMaskFirst, BottomHalfTouchesCanvasEdge) {
    const BBox b = rough_mask_first(Position::bottom, 2, k64);
    EXPECT_EQ(b, (BBox{0, 32, 64, 32}));
    EXPECT_EQ(b.bottom(), 64);
    EXPECT_EQ(b.area() * 2, k64.cells());
}

TEST(RoughMaskFirst, BottomRoundsTowardCanvasEdge) {
    const BBox b = rough_mask_first(Position::bottom, 3, Canvas{10, 10});
    EXPECT_EQ(b, (BBox{0, 6, 10, 4}));
}

TEST(RoughMaskFirst, InvalidCounts) {
    EXPECT_EQ(kind_of([] { rough_mask_first(Position::left, 0, k64); }), ErrorKind::invalid_plan);
    EXPECT_EQ(kind_of([] { rough_mask_first(Position::left, 5, Canvas{4, 4}); }), ErrorKind::invalid_plan);
    EXPECT_EQ(kind_of([] { rough_mask_first(Position::right, 1, k64); }), ErrorKind::invalid_plan);
}

TEST(RoughMaskNext, RightUsesRemainingWidth) {
    EXPECT_EQ(rough_mask_next(Position::right, 1, BBox{0, 0, 32, 64}, k64), (BBox{32, 0, 32, 64}));
}

TEST(RoughMaskNext, TopSingle) {
    EXPECT_EQ(rough_mask_next(Position::top, 1, BBox{0, 32, 64, 32}, k64), (BBox{0, 0, 64, 32}));
}

TEST(RoughMaskNext, TopSecondOfTwoTouchesPrevious) {
    const BBox b = rough_mask_next(Position::top, 2, BBox{0, 32, 64, 32}, k64);
    EXPECT_EQ(b, (BBox{0, 16, 64, 16}));
    EXPECT_EQ(b.bottom(), 32);
}

TEST(RoughMaskNext, ExhaustedLayout) {
    EXPECT_EQ(kind_of([] { rough_mask_next(Position::right, 1, BBox{0, 0, 64, 64}, k64); }),
              ErrorKind::layout_exhausted);
    EXPECT_EQ(kind_of([] { rough_mask_next(Position::top, 1, BBox{0, 0, 64, 10}, k64); }),
              ErrorKind::layout_exhausted);
    EXPECT_EQ(kind_of([] { rough_mask_next(Position::right, 3, BBox{0, 0, 62, 64}, k64); }),
              ErrorKind::layout_exhausted);
}

TEST(OverlapCandidate, RightHalfRatio) {
    const auto c = overlap_candidate(Position::right, 1, BBox{0, 0, 32, 64}, k64, 0.5);
    EXPECT_EQ(c.bbox, (BBox{16, 0, 48, 64}));
    EXPECT_FALSE(c.clamped);
}

TEST(OverlapCandidate, ZeroRatioReducesToNext) {
    const BBox prev{0, 0, 32, 64};
    EXPECT_EQ(overlap_candidate(Position::right, 1, prev, k64, 0.0).bbox, rough_mask_next(Position::right, 1, prev, k64));
}

TEST(OverlapCandidate, TopThirtyPercent) {
    const BBox prev{0, 32, 64, 32};
    const auto c = overlap_candidate(Position::top, 1, prev, k64, 0.3);
    EXPECT_EQ(c.bbox, (BBox{0, 0, 64, 42}));
    EXPECT_EQ(c.bbox.bottom() - prev.y, 10);  // round(32 * 0.3)
}

TEST(OverlapCandidate, ClampsAndFlags) {
    // Both half-ratio terms round up (2.5 -> 3), so the candidate ends one
    // cell past the canvas and is clamped.
    const Canvas canvas{6, 8};
    const auto c = overlap_candidate(Position::right, 1, BBox{0, 0, 5, 8}, canvas, 0.5);
    EXPECT_TRUE(c.clamped);
    EXPECT_EQ(c.bbox, (BBox{3, 0, 3, 8}));
}

TEST(OverlapCandidate, RejectsBadRatio) {
    EXPECT_EQ(kind_of([] { overlap_candidate(Position::right, 1, BBox{0, 0, 32, 64}, k64, 1.0); }),
              ErrorKind::contract);
}

TEST(IndicatorMask, FullCanvasIsAllOnes) {
    const auto m = indicator_mask(full_canvas(k64), k64, Canvas{16, 16});
    EXPECT_EQ(m.count(), 256);
}

TEST(IndicatorMask, LeftHalfQuarterResolution) {
    const auto m = indicator_mask(BBox{0, 0, 32, 64}, k64, Canvas{16, 16});
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
            EXPECT_EQ(m.at(x, y), x < 8 ? 1 : 0) << x << "," << y;
}

TEST(IndicatorMask, OverlapCandidateColumns) {
    const auto m = indicator_mask(BBox{16, 0, 48, 64}, k64, Canvas{16, 16});
    for (int x = 0; x < 16; ++x)
        EXPECT_EQ(m.at(x, 0), x >= 4 ? 1 : 0);
}

TEST(IndicatorMask, MatchesBruteForceOnRandomBoxes) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const Canvas canvas{std::uniform_int_distribution<int>(1, 80)(rng), std::uniform_int_distribution<int>(1, 80)(rng)};
        const Canvas res{std::uniform_int_distribution<int>(1, 40)(rng), std::uniform_int_distribution<int>(1, 40)(rng)};
        const int x = std::uniform_int_distribution<int>(0, canvas.width - 1)(rng);
        const int y = std::uniform_int_distribution<int>(0, canvas.height - 1)(rng);
        const BBox box{x, y, std::uniform_int_distribution<int>(1, canvas.width - x)(rng),
                       std::uniform_int_distribution<int>(1, canvas.height - y)(rng)};
        const auto mask = indicator_mask(box, canvas, res);
        const auto expected = oracle::indicator(box, canvas, res);
        ASSERT_EQ(std::vector<int>(mask.cells.begin(), mask.cells.end()), expected);
    }
}

TEST(IndicatorMask, SameResolutionCountEqualsArea) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        const Canvas canvas{std::uniform_int_distribution<int>(1, 64)(rng), std::uniform_int_distribution<int>(1, 64)(rng)};
        const int x = std::uniform_int_distribution<int>(0, canvas.width - 1)(rng);
        const int y = std::uniform_int_distribution<int>(0, canvas.height - 1)(rng);
        const BBox box{x, y, canvas.width - x, canvas.height - y};
        EXPECT_EQ(indicator_mask(box, canvas, canvas).count(), box.area());
    }
}

TEST(Quantile, LinearInterpolation) {
    const std::vector<double> v{4, 1, 3, 2};
    EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
}

TEST(BBoxFromAttention, SingleHotCell) {
    ScalarGrid g{16, 16, std::vector<double>(256, 0.0)};
    g.at(5, 7) = 1.0;
    EXPECT_EQ(bbox_from_attention(g, 0.9), (BBox{5, 7, 1, 1}));
}

TEST(BBoxFromAttention, UniformMapAtZeroQuantileIsFullCanvas) {
    ScalarGrid g{12, 9, std::vector<double>(108, 0.3)};
    EXPECT_EQ(bbox_from_attention(g, 0.0), (BBox{0, 0, 12, 9}));
}

TEST(BBoxFromAttention, PlantedRectangle) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> low(0.0, 0.1);
    for (int trial = 0; trial < 200; ++trial) {
        ScalarGrid g{20, 20, std::vector<double>(400)};
        for (auto& v : g.values)
            v = low(rng);
        const int x = std::uniform_int_distribution<int>(0, 16)(rng);
        const int y = std::uniform_int_distribution<int>(0, 14)(rng);
        for (int yy = y; yy < y + 6; ++yy)
            for (int xx = x; xx < x + 4; ++xx)
                g.at(xx, yy) = 1.0 + low(rng);
        // 24 hot cells out of 400: anything above the 0.9 quantile is hot.
        EXPECT_EQ(bbox_from_attention(g, 0.95), (BBox{x, y, 4, 6}));
        EXPECT_EQ(bbox_from_attention(g, 0.95), oracle::hot_box(g.values, 20, 20, 0.95));
    }
}

TEST(BBoxFromAttention, MatchesBruteForceOnRandomMaps) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int w = std::uniform_int_distribution<int>(1, 24)(rng);
        const int h = std::uniform_int_distribution<int>(1, 24)(rng);
        ScalarGrid g{w, h, std::vector<double>(static_cast<size_t>(w) * h)};
        for (auto& v : g.values)
            v = u(rng) < 0.3 ? 0.0 : u(rng);
        if (*std::max_element(g.values.begin(), g.values.end()) <= 0.0)
            continue;
        const double q = u(rng);
        ASSERT_EQ(bbox_from_attention(g, q), oracle::hot_box(g.values, w, h, q));
    }
}

TEST(BBoxFromAttention, EmptyMapIsAnExtractionError) {
    ScalarGrid g{4, 4, std::vector<double>(16, 0.0)};
    EXPECT_EQ(kind_of([&] { bbox_from_attention(g, 0.5); }), ErrorKind::precise_mask_extraction);
}

TEST(FirstSplit, StripsTileCanvas) {
    for (int w = 1; w <= 40; ++w)
        for (int n = 1; n <= 6 && n <= w; ++n) {
            const Canvas canvas{w, w};
            for (Position p : {Position::left, Position::bottom}) {
                const auto strips = first_split_strips(p, n, canvas);
                std::vector<int> cover(static_cast<size_t>(canvas.cells()), 0);
                for (const auto& s : strips) {
                    ASSERT_TRUE(within(s, canvas));
                    for (int y = s.y; y < s.bottom(); ++y)
                        for (int x = s.x; x < s.right(); ++x)
                            ++cover[static_cast<size_t>(y) * w + x];
                }
                // Exact tiling except the ceil'd first bottom strip, which
                // may overlap its neighbour by at most one row.
                int over = 0;
                for (int c : cover) {
                    ASSERT_GE(c, 1);
                    over += c - 1;
                }
                EXPECT_LE(over, p == Position::left ? 0 : w);
            }
        }
}
