// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <benchmark/benchmark.h>

#include "stagewise/geometry.hpp"
#include "stagewise/guidance.hpp"
#include "stagewise/mock/toy_denoiser.hpp"
#include "stagewise/text.hpp"

using namespace stagewise;

namespace {

LatentState noise(std::uint64_t seed) {
    mock::ToyDenoiser toy;
    return toy.initial_latent(seed);
}

void BM_OverlapCandidate(benchmark::State& state) {
    const Canvas canvas{64, 64};
    const BBox prev{0, 0, 32, 64};
    for (auto _ : state)
        for (double r : {0.1, 0.3, 0.5})
            benchmark::DoNotOptimize(overlap_candidate(Position::right, 1, prev, canvas, r));
}
BENCHMARK(BM_OverlapCandidate);

void BM_IndicatorMask(benchmark::State& state) {
    const Canvas canvas{512, 512};
    const Canvas grid{static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
    for (auto _ : state)
        benchmark::DoNotOptimize(indicator_mask({128, 0, 384, 512}, canvas, grid));
}
BENCHMARK(BM_IndicatorMask)->Arg(16)->Arg(64);

void BM_BBoxFromAttention(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ScalarGrid map{n, n, std::vector<double>(static_cast<size_t>(n) * n)};
    for (auto& v : map.values)
        v = u(rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(bbox_from_attention(map, 0.75));
}
BENCHMARK(BM_BBoxFromAttention)->Arg(16)->Arg(64);

void BM_ToyStep(benchmark::State& state) {
    mock::ToyDenoiser toy;
    const auto z = noise(3);
    for (auto _ : state)
        benchmark::DoNotOptimize(toy.step(z, 8, "orange pumpkin and black door"));
}
BENCHMARK(BM_ToyStep);

void BM_EnergyGradient(benchmark::State& state) {
    mock::ToyDenoiser toy;
    const auto z = noise(3);
    const BBox box{8, 0, 8, 16};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            toy.energy_gradient(z, 8, "orange pumpkin and black door", box, 1, BlockGroup::near_middle));
}
BENCHMARK(BM_EnergyGradient);

void BM_SingleObjectStage(benchmark::State& state) {
    mock::ToyDenoiser toy;
    StageRequest req;
    req.n = 1;
    req.subprompt = {1, "black door", head_token_index("black door")};
    req.rough_mask = {0, 0, 8, 16};
    req.seed = 5;
    req.config.steps = static_cast<int>(state.range(0));
    req.config.guide_until = req.config.steps / 2;
    req.config.combine_until = req.config.steps / 2;
    for (auto _ : state)
        benchmark::DoNotOptimize(single_object_diffusion(req, toy));
}
BENCHMARK(BM_SingleObjectStage)->Arg(16)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
