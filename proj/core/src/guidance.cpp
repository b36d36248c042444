// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/guidance.hpp"

#include <algorithm>
#include <cmath>

namespace stagewise {

void GuidanceConfig::validate() const {
    require(steps >= 1, "steps must be >= 1");
    require(guide_until >= 0 && guide_until <= steps, "guide_until must lie in [0, steps]");
    require(combine_until >= 0 && combine_until <= steps, "combine_until must lie in [0, steps]");
    require(eta > 0.0 && std::isfinite(eta), "eta must be a positive finite number");
    require(guidance_iters >= 1, "guidance_iters must be >= 1");
    require(threshold_quantile >= 0.0 && threshold_quantile <= 1.0, "threshold_quantile must lie in [0, 1]");
}

BlockEnergy block_energy(const BlockAttention& block, const BBox& box, const Canvas& canvas, int token) {
    require(token >= 0 && token < block.tokens, "token index out of range");
    const CellRange xs = rescale_range(box.x, box.w, canvas.width, block.width);
    const CellRange ys = rescale_range(box.y, box.h, canvas.height, block.height);

    double inside = 0.0;
    double total = 0.0;
    for (int v = 0; v < block.height; ++v) {
        const bool row_in = v >= ys.begin && v < ys.end;
        for (int u = 0; u < block.width; ++u) {
            const double a = block.at(v * block.width + u, token);
            total += a;
            if (row_in && u >= xs.begin && u < xs.end)
                inside += a;
        }
    }
    if (!(total > 0.0))
        return {1.0, 0.0, true};
    const double ratio = inside / total;
    return {(1.0 - ratio) * (1.0 - ratio), ratio, false};
}

bool AttentionEnergy::any_degenerate() const {
    return std::any_of(blocks.begin(), blocks.end(), [](const BlockEnergy& b) { return b.degenerate; });
}

AttentionEnergy attention_energy(const AttentionMaps& maps, const BBox& box, const Canvas& canvas, int token,
                                 BlockGroup group) {
    AttentionEnergy out;
    for (const BlockAttention* block : maps.select(group)) {
        out.blocks.push_back(block_energy(*block, box, canvas, token));
        out.total += out.blocks.back().energy;
    }
    return out;
}

ScalarGrid mean_token_map(const AttentionMaps& maps, BlockGroup group, int token, const Canvas& canvas) {
    const auto blocks = maps.select(group);
    require(!blocks.empty(), "no attention blocks in the selected group");
    ScalarGrid out{canvas.width, canvas.height, std::vector<double>(static_cast<size_t>(canvas.cells()), 0.0)};
    for (const BlockAttention* block : blocks) {
        require(token >= 0 && token < block->tokens, "token index out of range");
        const double spread = static_cast<double>(canvas.cells()) / block->cells();
        for (int y = 0; y < canvas.height; ++y) {
            const int v = static_cast<int>(static_cast<long>(y) * block->height / canvas.height);
            for (int x = 0; x < canvas.width; ++x) {
                const int u = static_cast<int>(static_cast<long>(x) * block->width / canvas.width);
                out.at(x, y) += block->at(v * block->width + u, token) / spread;
            }
        }
    }
    for (double& v : out.values)
        v /= static_cast<double>(blocks.size());
    return out;
}

LatentState guidance_step(const LatentState& latent, int t, const SubPrompt& subprompt, const BBox& box,
                          const GuidanceConfig& config, DenoiserPort& port) {
    LatentState z = latent;
    for (int iter = 0; iter < config.guidance_iters; ++iter) {
        const LatentState grad =
            port.energy_gradient(z, t, subprompt.text, box, subprompt.token_index, config.blocks);
        require(grad.same_shape(z), "energy gradient shape differs from the latent");
        if (!grad.all_finite())
            raise(ErrorKind::numeric, "non-finite attention-energy gradient at t=" + std::to_string(t));
        for (size_t i = 0; i < z.values.size(); ++i)
            z.values[i] -= config.eta * grad.values[i];
    }
    return z;
}

LatentState combine_latents(const LatentState& current, const LatentState& previous, const BinaryMask& mask) {
    require(current.same_shape(previous), "latent shapes differ");
    require(mask.width == current.width && mask.height == current.height, "mask is not at latent resolution");
    LatentState out = current;
    for (int c = 0; c < current.channels; ++c)
        for (int y = 0; y < current.height; ++y)
            for (int x = 0; x < current.width; ++x)
                if (!mask.at(x, y))
                    out.at(c, y, x) = previous.at(c, y, x);
    return out;
}

StageRecord single_object_diffusion(const StageRequest& request, DenoiserPort& port) {
    const GuidanceConfig& cfg = request.config;
    cfg.validate();
    require(request.n >= 1, "stage index must be >= 1");
    require((request.n == 1) == (request.previous == nullptr), "a previous stage is required exactly when n > 1");

    const Canvas canvas = port.canvas();
    require(within(request.rough_mask, canvas), "rough mask lies outside the canvas");
    if (request.previous) {
        require(request.previous->trajectory.size() == static_cast<size_t>(cfg.steps) + 1,
                "previous trajectory length does not match the step count");
    }

    auto record = std::make_shared<StageRecord>();
    record->n = request.n;
    record->subprompt = request.subprompt;
    record->rough_mask = request.rough_mask;
    record->config = cfg;
    record->seed = request.seed;
    record->trajectory.reserve(static_cast<size_t>(cfg.steps) + 1);

    const BinaryMask combine_mask = indicator_mask(request.rough_mask, canvas, canvas);
    LatentState z = port.initial_latent(request.seed);
    record->trajectory.push_back(z);

    AttentionMaps last_maps;
    for (int t = cfg.steps; t >= 1; --t) {
        try {
            if (t > cfg.guide_until)
                z = guidance_step(z, t, request.subprompt, request.rough_mask, cfg, port);
            StepOutput out = port.step(z, t, request.subprompt.text);
            if (!out.latent.all_finite())
                raise(ErrorKind::numeric, "denoiser produced non-finite values at t=" + std::to_string(t));
            if (request.previous && t > cfg.combine_until)
                out.latent = combine_latents(out.latent, request.previous->at_timestep(t - 1), combine_mask);
            z = std::move(out.latent);
            last_maps = std::move(out.attention);
        } catch (const StageFailure&) {
            throw;
        } catch (const Error& e) {
            record->events.push_back(std::string("aborted at t=") + std::to_string(t) + ": " + e.what());
            throw StageFailure(e.kind(), e.what(), record);
        }
        record->trajectory.push_back(z);
    }

    record->final_latent = z;
    record->final_attention = mean_token_map(last_maps, cfg.blocks, request.subprompt.token_index, canvas);
    try {
        record->precise_mask = bbox_from_attention(record->final_attention, cfg.threshold_quantile);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::precise_mask_extraction)
            throw;
        record->precise_mask = request.rough_mask;
        record->precise_mask_fallback = true;
        record->events.push_back(std::string("precise mask fell back to the rough mask: ") + e.what());
    }
    record->image = port.decode(record->final_latent);
    return std::move(*record);
}

}  // namespace stagewise
