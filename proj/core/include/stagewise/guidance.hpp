// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "stagewise/errors.hpp"
#include "stagewise/geometry.hpp"
#include "stagewise/latent.hpp"
#include "stagewise/planner.hpp"
#include "stagewise/ports.hpp"

namespace stagewise {

/// Numeric knobs of one stage. Timesteps count down from `steps` to 1;
/// guidance runs while t > guide_until, latent combination while
/// t > combine_until.
struct GuidanceConfig {
    int steps = 16;
    int guide_until = 8;
    int combine_until = 8;
    double eta = 40.0;
    BlockGroup blocks = BlockGroup::near_middle;
    int guidance_iters = 1;
    double threshold_quantile = 0.75;

    void validate() const;
    bool operator==(const GuidanceConfig&) const = default;
};

struct BlockEnergy {
    double energy = 1.0;
    double inside_ratio = 0.0;
    bool degenerate = false;
};

/// (1 - inside/total)^2 of token `token` for one block, with `box` given on
/// `canvas` and rescaled to the block's grid.
BlockEnergy block_energy(const BlockAttention& block, const BBox& box, const Canvas& canvas, int token);

struct AttentionEnergy {
    double total = 0.0;
    std::vector<BlockEnergy> blocks;

    bool any_degenerate() const;
};

/// Sum of block energies over the blocks of `group`. A block whose token
/// column carries no mass contributes 1 and is flagged degenerate.
AttentionEnergy attention_energy(const AttentionMaps& maps, const BBox& box, const Canvas& canvas, int token,
                                 BlockGroup group);

/// Mean over the blocks of `group` of token `token`'s attention, resampled
/// to `canvas` (mass-preserving nearest upsampling).
ScalarGrid mean_token_map(const AttentionMaps& maps, BlockGroup group, int token, const Canvas& canvas);

/// latent <- latent - eta * grad E, repeated config.guidance_iters times.
/// Throws ErrorKind::numeric on a non-finite gradient.
LatentState guidance_step(const LatentState& latent, int t, const SubPrompt& subprompt, const BBox& box,
                          const GuidanceConfig& config, DenoiserPort& port);

/// mask ? current : previous per cell, broadcast across channels. Cells with
/// mask = 0 are copied bit-exactly from `previous`.
LatentState combine_latents(const LatentState& current, const LatentState& previous, const BinaryMask& mask);

struct StageRecord {
    int n = 0;
    SubPrompt subprompt;
    BBox rough_mask;
    GuidanceConfig config;
    std::uint64_t seed = 0;
    /// trajectory[i] is the latent at timestep T - i; trajectory.back() is z_0.
    std::vector<LatentState> trajectory;
    LatentState final_latent;
    BBox precise_mask;
    bool precise_mask_fallback = false;
    /// Mean token attention of the last denoising step, on the canvas.
    ScalarGrid final_attention;
    Image image;
    std::vector<std::string> events;

    const LatentState& at_timestep(int t) const {
        return trajectory.at(static_cast<size_t>(config.steps - t));
    }
};

/// Raised when a stage cannot complete; carries the trajectory up to the
/// failure point.
class StageFailure : public Error {
public:
    StageFailure(ErrorKind kind, const std::string& message, std::shared_ptr<const StageRecord> partial)
        : Error(kind, message), m_partial(std::move(partial)) {}

    const StageRecord* partial() const { return m_partial.get(); }

private:
    std::shared_ptr<const StageRecord> m_partial;
};

struct StageRequest {
    int n = 1;
    SubPrompt subprompt;
    BBox rough_mask;
    const StageRecord* previous = nullptr;  // required iff n > 1
    GuidanceConfig config;
    std::uint64_t seed = 0;
};

/// One stage of progressive generation: guided denoising of the stage
/// sub-prompt inside `rough_mask`, merged with the previous stage's
/// trajectory early on, followed by precise-mask extraction.
StageRecord single_object_diffusion(const StageRequest& request, DenoiserPort& port);

}  // namespace stagewise
