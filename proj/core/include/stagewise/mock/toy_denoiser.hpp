// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "stagewise/ports.hpp"

namespace stagewise::mock {

struct ToyDenoiserOptions {
    int channels = 4;
    int height = 16;
    int width = 16;
    std::uint64_t seed = 7;
    /// Standard deviation of the initial latent.
    double noise_scale = 0.5;
    /// Per-step pull toward the text prior: z' = a_t z + (1 - a_t) mu,
    /// a_t = t / (t + contraction).
    double contraction = 0.05;
};

/// Parses "c=4,h=16,w=16,seed=7,noise=0.5,contraction=0.05" (any subset).
ToyDenoiserOptions parse_toy_options(const std::string& text);

/// Small differentiable stand-in for a latent diffusion model.
///
/// Tokens are the lower-cased words of the text. For block j and token k,
/// the logit of cell m is beta_j * <e_jk, pool_j(z)_m>, where e_jk is a
/// seeded embedding of the word and pool_j averages f_j x f_j latent cells.
/// Attention is the softmax of the logits over cells, so every token column
/// sums to one and a spatially constant offset of the latent leaves it
/// unchanged. The step is a contraction toward a seeded, spatially constant
/// text prior, so it never moves attention by itself.
///
/// Immutable after construction; concurrent calls are safe.
class ToyDenoiser : public DenoiserPort {
public:
    struct BlockSpec {
        BlockGroup group;
        int pool;
        double beta;
    };
    static constexpr std::array<BlockSpec, 3> block_specs{{
        {BlockGroup::near_input, 1, 1.0},
        {BlockGroup::near_middle, 2, 2.0},
        {BlockGroup::near_output, 1, 0.75},
    }};

    explicit ToyDenoiser(ToyDenoiserOptions options = {});

    const ToyDenoiserOptions& options() const { return m_options; }

    Canvas canvas() override { return {m_options.width, m_options.height}; }
    LatentState initial_latent(std::uint64_t seed) override;
    StepOutput step(const LatentState& latent, int t, const std::string& text) override;
    LatentState energy_gradient(const LatentState& latent, int t, const std::string& text, const BBox& box,
                                int token, BlockGroup group) override;
    Image decode(const LatentState& latent) override;

    AttentionMaps attention(const LatentState& latent, const std::string& text) const;
    LatentState energy_gradient(const LatentState& latent, const std::string& text, const BBox& box, int token,
                                BlockGroup group) const;
    double energy(const LatentState& latent, const std::string& text, const BBox& box, int token,
                  BlockGroup group) const;

    /// Seeded embedding of `word` in block `block` (length = channels).
    std::vector<double> embedding(const std::string& word, size_t block) const;
    /// Seeded, spatially constant per-channel prior of `text`.
    std::vector<double> text_prior(const std::string& text) const;
    /// Reverse of decode(); the toy "image" is a rendering of the latent.
    LatentState latent_from_image(const Image& image) const;

private:
    void check_shape(const LatentState& latent) const;
    std::vector<double> token_logits(const LatentState& latent, const std::vector<double>& e, const BlockSpec& spec) const;

    ToyDenoiserOptions m_options;
};

/// Deterministic, platform-independent N(0, 1) stream (splitmix64 + Box-Muller).
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : m_state(seed) {}
    double next();

private:
    std::uint64_t next_u64();
    double uniform();

    std::uint64_t m_state;
    bool m_has_spare = false;
    double m_spare = 0.0;
};

std::uint64_t hash_string(const std::string& text, std::uint64_t salt = 0);

}  // namespace stagewise::mock
