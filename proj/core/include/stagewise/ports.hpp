// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stagewise/geometry.hpp"
#include "stagewise/latent.hpp"

namespace stagewise {

// Model dependencies sit behind these ports. Mock and live implementations
// are interchangeable. Ports are not required to be thread-safe; a
// pipeline run owns its port instances.

class TextCompletionPort {
public:
    virtual ~TextCompletionPort() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

/// Decoded stage output. For latent-space backends the "pixels" may simply
/// be a rendering of the latent (channels x height x width).
struct Image {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> pixels;

    bool operator==(const Image&) const = default;
};

class VlmPort {
public:
    virtual ~VlmPort() = default;
    virtual std::string ask(const Image& image, const std::string& question) = 0;
};

class ScorerPort {
public:
    virtual ~ScorerPort() = default;
    /// Image-text agreement, higher is better.
    virtual double score(const Image& image, const std::string& text) = 0;
};

enum class BlockGroup { near_input, near_middle, near_output };

std::string_view to_string(BlockGroup group);
std::optional<BlockGroup> block_group_from_string(std::string_view text);

/// Cross-attention of one block: spatial cells (row-major on a
/// width x height grid) by text tokens.
struct BlockAttention {
    BlockGroup group = BlockGroup::near_middle;
    int width = 0;
    int height = 0;
    int tokens = 0;
    std::vector<double> values;  // values[m * tokens + k]

    Canvas grid() const { return {width, height}; }
    int cells() const { return width * height; }
    double at(int m, int k) const { return values[static_cast<size_t>(m) * tokens + k]; }
};

struct AttentionMaps {
    std::vector<BlockAttention> blocks;

    std::vector<const BlockAttention*> select(BlockGroup group) const;
};

struct StepOutput {
    LatentState latent;
    AttentionMaps attention;
};

class DenoiserPort {
public:
    virtual ~DenoiserPort() = default;

    /// Latent grid; all masks are expressed on it.
    virtual Canvas canvas() = 0;
    virtual LatentState initial_latent(std::uint64_t seed) = 0;

    /// One reverse-diffusion step from timestep t to t-1. The attention maps
    /// are those computed on the input latent.
    virtual StepOutput step(const LatentState& latent, int t, const std::string& text) = 0;

    /// Gradient with respect to `latent` of the summed attention energy of
    /// token `token` against `box` over the blocks of `group`, evaluated
    /// through the maps step() would produce.
    virtual LatentState energy_gradient(const LatentState& latent, int t, const std::string& text,
                                        const BBox& box, int token, BlockGroup group) = 0;

    virtual Image decode(const LatentState& latent) = 0;
};

}  // namespace stagewise
