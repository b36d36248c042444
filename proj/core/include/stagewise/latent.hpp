// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stagewise/geometry.hpp"

namespace stagewise {

/// Latent tensor of shape channels x height x width, row-major per channel.
struct LatentState {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> values;

    LatentState() = default;
    LatentState(int c, int h, int w, double fill = 0.0)
        : channels(c), height(h), width(w), values(static_cast<size_t>(c) * h * w, fill) {}

    size_t size() const { return values.size(); }
    Canvas grid() const { return {width, height}; }
    bool same_shape(const LatentState& other) const {
        return channels == other.channels && height == other.height && width == other.width;
    }
    size_t index(int c, int y, int x) const {
        return (static_cast<size_t>(c) * height + y) * width + x;
    }
    double at(int c, int y, int x) const { return values[index(c, y, x)]; }
    double& at(int c, int y, int x) { return values[index(c, y, x)]; }

    bool all_finite() const;
    bool operator==(const LatentState&) const = default;
};

/// 64-bit FNV-1a over the shape and the raw IEEE bytes of every value; equal
/// digests across runs are the determinism check used by replay.
std::uint64_t digest(const LatentState& latent);
std::string digest_hex(const LatentState& latent);

// Trajectory blob layout (little-endian):
//   bytes 0..3   magic "SWLT"
//   u32          format version (1)
//   u32          element width in bytes (8, IEEE double)
//   u32          number of latents S
//   u32 x 3      channels, height, width
//   S * C*H*W    values, latent-major then row-major
inline constexpr std::uint32_t trajectory_blob_version = 1;

void write_trajectory(const std::filesystem::path& path, const std::vector<LatentState>& trajectory);
std::vector<LatentState> read_trajectory(const std::filesystem::path& path);

}  // namespace stagewise
