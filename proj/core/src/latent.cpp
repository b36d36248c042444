// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/latent.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "stagewise/errors.hpp"

namespace stagewise {

static_assert(std::endian::native == std::endian::little, "blob I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic{'S', 'W', 'L', 'T'};

void put_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in)
        raise(ErrorKind::io, "truncated trajectory blob header");
    return v;
}

}  // namespace

bool LatentState::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v))
            return false;
    return true;
}

std::uint64_t digest(const LatentState& latent) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    const std::array<std::int32_t, 3> shape{latent.channels, latent.height, latent.width};
    mix(shape.data(), sizeof shape);
    mix(latent.values.data(), latent.values.size() * sizeof(double));
    return h;
}

std::string digest_hex(const LatentState& latent) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << digest(latent);
    return s.str();
}

void write_trajectory(const std::filesystem::path& path, const std::vector<LatentState>& trajectory) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        raise(ErrorKind::io, "cannot open " + path.string() + " for writing");
    const LatentState empty;
    const LatentState& shape = trajectory.empty() ? empty : trajectory.front();
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, trajectory_blob_version);
    put_u32(out, sizeof(double));
    put_u32(out, static_cast<std::uint32_t>(trajectory.size()));
    put_u32(out, static_cast<std::uint32_t>(shape.channels));
    put_u32(out, static_cast<std::uint32_t>(shape.height));
    put_u32(out, static_cast<std::uint32_t>(shape.width));
    for (const auto& latent : trajectory) {
        require(latent.same_shape(shape), "trajectory latents must share one shape");
        out.write(reinterpret_cast<const char*>(latent.values.data()),
                  static_cast<std::streamsize>(latent.values.size() * sizeof(double)));
    }
    if (!out)
        raise(ErrorKind::io, "failed writing " + path.string());
}

std::vector<LatentState> read_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise(ErrorKind::io, "cannot open " + path.string());
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic)
        raise(ErrorKind::io, path.string() + " is not a trajectory blob");
    const std::uint32_t version = get_u32(in);
    if (version != trajectory_blob_version)
        raise(ErrorKind::io, "unsupported trajectory blob version " + std::to_string(version));
    if (get_u32(in) != sizeof(double))
        raise(ErrorKind::io, "unsupported element width in " + path.string());
    const std::uint32_t count = get_u32(in);
    const auto c = static_cast<int>(get_u32(in));
    const auto h = static_cast<int>(get_u32(in));
    const auto w = static_cast<int>(get_u32(in));

    std::vector<LatentState> trajectory;
    trajectory.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        LatentState latent(c, h, w);
        in.read(reinterpret_cast<char*>(latent.values.data()),
                static_cast<std::streamsize>(latent.values.size() * sizeof(double)));
        if (!in)
            raise(ErrorKind::io, "truncated trajectory blob " + path.string());
        trajectory.push_back(std::move(latent));
    }
    return trajectory;
}

}  // namespace stagewise
