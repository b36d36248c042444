// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/mock/toy_denoiser.hpp"

#include <cmath>
#include <numbers>

#include "stagewise/errors.hpp"
#include "stagewise/guidance.hpp"
#include "stagewise/text.hpp"

namespace stagewise::mock {

std::uint64_t hash_string(const std::string& text, std::uint64_t salt) {
    std::uint64_t h = 1469598103934665603ull ^ (salt * 0x9E3779B97F4A7C15ull);
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t NormalStream::next_u64() {
    std::uint64_t z = (m_state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double NormalStream::uniform() {
    // (0, 1], never zero so the log below is finite
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalStream::next() {
    if (m_has_spare) {
        m_has_spare = false;
        return m_spare;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    m_spare = r * std::sin(theta);
    m_has_spare = true;
    return r * std::cos(theta);
}

ToyDenoiserOptions parse_toy_options(const std::string& text) {
    ToyDenoiserOptions out;
    for (const auto& item : split(text, ',')) {
        const auto kv = trim(item);
        if (kv.empty())
            continue;
        const auto eq = kv.find('=');
        require(eq != std::string::npos, "toy option '" + kv + "' is not key=value");
        const auto key = to_lower(trim(kv.substr(0, eq)));
        const auto value = trim(kv.substr(eq + 1));
        try {
            if (key == "c" || key == "channels") out.channels = std::stoi(value);
            else if (key == "h" || key == "height") out.height = std::stoi(value);
            else if (key == "w" || key == "width") out.width = std::stoi(value);
            else if (key == "seed") out.seed = std::stoull(value);
            else if (key == "noise") out.noise_scale = std::stod(value);
            else if (key == "contraction") out.contraction = std::stod(value);
            else raise(ErrorKind::contract, "unknown toy option '" + key + "'");
        } catch (const std::logic_error&) {
            raise(ErrorKind::contract, "bad value for toy option '" + key + "'");
        }
    }
    return out;
}

ToyDenoiser::ToyDenoiser(ToyDenoiserOptions options) : m_options(options) {
    require(options.channels >= 1 && options.height >= 2 && options.width >= 2, "toy latent too small");
    for (const auto& spec : block_specs)
        require(options.height % spec.pool == 0 && options.width % spec.pool == 0,
                "toy latent grid must be divisible by every block pooling factor");
    require(options.noise_scale >= 0.0 && options.contraction >= 0.0, "toy schedule parameters must be >= 0");
}

void ToyDenoiser::check_shape(const LatentState& latent) const {
    if (latent.channels != m_options.channels || latent.height != m_options.height ||
        latent.width != m_options.width || latent.values.size() != latent.size())
        raise(ErrorKind::contract, "latent shape does not match the toy denoiser");
}

std::vector<double> ToyDenoiser::embedding(const std::string& word, size_t block) const {
    NormalStream rng(hash_string(word, m_options.seed * 131 + block + 1));
    std::vector<double> e(static_cast<size_t>(m_options.channels));
    for (double& v : e)
        v = rng.next();
    return e;
}

std::vector<double> ToyDenoiser::text_prior(const std::string& text) const {
    NormalStream rng(hash_string(text, m_options.seed * 131 + 977));
    std::vector<double> mu(static_cast<size_t>(m_options.channels));
    for (double& v : mu)
        v = 0.1 * rng.next();
    return mu;
}

LatentState ToyDenoiser::initial_latent(std::uint64_t seed) {
    NormalStream rng(seed ^ (m_options.seed << 17));
    LatentState z(m_options.channels, m_options.height, m_options.width);
    for (double& v : z.values)
        v = m_options.noise_scale * rng.next();
    return z;
}

std::vector<double> ToyDenoiser::token_logits(const LatentState& latent, const std::vector<double>& e,
                                              const BlockSpec& spec) const {
    const int f = spec.pool;
    const int gw = latent.width / f;
    const int gh = latent.height / f;
    const double scale = spec.beta / (f * f);
    std::vector<double> s(static_cast<size_t>(gw) * gh, 0.0);
    for (int c = 0; c < latent.channels; ++c) {
        const double w = scale * e[static_cast<size_t>(c)];
        for (int y = 0; y < latent.height; ++y)
            for (int x = 0; x < latent.width; ++x)
                s[static_cast<size_t>(y / f) * gw + x / f] += w * latent.at(c, y, x);
    }
    return s;
}

namespace {

void softmax_inplace(std::vector<double>& s) {
    double mx = s.front();
    for (double v : s)
        mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : s) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : s)
        v /= sum;
}

}  // namespace

AttentionMaps ToyDenoiser::attention(const LatentState& latent, const std::string& text) const {
    check_shape(latent);
    const auto tokens = words(text);
    require(!tokens.empty(), "text has no tokens");
    AttentionMaps maps;
    for (size_t j = 0; j < block_specs.size(); ++j) {
        const auto& spec = block_specs[j];
        BlockAttention block;
        block.group = spec.group;
        block.width = latent.width / spec.pool;
        block.height = latent.height / spec.pool;
        block.tokens = static_cast<int>(tokens.size());
        block.values.assign(static_cast<size_t>(block.cells()) * block.tokens, 0.0);
        for (int k = 0; k < block.tokens; ++k) {
            auto a = token_logits(latent, embedding(tokens[static_cast<size_t>(k)], j), spec);
            softmax_inplace(a);
            for (int m = 0; m < block.cells(); ++m)
                block.values[static_cast<size_t>(m) * block.tokens + k] = a[static_cast<size_t>(m)];
        }
        maps.blocks.push_back(std::move(block));
    }
    return maps;
}

StepOutput ToyDenoiser::step(const LatentState& latent, int t, const std::string& text) {
    check_shape(latent);
    require(t >= 1, "timestep must be >= 1");
    StepOutput out{latent, attention(latent, text)};
    const double a = static_cast<double>(t) / (t + m_options.contraction);
    const auto mu = text_prior(text);
    const size_t plane = static_cast<size_t>(latent.height) * latent.width;
    for (size_t i = 0; i < out.latent.values.size(); ++i)
        out.latent.values[i] = a * latent.values[i] + (1.0 - a) * mu[i / plane];
    return out;
}

LatentState ToyDenoiser::energy_gradient(const LatentState& latent, int, const std::string& text, const BBox& box,
                                         int token, BlockGroup group) {
    return static_cast<const ToyDenoiser&>(*this).energy_gradient(latent, text, box, token, group);
}

LatentState ToyDenoiser::energy_gradient(const LatentState& latent, const std::string& text, const BBox& box,
                                         int token, BlockGroup group) const {
    check_shape(latent);
    const auto tokens = words(text);
    require(token >= 0 && token < static_cast<int>(tokens.size()), "token index out of range");
    const Canvas grid = latent.grid();
    LatentState grad(latent.channels, latent.height, latent.width);

    for (size_t j = 0; j < block_specs.size(); ++j) {
        const auto& spec = block_specs[j];
        if (spec.group != group)
            continue;
        const int f = spec.pool;
        const int gw = latent.width / f;
        const int gh = latent.height / f;
        const auto e = embedding(tokens[static_cast<size_t>(token)], j);
        auto a = token_logits(latent, e, spec);
        softmax_inplace(a);

        const BinaryMask inside = indicator_mask(box, grid, {gw, gh});
        double rho = 0.0;
        for (size_t m = 0; m < a.size(); ++m)
            if (inside.cells[m])
                rho += a[m];

        // E = (1 - rho)^2, d rho / d s_m = a_m (1[m in box] - rho)
        std::vector<double> g(a.size());
        for (size_t m = 0; m < a.size(); ++m)
            g[m] = -2.0 * (1.0 - rho) * a[m] * (static_cast<double>(inside.cells[m]) - rho);

        const double scale = spec.beta / (f * f);
        for (int c = 0; c < latent.channels; ++c) {
            const double w = scale * e[static_cast<size_t>(c)];
            for (int y = 0; y < latent.height; ++y)
                for (int x = 0; x < latent.width; ++x)
                    grad.at(c, y, x) += w * g[static_cast<size_t>(y / f) * gw + x / f];
        }
    }
    return grad;
}

double ToyDenoiser::energy(const LatentState& latent, const std::string& text, const BBox& box, int token,
                           BlockGroup group) const {
    return attention_energy(attention(latent, text), box, latent.grid(), token, group).total;
}

Image ToyDenoiser::decode(const LatentState& latent) {
    check_shape(latent);
    return {latent.channels, latent.height, latent.width, latent.values};
}

LatentState ToyDenoiser::latent_from_image(const Image& image) const {
    LatentState z(image.channels, image.height, image.width);
    require(image.pixels.size() == z.size(), "image buffer does not match its shape");
    z.values = image.pixels;
    check_shape(z);
    return z;
}

}  // namespace stagewise::mock
