// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "stagewise/ports.hpp"

namespace stagewise {

// JSON-over-HTTP wire format for remote model services. Every endpoint is a
// POST with a JSON body, except /v1/denoiser/info (GET).
//
//   /v1/complete                 {prompt}                         -> {text}
//   /v1/ask                      {image, question}                -> {answer}
//   /v1/score                    {image, text}                    -> {score}
//   /v1/denoiser/info            -                                -> {width, height, channels}
//   /v1/denoiser/initial_latent  {seed}                           -> {latent}
//   /v1/denoiser/step            {latent, t, text}                -> {latent, attention}
//   /v1/denoiser/energy_gradient {latent, t, text, bbox, token, blocks} -> {gradient}
//   /v1/denoiser/decode          {latent}                         -> {image}
//
// latent := {channels, height, width, values[]}
// image  := {channels, height, width, pixels[]}
// attention := [{group, width, height, tokens, values[]}]  (values[m*tokens+k])
// bbox   := {x, y, w, h}
// Errors are reported with a non-2xx status and {error}.

nlohmann::json to_json(const LatentState& latent);
LatentState latent_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Image& image);
Image image_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AttentionMaps& maps);
AttentionMaps attention_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BBox& box);
BBox bbox_from_json(const nlohmann::json& j);

/// Shared HTTP client for one base URL ("http://host:port[/prefix]").
class HttpEndpoint {
public:
    explicit HttpEndpoint(const std::string& base_url, int timeout_seconds = 300);
    ~HttpEndpoint();
    HttpEndpoint(HttpEndpoint&&) noexcept;
    HttpEndpoint& operator=(HttpEndpoint&&) noexcept;

    nlohmann::json post(const std::string& path, const nlohmann::json& body);
    nlohmann::json get(const std::string& path);

private:
    struct Impl;
    std::unique_ptr<Impl> m_impl;
};

class HttpTextPort : public TextCompletionPort {
public:
    explicit HttpTextPort(const std::string& base_url) : m_endpoint(base_url) {}
    std::string complete(const std::string& prompt) override;

private:
    HttpEndpoint m_endpoint;
};

class HttpVlmPort : public VlmPort {
public:
    explicit HttpVlmPort(const std::string& base_url) : m_endpoint(base_url) {}
    std::string ask(const Image& image, const std::string& question) override;

private:
    HttpEndpoint m_endpoint;
};

class HttpScorerPort : public ScorerPort {
public:
    explicit HttpScorerPort(const std::string& base_url) : m_endpoint(base_url) {}
    double score(const Image& image, const std::string& text) override;

private:
    HttpEndpoint m_endpoint;
};

class HttpDenoiserPort : public DenoiserPort {
public:
    explicit HttpDenoiserPort(const std::string& base_url) : m_endpoint(base_url) {}

    Canvas canvas() override;
    LatentState initial_latent(std::uint64_t seed) override;
    StepOutput step(const LatentState& latent, int t, const std::string& text) override;
    LatentState energy_gradient(const LatentState& latent, int t, const std::string& text, const BBox& box, int token,
                                BlockGroup group) override;
    Image decode(const LatentState& latent) override;

private:
    HttpEndpoint m_endpoint;
    std::optional<Canvas> m_canvas;
};

/// Serves any subset of ports over the wire format above. Calls into the
/// ports are serialized. Used for tests and to expose mock backends.
class PortServer {
public:
    struct Ports {
        TextCompletionPort* text = nullptr;
        VlmPort* vlm = nullptr;
        ScorerPort* scorer = nullptr;
        DenoiserPort* denoiser = nullptr;
    };

    explicit PortServer(Ports ports);
    ~PortServer();

    /// Binds and starts serving in a background thread; port 0 picks a free
    /// port. Returns the bound port.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    void stop();
    /// Blocks until stop() is called from another thread or a signal.
    void wait();

private:
    struct Impl;
    std::unique_ptr<Impl> m_impl;
};

}  // namespace stagewise
