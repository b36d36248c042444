// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/http_ports.hpp"

#include <mutex>
#include <thread>

#include <httplib.h>

#include "stagewise/errors.hpp"

namespace stagewise {

nlohmann::json to_json(const LatentState& latent) {
    return {{"channels", latent.channels}, {"height", latent.height}, {"width", latent.width}, {"values", latent.values}};
}

LatentState latent_from_json(const nlohmann::json& j) {
    LatentState z(j.at("channels").get<int>(), j.at("height").get<int>(), j.at("width").get<int>());
    z.values = j.at("values").get<std::vector<double>>();
    require(z.values.size() == static_cast<size_t>(z.channels) * z.height * z.width, "latent values do not match shape");
    return z;
}

nlohmann::json to_json(const Image& image) {
    return {{"channels", image.channels}, {"height", image.height}, {"width", image.width}, {"pixels", image.pixels}};
}

Image image_from_json(const nlohmann::json& j) {
    Image image{j.at("channels").get<int>(), j.at("height").get<int>(), j.at("width").get<int>(),
                j.at("pixels").get<std::vector<double>>()};
    require(image.pixels.size() == static_cast<size_t>(image.channels) * image.height * image.width,
            "image pixels do not match shape");
    return image;
}

nlohmann::json to_json(const AttentionMaps& maps) {
    auto out = nlohmann::json::array();
    for (const auto& b : maps.blocks)
        out.push_back({{"group", std::string(to_string(b.group))},
                       {"width", b.width},
                       {"height", b.height},
                       {"tokens", b.tokens},
                       {"values", b.values}});
    return out;
}

AttentionMaps attention_from_json(const nlohmann::json& j) {
    AttentionMaps maps;
    for (const auto& b : j) {
        BlockAttention block;
        const auto group = block_group_from_string(b.at("group").get<std::string>());
        require(group.has_value(), "unknown attention block group");
        block.group = *group;
        block.width = b.at("width").get<int>();
        block.height = b.at("height").get<int>();
        block.tokens = b.at("tokens").get<int>();
        block.values = b.at("values").get<std::vector<double>>();
        require(block.values.size() == static_cast<size_t>(block.cells()) * block.tokens,
                "attention values do not match shape");
        maps.blocks.push_back(std::move(block));
    }
    return maps;
}

nlohmann::json to_json(const BBox& box) {
    return {{"x", box.x}, {"y", box.y}, {"w", box.w}, {"h", box.h}};
}

BBox bbox_from_json(const nlohmann::json& j) {
    return {j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(), j.at("h").get<int>()};
}

struct HttpEndpoint::Impl {
    std::unique_ptr<httplib::Client> client;
    std::string prefix;
};

HttpEndpoint::HttpEndpoint(const std::string& base_url, int timeout_seconds) : m_impl(std::make_unique<Impl>()) {
    const auto scheme = base_url.find("://");
    require(scheme != std::string::npos, "endpoint '" + base_url + "' lacks a scheme");
    const auto path = base_url.find('/', scheme + 3);
    const std::string host = path == std::string::npos ? base_url : base_url.substr(0, path);
    if (path != std::string::npos)
        m_impl->prefix = base_url.substr(path);
    while (!m_impl->prefix.empty() && m_impl->prefix.back() == '/')
        m_impl->prefix.pop_back();
    m_impl->client = std::make_unique<httplib::Client>(host);
    if (!m_impl->client->is_valid())
        raise(ErrorKind::backend, "unsupported endpoint '" + base_url + "'");
    m_impl->client->set_connection_timeout(10);
    m_impl->client->set_read_timeout(timeout_seconds);
    m_impl->client->set_write_timeout(timeout_seconds);
}

HttpEndpoint::~HttpEndpoint() = default;
HttpEndpoint::HttpEndpoint(HttpEndpoint&&) noexcept = default;
HttpEndpoint& HttpEndpoint::operator=(HttpEndpoint&&) noexcept = default;

namespace {

nlohmann::json decode_response(const httplib::Result& res, const std::string& path) {
    if (!res)
        raise(ErrorKind::backend, path + ": " + httplib::to_string(res.error()));
    nlohmann::json body;
    try {
        body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception&) {
        raise(ErrorKind::backend, path + ": response is not JSON (status " + std::to_string(res->status) + ")");
    }
    if (res->status < 200 || res->status >= 300)
        raise(ErrorKind::backend, path + ": status " + std::to_string(res->status) + ": " + body.value("error", ""));
    return body;
}

}  // namespace

nlohmann::json HttpEndpoint::post(const std::string& path, const nlohmann::json& body) {
    const std::string full = m_impl->prefix + path;
    return decode_response(m_impl->client->Post(full, body.dump(), "application/json"), full);
}

nlohmann::json HttpEndpoint::get(const std::string& path) {
    const std::string full = m_impl->prefix + path;
    return decode_response(m_impl->client->Get(full), full);
}

std::string HttpTextPort::complete(const std::string& prompt) {
    return m_endpoint.post("/v1/complete", {{"prompt", prompt}}).at("text").get<std::string>();
}

std::string HttpVlmPort::ask(const Image& image, const std::string& question) {
    return m_endpoint.post("/v1/ask", {{"image", to_json(image)}, {"question", question}}).at("answer").get<std::string>();
}

double HttpScorerPort::score(const Image& image, const std::string& text) {
    return m_endpoint.post("/v1/score", {{"image", to_json(image)}, {"text", text}}).at("score").get<double>();
}

Canvas HttpDenoiserPort::canvas() {
    if (!m_canvas) {
        const auto info = m_endpoint.get("/v1/denoiser/info");
        m_canvas = Canvas{info.at("width").get<int>(), info.at("height").get<int>()};
    }
    return *m_canvas;
}

LatentState HttpDenoiserPort::initial_latent(std::uint64_t seed) {
    return latent_from_json(m_endpoint.post("/v1/denoiser/initial_latent", {{"seed", seed}}).at("latent"));
}

StepOutput HttpDenoiserPort::step(const LatentState& latent, int t, const std::string& text) {
    const auto res = m_endpoint.post("/v1/denoiser/step", {{"latent", to_json(latent)}, {"t", t}, {"text", text}});
    return {latent_from_json(res.at("latent")), attention_from_json(res.at("attention"))};
}

LatentState HttpDenoiserPort::energy_gradient(const LatentState& latent, int t, const std::string& text,
                                              const BBox& box, int token, BlockGroup group) {
    const auto res = m_endpoint.post("/v1/denoiser/energy_gradient", {{"latent", to_json(latent)},
                                                                      {"t", t},
                                                                      {"text", text},
                                                                      {"bbox", to_json(box)},
                                                                      {"token", token},
                                                                      {"blocks", std::string(to_string(group))}});
    return latent_from_json(res.at("gradient"));
}

Image HttpDenoiserPort::decode(const LatentState& latent) {
    return image_from_json(m_endpoint.post("/v1/denoiser/decode", {{"latent", to_json(latent)}}).at("image"));
}

struct PortServer::Impl {
    Ports ports;
    httplib::Server server;
    std::mutex mutex;
    std::thread thread;
};

PortServer::PortServer(Ports ports) : m_impl(std::make_unique<Impl>()) {
    m_impl->ports = ports;
    auto& srv = m_impl->server;
    Impl* impl = m_impl.get();

    auto handle = [impl](auto&& fn) {
        return [impl, fn](const httplib::Request& req, httplib::Response& res) {
            try {
                std::lock_guard lock(impl->mutex);
                const auto body = req.body.empty() ? nlohmann::json::object() : nlohmann::json::parse(req.body);
                res.set_content(fn(body).dump(), "application/json");
            } catch (const std::exception& e) {
                res.status = 400;
                res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
            }
        };
    };

    if (ports.text) {
        srv.Post("/v1/complete", handle([impl](const nlohmann::json& b) {
            return nlohmann::json{{"text", impl->ports.text->complete(b.at("prompt").get<std::string>())}};
        }));
    }
    if (ports.vlm) {
        srv.Post("/v1/ask", handle([impl](const nlohmann::json& b) {
            return nlohmann::json{
                {"answer", impl->ports.vlm->ask(image_from_json(b.at("image")), b.at("question").get<std::string>())}};
        }));
    }
    if (ports.scorer) {
        srv.Post("/v1/score", handle([impl](const nlohmann::json& b) {
            return nlohmann::json{
                {"score", impl->ports.scorer->score(image_from_json(b.at("image")), b.at("text").get<std::string>())}};
        }));
    }
    if (ports.denoiser) {
        srv.Get("/v1/denoiser/info", handle([impl](const nlohmann::json&) {
            const Canvas c = impl->ports.denoiser->canvas();
            const LatentState probe = impl->ports.denoiser->initial_latent(0);
            return nlohmann::json{{"width", c.width}, {"height", c.height}, {"channels", probe.channels}};
        }));
        srv.Post("/v1/denoiser/initial_latent", handle([impl](const nlohmann::json& b) {
            return nlohmann::json{
                {"latent", to_json(impl->ports.denoiser->initial_latent(b.at("seed").get<std::uint64_t>()))}};
        }));
        srv.Post("/v1/denoiser/step", handle([impl](const nlohmann::json& b) {
            auto out = impl->ports.denoiser->step(latent_from_json(b.at("latent")), b.at("t").get<int>(),
                                                  b.at("text").get<std::string>());
            return nlohmann::json{{"latent", to_json(out.latent)}, {"attention", to_json(out.attention)}};
        }));
        srv.Post("/v1/denoiser/energy_gradient", handle([impl](const nlohmann::json& b) {
            const auto group = block_group_from_string(b.at("blocks").get<std::string>());
            require(group.has_value(), "unknown block group");
            return nlohmann::json{{"gradient", to_json(impl->ports.denoiser->energy_gradient(
                                                   latent_from_json(b.at("latent")), b.at("t").get<int>(),
                                                   b.at("text").get<std::string>(), bbox_from_json(b.at("bbox")),
                                                   b.at("token").get<int>(), *group))}};
        }));
        srv.Post("/v1/denoiser/decode", handle([impl](const nlohmann::json& b) {
            return nlohmann::json{{"image", to_json(impl->ports.denoiser->decode(latent_from_json(b.at("latent"))))}};
        }));
    }
}

PortServer::~PortServer() {
    stop();
}

int PortServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0)
        bound = m_impl->server.bind_to_any_port(host);
    else if (!m_impl->server.bind_to_port(host, port))
        bound = -1;
    if (bound < 0)
        raise(ErrorKind::io, "cannot bind " + host + ":" + std::to_string(port));
    m_impl->thread = std::thread([this] { m_impl->server.listen_after_bind(); });
    m_impl->server.wait_until_ready();
    return bound;
}

void PortServer::stop() {
    if (m_impl->server.is_running())
        m_impl->server.stop();
    if (m_impl->thread.joinable())
        m_impl->thread.join();
}

void PortServer::wait() {
    if (m_impl->thread.joinable())
        m_impl->thread.join();
}

}  // namespace stagewise
