// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/mock/mock_scorer.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "stagewise/errors.hpp"
#include "stagewise/guidance.hpp"
#include "stagewise/text.hpp"

namespace stagewise::mock {

std::vector<ScoreTarget> parse_score_targets(const std::string& text) {
    std::vector<ScoreTarget> out;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        auto fail = [&](const std::string& what) {
            raise(ErrorKind::contract, "scorer fixture line " + std::to_string(number) + ": " + what);
        };
        if (!line.starts_with("target "))
            fail("expected 'target'");
        std::string rest = trim(std::string_view(line).substr(7));
        ScoreTarget target;
        if (rest.starts_with("*")) {
            rest = rest.substr(1);
        } else if (rest.starts_with("\"")) {
            size_t end = 1;
            while (end < rest.size() && rest[end] != '"')
                end += rest[end] == '\\' ? 2 : 1;
            if (end >= rest.size())
                fail("unterminated string");
            try {
                target.text = nlohmann::json::parse(rest.substr(0, end + 1)).get<std::string>();
            } catch (const nlohmann::json::exception&) {
                fail("bad string escape");
            }
            rest = rest.substr(end + 1);
        } else {
            fail("expected a quoted text or *");
        }
        std::istringstream fields(rest);
        if (!(fields >> target.x >> target.y))
            fail("expected x and y");
        std::string keyword;
        if (fields >> keyword) {
            int k = 0;
            if (keyword != "token" || !(fields >> k))
                fail("expected 'token <k>'");
            target.token = k;
        }
        out.push_back(std::move(target));
    }
    return out;
}

Centroid centroid(const ScalarGrid& map) {
    double mass = 0.0, sx = 0.0, sy = 0.0;
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            const double v = map.at(x, y);
            mass += v;
            sx += v * x;
            sy += v * y;
        }
    require(mass > 0.0, "centroid of a map without mass");
    return {sx / mass, sy / mass};
}

MockScorer::MockScorer(ToyDenoiser denoiser, std::vector<ScoreTarget> targets, BlockGroup group)
    : m_denoiser(std::move(denoiser)), m_targets(std::move(targets)), m_group(group) {}

const ScoreTarget& MockScorer::target_for(const std::string& text) const {
    const ScoreTarget* wildcard = nullptr;
    for (const auto& t : m_targets) {
        if (t.text.empty()) {
            if (!wildcard)
                wildcard = &t;
        } else if (t.text == text) {
            return t;
        }
    }
    if (!wildcard)
        raise(ErrorKind::contract, "mock scorer has no target for '" + text + "'");
    return *wildcard;
}

int MockScorer::token_for(const std::string& text) const {
    const auto& target = target_for(text);
    if (target.token)
        return *target.token;
    const auto cut = text.find(" and ");
    return head_token_index(cut == std::string::npos ? text : text.substr(0, cut));
}

Centroid MockScorer::attention_centroid(const Image& image, const std::string& text) const {
    const LatentState latent = m_denoiser.latent_from_image(image);
    const AttentionMaps maps = m_denoiser.attention(latent, text);
    return centroid(mean_token_map(maps, m_group, token_for(text), latent.grid()));
}

double MockScorer::score(const Image& image, const std::string& text) {
    const auto& target = target_for(text);
    const Centroid c = attention_centroid(image, text);
    const double dx = c.x - target.x;
    const double dy = c.y - target.y;
    return -(dx * dx + dy * dy);
}

}  // namespace stagewise::mock
