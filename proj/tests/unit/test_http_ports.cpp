// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stagewise/errors.hpp"
#include "stagewise/http_ports.hpp"
#include "stagewise/mock/mock_scorer.hpp"
#include "stagewise/mock/scripted_ports.hpp"
#include "stagewise/mock/toy_denoiser.hpp"

using namespace stagewise;
using namespace stagewise::mock;

namespace {

struct Served {
    ToyDenoiser toy;
    ScriptedTextPort text{ScriptedReplySet::parse("contains \"ping\" => \"pong\"\n")};
    ScriptedVlm vlm{ScriptedReplySet::parse("any * => \"Yes, clearly.\"\n")};
    MockScorer scorer{toy, parse_score_targets("target * 7.5 7.5\n")};
    PortServer server{{&text, &vlm, &scorer, &toy}};
    std::string url;

    Served() { url = "http://127.0.0.1:" + std::to_string(server.start("127.0.0.1", 0)); }
    ~Served() { server.stop(); }
};

}  // namespace

TEST(HttpPorts, TextAndVlm) {
    Served s;
    HttpTextPort text(s.url);
    EXPECT_EQ(text.complete("ping?"), "pong");
    HttpVlmPort vlm(s.url);
    EXPECT_EQ(vlm.ask(Image{1, 1, 1, {0.5}}, "anything?"), "Yes, clearly.");
}

TEST(HttpPorts, ScriptExhaustionSurfacesAsBackendError) {
    Served s;
    HttpTextPort text(s.url);
    EXPECT_EQ(text.complete("ping"), "pong");
    try {
        text.complete("ping");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::backend);
    }
}

TEST(HttpPorts, DenoiserIsBitExactOverTheWire) {
    Served s;
    HttpDenoiserPort remote(s.url);
    EXPECT_EQ(remote.canvas(), (Canvas{16, 16}));
    const auto z = remote.initial_latent(17);
    EXPECT_EQ(z, s.toy.initial_latent(17));
    const auto a = remote.step(z, 9, "orange pumpkin and black door");
    const auto b = s.toy.step(z, 9, "orange pumpkin and black door");
    EXPECT_EQ(a.latent, b.latent);
    ASSERT_EQ(a.attention.blocks.size(), b.attention.blocks.size());
    for (size_t j = 0; j < a.attention.blocks.size(); ++j) {
        EXPECT_EQ(a.attention.blocks[j].values, b.attention.blocks[j].values);
        EXPECT_EQ(a.attention.blocks[j].group, b.attention.blocks[j].group);
    }
    const BBox box{2, 3, 7, 9};
    EXPECT_EQ(remote.energy_gradient(z, 9, "black door", box, 1, BlockGroup::near_output),
              s.toy.energy_gradient(z, 9, "black door", box, 1, BlockGroup::near_output));
    EXPECT_EQ(remote.decode(z), s.toy.decode(z));
}

TEST(HttpPorts, Scorer) {
    Served s;
    HttpScorerPort remote(s.url);
    const Image img = s.toy.decode(LatentState(4, 16, 16));
    EXPECT_EQ(remote.score(img, "door"), s.scorer.score(img, "door"));
}

TEST(HttpPorts, UnreachableIsBackendError) {
    HttpTextPort text("http://127.0.0.1:1");
    try {
        text.complete("x");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::backend);
    }
}

TEST(HttpPorts, JsonConvertersRoundTrip) {
    std::mt19937_64 rng(4);
    const auto z = oracle::random_latent(rng, 2, 3, 5);
    EXPECT_EQ(latent_from_json(nlohmann::json::parse(to_json(z).dump())), z);
    const BBox b{1, 2, 3, 4};
    EXPECT_EQ(bbox_from_json(to_json(b)), b);
}
