// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/port_factory.hpp"

#include <fstream>
#include <sstream>

#include "stagewise/errors.hpp"
#include "stagewise/http_ports.hpp"
#include "stagewise/mock/mock_scorer.hpp"
#include "stagewise/mock/scripted_ports.hpp"
#include "stagewise/mock/toy_denoiser.hpp"

namespace stagewise {

namespace {

constexpr std::string_view kMockPrefix = "mock:";

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        raise(ErrorKind::io, "cannot open fixture " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string fixture_text(const PortSpecs& specs, const std::string& role, const std::string& spec) {
    if (auto it = specs.fixtures.find(role); it != specs.fixtures.end())
        return it->second;
    return read_file(spec.substr(kMockPrefix.size()));
}

bool is_toy_spec(const std::string& spec) {
    return spec == "toy" || spec.starts_with("toy:");
}

mock::ToyDenoiserOptions toy_options(const std::string& spec) {
    return spec == "toy" ? mock::ToyDenoiserOptions{} : mock::parse_toy_options(spec.substr(4));
}

}  // namespace

bool is_mock_spec(const std::string& spec) {
    return spec.starts_with(kMockPrefix);
}

bool is_http_spec(const std::string& spec) {
    return spec.starts_with("http://") || spec.starts_with("https://");
}

void PortSpecs::load_fixtures() {
    const std::pair<const char*, const std::string*> roles[] = {
        {"planner", &planner}, {"checker", &checker}, {"scorer", &scorer}};
    for (const auto& [role, spec] : roles)
        if (is_mock_spec(*spec) && !fixtures.contains(role))
            fixtures[role] = read_file(spec->substr(kMockPrefix.size()));
}

bool PortSpecs::all_mock() const {
    return is_toy_spec(backend) && is_mock_spec(planner) && !is_http_spec(checker) && !is_http_spec(scorer);
}

std::unique_ptr<VlmPort> make_vlm(const std::string& spec, const std::string* fixture) {
    if (spec == "always-yes")
        return std::make_unique<mock::AlwaysYesVlm>();
    if (is_mock_spec(spec)) {
        const std::string text = fixture ? *fixture : read_file(spec.substr(kMockPrefix.size()));
        return std::make_unique<mock::ScriptedVlm>(mock::ScriptedReplySet::parse(text));
    }
    if (is_http_spec(spec))
        return std::make_unique<HttpVlmPort>(spec);
    raise(ErrorKind::contract, "unknown checker spec '" + spec + "'");
}

PortSet make_ports(const PortSpecs& specs) {
    PortSet ports;

    if (is_toy_spec(specs.backend))
        ports.denoiser = std::make_unique<mock::ToyDenoiser>(toy_options(specs.backend));
    else if (is_http_spec(specs.backend))
        ports.denoiser = std::make_unique<HttpDenoiserPort>(specs.backend);
    else
        raise(ErrorKind::contract, "unknown backend spec '" + specs.backend + "'");

    if (is_mock_spec(specs.planner))
        ports.planner = std::make_unique<mock::ScriptedTextPort>(
            mock::ScriptedReplySet::parse(fixture_text(specs, "planner", specs.planner)));
    else if (is_http_spec(specs.planner))
        ports.planner = std::make_unique<HttpTextPort>(specs.planner);
    else
        raise(ErrorKind::contract, "unknown planner spec '" + specs.planner + "'");

    if (is_mock_spec(specs.checker)) {
        const std::string text = fixture_text(specs, "checker", specs.checker);
        ports.checker = make_vlm(specs.checker, &text);
    } else {
        ports.checker = make_vlm(specs.checker);
    }

    if (specs.scorer == "constant") {
        ports.scorer = std::make_unique<mock::ConstantScorer>();
    } else if (is_mock_spec(specs.scorer)) {
        if (!is_toy_spec(specs.backend))
            raise(ErrorKind::contract, "the mock scorer reads toy-backend images; use backend 'toy'");
        ports.scorer = std::make_unique<mock::MockScorer>(
            mock::ToyDenoiser(toy_options(specs.backend)),
            mock::parse_score_targets(fixture_text(specs, "scorer", specs.scorer)));
    } else if (is_http_spec(specs.scorer)) {
        ports.scorer = std::make_unique<HttpScorerPort>(specs.scorer);
    } else {
        raise(ErrorKind::contract, "unknown scorer spec '" + specs.scorer + "'");
    }
    return ports;
}

nlohmann::json to_json(const PortSpecs& specs) {
    return {{"backend", specs.backend},
            {"planner", specs.planner},
            {"checker", specs.checker},
            {"scorer", specs.scorer},
            {"fixtures", specs.fixtures}};
}

PortSpecs port_specs_from_json(const nlohmann::json& j) {
    PortSpecs specs;
    specs.backend = j.at("backend").get<std::string>();
    specs.planner = j.at("planner").get<std::string>();
    specs.checker = j.at("checker").get<std::string>();
    specs.scorer = j.at("scorer").get<std::string>();
    specs.fixtures = j.value("fixtures", std::map<std::string, std::string>{});
    return specs;
}

}  // namespace stagewise
