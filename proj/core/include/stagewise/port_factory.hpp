// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "stagewise/ports.hpp"

namespace stagewise {

// Port spec strings:
//   backend : toy | toy:<k=v,...> | http://host:port[/prefix]
//   planner : mock:<fixture> | http://...
//   checker : always-yes | mock:<fixture> | http://...
//   scorer  : constant | mock:<fixture> | http://...   (mock needs the toy backend)
struct PortSpecs {
    std::string backend = "toy";
    std::string planner;
    std::string checker = "always-yes";
    std::string scorer = "constant";
    /// Fixture texts keyed by role ("planner", "checker", "scorer"); filled
    /// by load_fixtures() so a manifest can rebuild mock ports on its own.
    std::map<std::string, std::string> fixtures;

    void load_fixtures();
    bool all_mock() const;
    bool operator==(const PortSpecs&) const = default;
};

bool is_mock_spec(const std::string& spec);
bool is_http_spec(const std::string& spec);

struct PortSet {
    std::unique_ptr<DenoiserPort> denoiser;
    std::unique_ptr<TextCompletionPort> planner;
    std::unique_ptr<VlmPort> checker;
    std::unique_ptr<ScorerPort> scorer;
};

PortSet make_ports(const PortSpecs& specs);

std::unique_ptr<VlmPort> make_vlm(const std::string& spec, const std::string* fixture_text = nullptr);

nlohmann::json to_json(const PortSpecs& specs);
PortSpecs port_specs_from_json(const nlohmann::json& j);

}  // namespace stagewise
