// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stagewise/pipeline.hpp"

namespace stagewise {

nlohmann::json to_json(const GuidanceConfig& config);
GuidanceConfig guidance_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Two-space indented JSON with sorted keys and a trailing newline.
std::string serialize_manifest(const RunManifest& manifest);
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

/// Structural check of a manifest document; returns one message per problem.
std::vector<std::string> validate_manifest(const nlohmann::json& document);

}  // namespace stagewise
