// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "stagewise/pipeline.hpp"

namespace stagewise {

struct ReplayReport {
    bool identical = true;
    int stage = 0;             // 1-based; 0 = run level
    int trajectory_index = -1; // index into the stage trajectory, -1 = not a latent
    int timestep = -1;         // latent timestep at that index (T - index)
    std::string what;

    std::string describe() const;
};

/// Re-executes a mock-port run from its manifest alone and compares plan,
/// placements, masks and every trajectory latent (digests, plus saved blobs
/// when present) stage by stage. Reports the first divergence.
ReplayReport replay_check(const std::filesystem::path& manifest_path);

/// As replay_check, but throws ErrorKind::replay_mismatch on divergence.
RunManifest replay(const std::filesystem::path& manifest_path);

}  // namespace stagewise
