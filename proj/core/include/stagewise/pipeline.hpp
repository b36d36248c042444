// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stagewise/candidates.hpp"
#include "stagewise/feedback.hpp"
#include "stagewise/guidance.hpp"
#include "stagewise/planner.hpp"
#include "stagewise/port_factory.hpp"

namespace stagewise {

struct RunConfig {
    std::string prompt;
    std::uint64_t seed = 0;
    GuidanceConfig guidance;
    std::vector<double> overlap_ratios = default_overlap_ratios;
    RetryPolicy retry = RetryPolicy::defaults();
    int planner_retries = 3;
    PortSpecs ports;
    /// Empty = keep everything in memory.
    std::filesystem::path out_dir;
    bool save_intermediates = false;

    void validate() const;
};

/// Seed of stage n's initial latent; shared by all attempts and candidates
/// of that stage.
std::uint64_t stage_seed(std::uint64_t run_seed, int n);

struct StageSummary {
    int n = 0;
    SubPrompt subprompt;
    Position position = Position::left;
    int count = 1;
    std::string placement_reply;
    BBox rough_mask;
    bool overlap = false;
    bool overlap_ambiguous = false;
    std::vector<CandidateSummary> candidates;
    std::optional<double> chosen_ratio;
    std::vector<std::string> questions;
    std::vector<FeedbackReport> attempts;
    int chosen_attempt = 0;
    bool passed = false;
    BBox precise_mask;
    bool precise_mask_fallback = false;
    std::vector<std::string> trajectory_digests;
    PlannerTranscript transcript;
    std::vector<std::string> events;
    std::map<std::string, std::string> artifacts;
};

struct RunManifest {
    static constexpr int format_version = 1;

    RunConfig config;
    Canvas canvas;
    ObjectPlan plan;
    PlannerTranscript plan_transcript;
    std::vector<StageSummary> stages;
    std::string status = "ok";  // ok | failed
    std::string error;
    std::string final_image;
};

struct RunResult {
    RunManifest manifest;
    /// Chosen record of every completed stage, in order.
    std::vector<StageRecord> records;
    /// Wall-clock milliseconds per stage; kept out of the manifest.
    std::vector<double> stage_millis;
};

/// Decompose, then for each object: plan, mask, generate (overlap branch
/// when predicted), check and retry. Stage n consumes only stage n-1's
/// record. Errors end the run with status "failed" and the stages done so
/// far; they are not rethrown. With an out_dir, writes the manifest, a
/// separate timing.json and per-stage artifacts.
RunResult run_pipeline(const RunConfig& config, PortSet& ports);

void write_ppm(const std::filesystem::path& path, const Image& image);

}  // namespace stagewise
