// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stagewise/guidance.hpp"

namespace stagewise {

inline const std::vector<double> default_overlap_ratios{0.1, 0.3, 0.5};

struct Candidate {
    double ratio = 0.0;
    BBox bbox;
    bool clamped = false;
    StageRecord record;
    double score = 0.0;
};

struct CandidateRequest {
    StageRequest stage;  // rough_mask is ignored; each ratio supplies its own
    Position position = Position::right;
    int count = 1;
    std::vector<double> ratios = default_overlap_ratios;
};

struct CandidateSet {
    std::vector<Candidate> candidates;
    std::vector<std::string> events;
};

/// One full stage run per ratio with the overlap-candidate mask. A run that
/// fails numerically is dropped and noted; throws only when all fail.
CandidateSet generate_candidates(const CandidateRequest& request, DenoiserPort& port);

/// Index of the highest score; ties go to the smallest ratio. Independent of
/// input order.
size_t best_candidate_index(std::span<const Candidate> candidates);

/// Scores every candidate's image against the sub-prompt, then picks the best.
size_t select_best(std::vector<Candidate>& candidates, const SubPrompt& subprompt, ScorerPort& scorer);

struct CandidateSummary {
    double ratio = 0.0;
    BBox bbox;
    bool clamped = false;
    double score = 0.0;
};

/// What one generation attempt of a stage produced: the record that moves on
/// plus, on the overlap path, every candidate's score.
struct StageOutcome {
    StageRecord record;
    bool overlap_path = false;
    std::vector<CandidateSummary> candidates;
    std::optional<double> chosen_ratio;
    std::vector<std::string> events;
};

}  // namespace stagewise
