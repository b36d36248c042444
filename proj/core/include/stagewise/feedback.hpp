// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stagewise/candidates.hpp"
#include "stagewise/guidance.hpp"
#include "stagewise/text.hpp"

namespace stagewise {

/// Adjustment applied to the base config on a retry. Shifts are fractions of
/// the step count T, rounded to whole steps.
struct ConfigDelta {
    double eta_scale = 1.0;
    double combine_shift = 0.0;  // T* += combine_shift * T
    double guide_shift = 0.0;    // T' += guide_shift * T (negative = more guided steps)
    int iters_delta = 0;
    std::optional<BlockGroup> blocks;

    std::string describe() const;
};

/// Applies `delta` to `base` and clamps the result back into the valid range.
GuidanceConfig apply_delta(const GuidanceConfig& base, const ConfigDelta& delta);

struct RetryPolicy {
    int max_retries = 2;
    /// schedule[i] drives attempt i + 1.
    std::vector<ConfigDelta> schedule;

    static RetryPolicy defaults();
    void validate() const;
};

struct Verdict {
    std::string question;
    std::string answer;
    bool yes = false;
    bool ambiguous = false;
};

struct FeedbackReport {
    int attempt = 0;
    std::vector<Verdict> verdicts;
    bool passed = false;
    std::string adjustment;  // empty for the base attempt
    std::string failure;     // set when the attempt could not be generated

    int yes_count() const;
};

/// Relation of the stage object to the previous one, when n > 1.
struct StageRelation {
    std::string previous_object;
    Position position = Position::right;
};

/// Yes/no questions: presence of the object, one per attribute word, and the
/// planned relation to the previous object.
std::vector<std::string> build_stage_questions(const std::string& object,
                                               const std::optional<StageRelation>& relation);

std::string presence_question(const std::string& object);
std::vector<std::string> attribute_questions(const std::string& object);
std::string relation_question(const std::string& subject, const std::string& relation, const std::string& object);

/// One ask() per question; passed iff every answer leads with "yes".
FeedbackReport inspect_stage(const Image& image, const std::vector<std::string>& questions, VlmPort& vlm,
                             int attempt = 0);

using StageGenerator = std::function<StageOutcome(const GuidanceConfig& config, int attempt)>;

struct FeedbackResult {
    StageOutcome outcome;
    int chosen_attempt = 0;
    bool passed = false;
    std::vector<FeedbackReport> reports;
};

/// Attempt 0 runs `base`; attempt i > 0 runs apply_delta(base, schedule[i-1]).
/// Stops at the first pass. If all attempts fail, keeps the one with the most
/// yes verdicts (earliest on ties). Attempts that fail numerically count as
/// failed attempts; other errors propagate.
FeedbackResult run_stage_with_feedback(const StageGenerator& generate, const std::vector<std::string>& questions,
                                       VlmPort& vlm, const RetryPolicy& policy, const GuidanceConfig& base);

nlohmann::json to_json(const FeedbackReport& report);
nlohmann::json to_json(const ConfigDelta& delta);
ConfigDelta config_delta_from_json(const nlohmann::json& j);

}  // namespace stagewise
