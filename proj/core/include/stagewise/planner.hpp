// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stagewise/geometry.hpp"
#include "stagewise/ports.hpp"

namespace stagewise {

/// Objects in painting order (left to right, bottom to top).
struct ObjectPlan {
    std::string source_prompt;
    std::vector<std::string> objects;

    int size() const { return static_cast<int>(objects.size()); }
};

/// Text of stage n plus the token index of obj_n's head noun in it.
struct SubPrompt {
    int n = 0;
    std::string text;
    int token_index = 0;
};

SubPrompt make_subprompt(const ObjectPlan& plan, int n);

struct TranscriptEntry {
    std::string query;   // template name
    std::string prompt;  // text sent to the port
    std::string reply;   // raw reply
    std::string parsed;  // parsed value, or "<unparsed>"
};
using PlannerTranscript = std::vector<TranscriptEntry>;

struct Placement {
    Position position = Position::left;
    int count = 1;
    std::string raw_position;  // keyword read from the reply before projection
};

struct OverlapJudgement {
    bool overlap = false;
    bool ambiguous = false;
};

inline constexpr int min_object_count = 1;
inline constexpr int max_object_count = 6;

// Pure reply parsers. All nondeterminism lives in the port.

/// Accepts numbered/bulleted lists, line-separated lists and comma lists.
/// Returns nullopt when the reply holds no plausible object list.
std::optional<std::vector<std::string>> parse_object_list(std::string_view reply,
                                                          std::string_view source_prompt);

enum class PositionWord { left, right, top, bottom, none };
std::optional<PositionWord> parse_position_word(std::string_view reply);

/// First-object projection: right -> left, top -> bottom.
std::optional<Position> project_first(PositionWord word);
/// Later-object projection: left -> right, bottom -> top; none -> nullopt.
std::optional<Position> project_next(PositionWord word);

int clamp_count(int count);

/// Builds planner prompts, sends them through a text-completion port and
/// parses the replies. Every port call is appended to the transcript.
/// Instances are single-run state; do not share across threads.
class LlmPlanner {
public:
    explicit LlmPlanner(TextCompletionPort& port, int max_retries = 3);

    ObjectPlan decompose(const std::string& prompt);
    Placement plan_first(const std::string& prompt, const std::string& first_object);
    Placement plan_next(const std::string& prompt, const std::vector<std::string>& prior_objects,
                        const std::string& object);
    OverlapJudgement judge_overlap(const std::string& prompt, const std::string& object,
                                   const std::string& previous_object);

    const PlannerTranscript& transcript() const { return m_transcript; }
    int max_retries() const { return m_max_retries; }

private:
    template <typename T, typename Parse>
    std::optional<T> query(std::string_view name, const std::string& prompt, std::string_view suffix,
                           Parse parse);

    TextCompletionPort& m_port;
    int m_max_retries;
    PlannerTranscript m_transcript;
};

nlohmann::json to_json(const TranscriptEntry& entry);
nlohmann::json to_json(const PlannerTranscript& transcript);

}  // namespace stagewise
