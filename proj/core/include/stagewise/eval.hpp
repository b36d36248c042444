// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stagewise/planner.hpp"
#include "stagewise/ports.hpp"

namespace stagewise {

enum class Aspect { completeness, attribute, spatial };
inline constexpr std::array<Aspect, 3> all_aspects{Aspect::completeness, Aspect::attribute, Aspect::spatial};

std::string_view to_string(Aspect aspect);

struct Question {
    Aspect aspect = Aspect::completeness;
    std::string text;
};

struct Questionnaire {
    std::string prompt;
    std::vector<Question> questions;

    size_t count(Aspect aspect) const;
};

/// A relation stated in a prompt between two planned objects.
struct StatedRelation {
    std::string subject;
    std::string phrase;
    std::string object;
};

/// Relation phrases in the order they are tried (longest first).
const std::vector<std::string>& relation_phrases();

/// Relations found in `prompt`. The subject is the nearest planned object
/// whose head noun precedes the phrase, the object the nearest one after it.
std::vector<StatedRelation> find_relations(std::string_view prompt, const std::vector<std::string>& objects);

/// Fallback object split when no plan is available: cut at relation phrases,
/// "and" and commas, then drop copulas.
std::vector<std::string> split_objects(std::string_view prompt);

/// One presence question per object, one binding question per attribute
/// word, one spatial question per stated relation.
Questionnaire build_questionnaire(const std::string& prompt, const ObjectPlan& plan);

struct JudgedAnswer {
    size_t item = 0;
    Aspect aspect = Aspect::completeness;
    std::string question;
    std::string reply;
    bool yes = false;
    /// Set when the judge failed or the reply did not lead with yes/no.
    bool flagged = false;
    std::string note;
};

struct AspectTally {
    int yes = 0;
    int total = 0;

    /// nullopt when no question of this aspect was asked.
    std::optional<double> percent() const;
};

struct AspectScores {
    std::array<AspectTally, 3> aspects{};
    AspectTally overall;

    const AspectTally& at(Aspect a) const { return aspects[static_cast<size_t>(a)]; }
};

struct EvalResult {
    AspectScores scores;
    std::vector<JudgedAnswer> answers;
};

/// Asks every question of questionnaires[i] about images[i]. A judge error
/// counts as "no" and is flagged. Aspects without questions are left out of
/// the overall denominator.
EvalResult evaluate(std::span<const Image> images, std::span<const Questionnaire> questionnaires, VlmPort& judge);

AspectScores aggregate(std::span<const JudgedAnswer> answers);

/// Plain-text table: Objects | Attributes | Spatial | Overall.
std::string format_report(const AspectScores& scores, const std::string& title = "run");

nlohmann::json to_json(const AspectScores& scores);
nlohmann::json to_json(const EvalResult& result);

struct PromptEntry {
    std::string image;
    std::string prompt;
    std::vector<std::string> objects;  // empty = use split_objects
};

/// Tab-separated lines: image, prompt, optional "obj1|obj2|...".
/// Blank lines and lines starting with '#' are skipped.
std::vector<PromptEntry> parse_prompt_list(std::string_view text);

/// Binary PPM (P6, maxval 255) as a 3-channel image with values in [0, 1].
Image read_ppm(const std::filesystem::path& path);

}  // namespace stagewise
