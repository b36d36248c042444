// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stagewise {

std::string ConfigDelta::describe() const {
    std::ostringstream s;
    s << "eta x" << eta_scale;
    if (combine_shift != 0.0)
        s << ", T* " << (combine_shift > 0 ? "+" : "") << combine_shift << "T";
    if (guide_shift != 0.0)
        s << ", T' " << (guide_shift > 0 ? "+" : "") << guide_shift << "T";
    if (iters_delta != 0)
        s << ", iters " << (iters_delta > 0 ? "+" : "") << iters_delta;
    if (blocks)
        s << ", blocks " << to_string(*blocks);
    return s.str();
}

GuidanceConfig apply_delta(const GuidanceConfig& base, const ConfigDelta& delta) {
    GuidanceConfig out = base;
    const auto shift = [&](double fraction) { return static_cast<int>(std::lround(fraction * base.steps)); };
    if (delta.eta_scale > 0.0 && std::isfinite(delta.eta_scale))
        out.eta = base.eta * delta.eta_scale;
    out.combine_until = std::clamp(base.combine_until + shift(delta.combine_shift), 0, base.steps);
    out.guide_until = std::clamp(base.guide_until + shift(delta.guide_shift), 0, base.steps);
    out.guidance_iters = std::max(1, base.guidance_iters + delta.iters_delta);
    if (delta.blocks)
        out.blocks = *delta.blocks;
    return out;
}

RetryPolicy RetryPolicy::defaults() {
    RetryPolicy p;
    p.max_retries = 2;
    p.schedule = {
        {1.5, 0.1, 0.0, 0, std::nullopt},
        {2.0, 0.2, -0.1, 0, std::nullopt},
    };
    return p;
}

void RetryPolicy::validate() const {
    require(max_retries >= 0, "max_retries must be >= 0");
    require(schedule.size() >= static_cast<size_t>(max_retries), "retry schedule shorter than max_retries");
    for (const auto& d : schedule)
        require(d.eta_scale > 0.0 && std::isfinite(d.eta_scale), "retry eta scale must be positive");
}

int FeedbackReport::yes_count() const {
    return static_cast<int>(std::count_if(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.yes; }));
}

namespace {

std::string indefinite(const std::string& noun) {
    if (!noun.empty() && std::string_view("aeiou").find(noun.front()) != std::string_view::npos)
        return "an " + noun;
    return "a " + noun;
}

}  // namespace

std::string presence_question(const std::string& object) {
    return "Is there " + indefinite(head_noun(object)) + " in the image?";
}

std::vector<std::string> attribute_questions(const std::string& object) {
    std::vector<std::string> out;
    const std::string head = head_noun(object);
    for (const auto& attr : attribute_words(object))
        out.push_back("Is the " + head + " " + attr + "?");
    return out;
}

std::string relation_question(const std::string& subject, const std::string& relation, const std::string& object) {
    return "Is the " + head_noun(subject) + " " + relation + " the " + head_noun(object) + "?";
}

std::vector<std::string> build_stage_questions(const std::string& object,
                                               const std::optional<StageRelation>& relation) {
    std::vector<std::string> out{presence_question(object)};
    for (auto& q : attribute_questions(object))
        out.push_back(std::move(q));
    if (relation) {
        const std::string phrase = relation->position == Position::right ? "on the right side of" : "above";
        out.push_back(relation_question(object, phrase, relation->previous_object));
    }
    return out;
}

FeedbackReport inspect_stage(const Image& image, const std::vector<std::string>& questions, VlmPort& vlm,
                             int attempt) {
    FeedbackReport report;
    report.attempt = attempt;
    for (const auto& q : questions) {
        Verdict v{q, vlm.ask(image, q)};
        const YesNo parsed = parse_yes_no(v.answer);
        v.yes = parsed == YesNo::yes;
        v.ambiguous = parsed == YesNo::ambiguous;
        report.verdicts.push_back(std::move(v));
    }
    report.passed = std::all_of(report.verdicts.begin(), report.verdicts.end(), [](const Verdict& v) { return v.yes; });
    return report;
}

FeedbackResult run_stage_with_feedback(const StageGenerator& generate, const std::vector<std::string>& questions,
                                       VlmPort& vlm, const RetryPolicy& policy, const GuidanceConfig& base) {
    policy.validate();
    base.validate();

    FeedbackResult result;
    std::optional<StageOutcome> best;
    int best_yes = -1;
    std::optional<Error> last_failure;

    for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
        GuidanceConfig config = base;
        std::string adjustment;
        if (attempt > 0) {
            const ConfigDelta& delta = policy.schedule[static_cast<size_t>(attempt - 1)];
            config = apply_delta(base, delta);
            adjustment = delta.describe();
        }

        std::optional<StageOutcome> outcome;
        FeedbackReport report;
        try {
            outcome = generate(config, attempt);
            report = inspect_stage(outcome->record.image, questions, vlm, attempt);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numeric)
                throw;
            last_failure = e;
            report.attempt = attempt;
            report.failure = e.what();
        }
        report.adjustment = adjustment;
        result.reports.push_back(report);

        if (outcome && (report.yes_count() > best_yes)) {
            best_yes = report.yes_count();
            best = std::move(outcome);
            result.chosen_attempt = attempt;
        }
        if (report.passed && best && result.chosen_attempt == attempt) {
            result.passed = true;
            break;
        }
    }
    if (!best)
        throw *last_failure;
    result.outcome = std::move(*best);
    return result;
}

nlohmann::json to_json(const FeedbackReport& report) {
    auto verdicts = nlohmann::json::array();
    for (const auto& v : report.verdicts)
        verdicts.push_back({{"question", v.question}, {"answer", v.answer}, {"yes", v.yes}, {"ambiguous", v.ambiguous}});
    nlohmann::json j{{"attempt", report.attempt},
                     {"verdicts", verdicts},
                     {"passed", report.passed},
                     {"yes_count", report.yes_count()},
                     {"adjustment", report.adjustment}};
    if (!report.failure.empty())
        j["failure"] = report.failure;
    return j;
}

nlohmann::json to_json(const ConfigDelta& delta) {
    nlohmann::json j{{"eta_scale", delta.eta_scale},
                     {"combine_shift", delta.combine_shift},
                     {"guide_shift", delta.guide_shift},
                     {"iters_delta", delta.iters_delta}};
    if (delta.blocks)
        j["blocks"] = std::string(to_string(*delta.blocks));
    return j;
}

ConfigDelta config_delta_from_json(const nlohmann::json& j) {
    ConfigDelta d;
    d.eta_scale = j.value("eta_scale", 1.0);
    d.combine_shift = j.value("combine_shift", 0.0);
    d.guide_shift = j.value("guide_shift", 0.0);
    d.iters_delta = j.value("iters_delta", 0);
    if (j.contains("blocks")) {
        d.blocks = block_group_from_string(j["blocks"].get<std::string>());
        require(d.blocks.has_value(), "unknown block group in retry schedule");
    }
    return d;
}

}  // namespace stagewise
