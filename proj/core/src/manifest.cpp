// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/manifest.hpp"

#include <fstream>
#include <sstream>

#include "stagewise/http_ports.hpp"

namespace stagewise {

using nlohmann::json;

namespace {

Position position_at(const json& j) {
    const auto p = position_from_string(j.get<std::string>());
    if (!p)
        raise(ErrorKind::io, "unknown position '" + j.get<std::string>() + "'");
    return *p;
}

PlannerTranscript transcript_from_json(const json& j) {
    PlannerTranscript out;
    for (const auto& e : j)
        out.push_back({e.at("query").get<std::string>(), e.at("prompt").get<std::string>(),
                       e.at("reply").get<std::string>(), e.at("parsed").get<std::string>()});
    return out;
}

FeedbackReport report_from_json(const json& j) {
    FeedbackReport r;
    r.attempt = j.at("attempt").get<int>();
    r.passed = j.at("passed").get<bool>();
    r.adjustment = j.value("adjustment", "");
    r.failure = j.value("failure", "");
    for (const auto& v : j.at("verdicts"))
        r.verdicts.push_back({v.at("question").get<std::string>(), v.at("answer").get<std::string>(),
                              v.at("yes").get<bool>(), v.at("ambiguous").get<bool>()});
    return r;
}

json to_json(const StageSummary& s) {
    json candidates = json::array();
    for (const auto& c : s.candidates)
        candidates.push_back({{"ratio", c.ratio}, {"bbox", to_json(c.bbox)}, {"clamped", c.clamped}, {"score", c.score}});
    json attempts = json::array();
    for (const auto& a : s.attempts)
        attempts.push_back(to_json(a));
    json j{{"n", s.n},
           {"subprompt", {{"text", s.subprompt.text}, {"token_index", s.subprompt.token_index}}},
           {"position", std::string(to_string(s.position))},
           {"count", s.count},
           {"placement_reply", s.placement_reply},
           {"rough_mask", to_json(s.rough_mask)},
           {"overlap", s.overlap},
           {"overlap_ambiguous", s.overlap_ambiguous},
           {"candidates", candidates},
           {"chosen_ratio", s.chosen_ratio ? json(*s.chosen_ratio) : json(nullptr)},
           {"questions", s.questions},
           {"attempts", attempts},
           {"chosen_attempt", s.chosen_attempt},
           {"passed", s.passed},
           {"precise_mask", to_json(s.precise_mask)},
           {"precise_mask_fallback", s.precise_mask_fallback},
           {"trajectory_digests", s.trajectory_digests},
           {"transcript", to_json(s.transcript)},
           {"events", s.events},
           {"artifacts", s.artifacts}};
    return j;
}

StageSummary stage_from_json(const json& j) {
    StageSummary s;
    s.n = j.at("n").get<int>();
    s.subprompt.n = s.n;
    s.subprompt.text = j.at("subprompt").at("text").get<std::string>();
    s.subprompt.token_index = j.at("subprompt").at("token_index").get<int>();
    s.position = position_at(j.at("position"));
    s.count = j.at("count").get<int>();
    s.placement_reply = j.at("placement_reply").get<std::string>();
    s.rough_mask = bbox_from_json(j.at("rough_mask"));
    s.overlap = j.at("overlap").get<bool>();
    s.overlap_ambiguous = j.at("overlap_ambiguous").get<bool>();
    for (const auto& c : j.at("candidates"))
        s.candidates.push_back({c.at("ratio").get<double>(), bbox_from_json(c.at("bbox")), c.at("clamped").get<bool>(),
                                c.at("score").get<double>()});
    if (!j.at("chosen_ratio").is_null())
        s.chosen_ratio = j.at("chosen_ratio").get<double>();
    s.questions = j.at("questions").get<std::vector<std::string>>();
    for (const auto& a : j.at("attempts"))
        s.attempts.push_back(report_from_json(a));
    s.chosen_attempt = j.at("chosen_attempt").get<int>();
    s.passed = j.at("passed").get<bool>();
    s.precise_mask = bbox_from_json(j.at("precise_mask"));
    s.precise_mask_fallback = j.at("precise_mask_fallback").get<bool>();
    s.trajectory_digests = j.at("trajectory_digests").get<std::vector<std::string>>();
    s.transcript = transcript_from_json(j.at("transcript"));
    s.events = j.at("events").get<std::vector<std::string>>();
    s.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    return s;
}

}  // namespace

json to_json(const GuidanceConfig& c) {
    return {{"steps", c.steps},
            {"guide_until", c.guide_until},
            {"combine_until", c.combine_until},
            {"eta", c.eta},
            {"blocks", std::string(to_string(c.blocks))},
            {"guidance_iters", c.guidance_iters},
            {"threshold_quantile", c.threshold_quantile}};
}

GuidanceConfig guidance_config_from_json(const json& j) {
    GuidanceConfig c;
    c.steps = j.value("steps", c.steps);
    c.guide_until = j.value("guide_until", c.guide_until);
    c.combine_until = j.value("combine_until", c.combine_until);
    c.eta = j.value("eta", c.eta);
    if (j.contains("blocks")) {
        const auto g = block_group_from_string(j.at("blocks").get<std::string>());
        require(g.has_value(), "unknown block group '" + j.at("blocks").get<std::string>() + "'");
        c.blocks = *g;
    }
    c.guidance_iters = j.value("guidance_iters", c.guidance_iters);
    c.threshold_quantile = j.value("threshold_quantile", c.threshold_quantile);
    return c;
}

json to_json(const RunConfig& c) {
    json schedule = json::array();
    for (const auto& d : c.retry.schedule)
        schedule.push_back(to_json(d));
    return {{"prompt", c.prompt},
            {"seed", c.seed},
            {"guidance", to_json(c.guidance)},
            {"overlap_ratios", c.overlap_ratios},
            {"retry", {{"max_retries", c.retry.max_retries}, {"schedule", schedule}}},
            {"planner_retries", c.planner_retries},
            {"ports", to_json(c.ports)},
            {"save_intermediates", c.save_intermediates}};
}

RunConfig run_config_from_json(const json& j) {
    RunConfig c;
    c.prompt = j.at("prompt").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.guidance = guidance_config_from_json(j.at("guidance"));
    c.overlap_ratios = j.at("overlap_ratios").get<std::vector<double>>();
    c.retry.max_retries = j.at("retry").at("max_retries").get<int>();
    c.retry.schedule.clear();
    for (const auto& d : j.at("retry").at("schedule"))
        c.retry.schedule.push_back(config_delta_from_json(d));
    c.planner_retries = j.at("planner_retries").get<int>();
    c.ports = port_specs_from_json(j.at("ports"));
    c.save_intermediates = j.value("save_intermediates", false);
    return c;
}

json to_json(const RunManifest& m) {
    json stages = json::array();
    for (const auto& s : m.stages)
        stages.push_back(to_json(s));
    return {{"format_version", RunManifest::format_version},
            {"config", to_json(m.config)},
            {"canvas", {{"width", m.canvas.width}, {"height", m.canvas.height}}},
            {"plan", {{"source_prompt", m.plan.source_prompt}, {"objects", m.plan.objects}}},
            {"plan_transcript", to_json(m.plan_transcript)},
            {"stages", stages},
            {"status", m.status},
            {"error", m.error},
            {"final_image", m.final_image}};
}

RunManifest manifest_from_json(const json& j) {
    const auto problems = validate_manifest(j);
    if (!problems.empty())
        raise(ErrorKind::io, "invalid manifest: " + problems.front());
    RunManifest m;
    m.config = run_config_from_json(j.at("config"));
    m.canvas = {j.at("canvas").at("width").get<int>(), j.at("canvas").at("height").get<int>()};
    m.plan.source_prompt = j.at("plan").at("source_prompt").get<std::string>();
    m.plan.objects = j.at("plan").at("objects").get<std::vector<std::string>>();
    m.plan_transcript = transcript_from_json(j.at("plan_transcript"));
    for (const auto& s : j.at("stages"))
        m.stages.push_back(stage_from_json(s));
    m.status = j.at("status").get<std::string>();
    m.error = j.at("error").get<std::string>();
    m.final_image = j.at("final_image").get<std::string>();
    return m;
}

std::string serialize_manifest(const RunManifest& manifest) {
    // json objects are std::map backed, so keys come out sorted.
    return to_json(manifest).dump(2) + "\n";
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        raise(ErrorKind::io, "cannot write " + path.string());
    out << serialize_manifest(manifest);
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise(ErrorKind::io, "cannot read " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        raise(ErrorKind::io, path.string() + ": " + e.what());
    }
    try {
        return manifest_from_json(j);
    } catch (const json::exception& e) {
        raise(ErrorKind::io, path.string() + ": " + e.what());
    }
}

std::vector<std::string> validate_manifest(const json& d) {
    std::vector<std::string> errors;
    auto need = [&](const json& obj, const char* key, json::value_t type, const std::string& where) {
        if (!obj.is_object() || !obj.contains(key)) {
            errors.push_back(where + ": missing '" + key + "'");
            return false;
        }
        const auto t = obj.at(key).type();
        const bool number_ok = type == json::value_t::number_float &&
                               (t == json::value_t::number_integer || t == json::value_t::number_unsigned);
        const bool int_ok = type == json::value_t::number_integer && t == json::value_t::number_unsigned;
        if (t != type && !number_ok && !int_ok) {
            errors.push_back(where + ": '" + key + "' has the wrong type");
            return false;
        }
        return true;
    };
    using vt = json::value_t;
    if (!d.is_object())
        return {"document is not an object"};
    if (need(d, "format_version", vt::number_integer, "manifest") &&
        d.at("format_version").get<int>() != RunManifest::format_version)
        errors.push_back("manifest: unsupported format_version");
    if (need(d, "config", vt::object, "manifest")) {
        const auto& c = d.at("config");
        need(c, "prompt", vt::string, "config");
        need(c, "seed", vt::number_unsigned, "config");
        need(c, "guidance", vt::object, "config");
        need(c, "overlap_ratios", vt::array, "config");
        need(c, "retry", vt::object, "config");
        need(c, "planner_retries", vt::number_integer, "config");
        need(c, "ports", vt::object, "config");
    }
    if (need(d, "canvas", vt::object, "manifest")) {
        need(d.at("canvas"), "width", vt::number_integer, "canvas");
        need(d.at("canvas"), "height", vt::number_integer, "canvas");
    }
    if (need(d, "plan", vt::object, "manifest"))
        need(d.at("plan"), "objects", vt::array, "plan");
    need(d, "plan_transcript", vt::array, "manifest");
    if (need(d, "status", vt::string, "manifest")) {
        const auto s = d.at("status").get<std::string>();
        if (s != "ok" && s != "failed")
            errors.push_back("manifest: status must be ok or failed");
    }
    need(d, "error", vt::string, "manifest");
    need(d, "final_image", vt::string, "manifest");
    if (need(d, "stages", vt::array, "manifest")) {
        int expected = 1;
        for (const auto& s : d.at("stages")) {
            const std::string where = "stage " + std::to_string(expected);
            if (need(s, "n", vt::number_integer, where) && s.at("n").get<int>() != expected)
                errors.push_back(where + ": stages out of order");
            for (const char* key : {"rough_mask", "precise_mask", "subprompt"})
                need(s, key, vt::object, where);
            for (const char* key : {"trajectory_digests", "attempts", "candidates", "questions", "transcript", "events"})
                need(s, key, vt::array, where);
            for (const char* key : {"overlap", "overlap_ambiguous", "passed", "precise_mask_fallback"})
                need(s, key, vt::boolean, where);
            need(s, "position", vt::string, where);
            need(s, "count", vt::number_integer, where);
            need(s, "placement_reply", vt::string, where);
            need(s, "chosen_attempt", vt::number_integer, where);
            need(s, "artifacts", vt::object, where);
            if (!s.contains("chosen_ratio"))
                errors.push_back(where + ": missing 'chosen_ratio'");
            ++expected;
        }
    }
    return errors;
}

}  // namespace stagewise
