// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "stagewise/http_ports.hpp"
#include "stagewise/manifest.hpp"
#include "stagewise/text.hpp"

namespace stagewise {

void RunConfig::validate() const {
    require(!trim(prompt).empty(), "prompt must be non-empty");
    guidance.validate();
    require(!overlap_ratios.empty(), "at least one overlap ratio is required");
    for (double r : overlap_ratios)
        require(r >= 0.0 && r < 1.0, "overlap ratios must lie in [0, 1)");
    retry.validate();
    require(planner_retries >= 0, "planner_retries must be >= 0");
}

std::uint64_t stage_seed(std::uint64_t run_seed, int n) {
    std::uint64_t z = run_seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(n);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

void write_ppm(const std::filesystem::path& path, const Image& image) {
    require(image.channels >= 1 && image.width >= 1 && image.height >= 1, "cannot write an empty image");
    const bool unit_range = std::all_of(image.pixels.begin(), image.pixels.end(),
                                        [](double v) { return v >= 0.0 && v <= 1.0; });
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        raise(ErrorKind::io, "cannot write " + path.string());
    out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
    const size_t plane = static_cast<size_t>(image.width) * image.height;
    for (size_t i = 0; i < plane; ++i) {
        for (int c = 0; c < 3; ++c) {
            const int src = std::min(c, image.channels - 1);
            const double v = image.pixels[static_cast<size_t>(src) * plane + i];
            const double unit = unit_range ? v : 1.0 / (1.0 + std::exp(-2.0 * v));
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * std::clamp(unit, 0.0, 1.0)))));
        }
    }
}

namespace {

using Clock = std::chrono::steady_clock;

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        raise(ErrorKind::io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void persist_stage(const RunConfig& config, StageSummary& summary, const StageRecord& record) {
    const std::string dir_name = "stage_" + std::to_string(summary.n);
    const auto dir = config.out_dir / dir_name;
    std::filesystem::create_directories(dir);

    write_ppm(dir / "image.ppm", record.image);
    summary.artifacts["image"] = dir_name + "/image.ppm";

    write_json(dir / "masks.json", {{"rough", to_json(record.rough_mask)},
                                    {"precise", to_json(record.precise_mask)},
                                    {"precise_fallback", record.precise_mask_fallback}});
    summary.artifacts["masks"] = dir_name + "/masks.json";

    auto transcript = nlohmann::json::object();
    transcript["planner"] = to_json(summary.transcript);
    auto attempts = nlohmann::json::array();
    for (const auto& a : summary.attempts)
        attempts.push_back(to_json(a));
    transcript["checker"] = attempts;
    write_json(dir / "transcript.json", transcript);
    summary.artifacts["transcript"] = dir_name + "/transcript.json";

    if (config.save_intermediates) {
        write_trajectory(dir / "trajectory.swlt", record.trajectory);
        summary.artifacts["trajectory"] = dir_name + "/trajectory.swlt";
    }
}

void finish(const RunConfig& config, RunResult& result, Clock::time_point started) {
    if (config.out_dir.empty())
        return;
    std::filesystem::create_directories(config.out_dir);
    write_manifest(config.out_dir / "manifest.json", result.manifest);
    const double total = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
    write_json(config.out_dir / "timing.json", {{"total_ms", total}, {"stage_ms", result.stage_millis}});
}

}  // namespace

RunResult run_pipeline(const RunConfig& config, PortSet& ports) {
    const auto started = Clock::now();
    RunResult result;
    RunManifest& manifest = result.manifest;
    manifest.config = config;

    try {
        config.validate();
        require(ports.denoiser && ports.planner && ports.checker && ports.scorer, "every port must be provided");
        manifest.canvas = ports.denoiser->canvas();
        const Canvas canvas = manifest.canvas;

        LlmPlanner planner(*ports.planner, config.planner_retries);
        manifest.plan = planner.decompose(config.prompt);
        manifest.plan_transcript = planner.transcript();
        const ObjectPlan& plan = manifest.plan;

        for (int n = 1; n <= plan.size(); ++n) {
            const auto stage_started = Clock::now();
            const size_t transcript_mark = planner.transcript().size();
            const StageRecord* previous = result.records.empty() ? nullptr : &result.records.back();
            const std::string& object = plan.objects[static_cast<size_t>(n - 1)];

            manifest.stages.emplace_back();
            StageSummary& summary = manifest.stages.back();
            summary.n = n;
            summary.subprompt = make_subprompt(plan, n);

            try {
                Placement placement;
                if (n == 1) {
                    placement = planner.plan_first(config.prompt, object);
                    summary.rough_mask = rough_mask_first(placement.position, placement.count, canvas);
                } else {
                    const std::vector<std::string> prior(plan.objects.begin(), plan.objects.begin() + (n - 1));
                    try {
                        placement = planner.plan_next(config.prompt, prior, object);
                    } catch (const Error& e) {
                        if (e.kind() != ErrorKind::planning)
                            throw;
                        placement = {Position::right, 1, ""};
                        summary.events.push_back(std::string("placement defaulted to right x1: ") + e.what());
                    }
                    try {
                        summary.rough_mask =
                            rough_mask_next(placement.position, placement.count, previous->precise_mask, canvas);
                    } catch (const Error& e) {
                        if (e.kind() != ErrorKind::layout_exhausted)
                            throw;
                        const Position other = placement.position == Position::right ? Position::top : Position::right;
                        summary.events.push_back(std::string(e.what()) + "; trying " + std::string(to_string(other)));
                        summary.rough_mask = rough_mask_next(other, placement.count, previous->precise_mask, canvas);
                        placement.position = other;
                    }
                    const OverlapJudgement judged =
                        planner.judge_overlap(config.prompt, object, plan.objects[static_cast<size_t>(n - 2)]);
                    summary.overlap = judged.overlap;
                    summary.overlap_ambiguous = judged.ambiguous;
                    if (judged.ambiguous)
                        summary.events.push_back("overlap reply ambiguous; treated as no overlap");
                }
                summary.position = placement.position;
                summary.count = placement.count;
                summary.placement_reply = placement.raw_position;
            } catch (...) {
                summary.transcript.assign(planner.transcript().begin() + static_cast<long>(transcript_mark),
                                          planner.transcript().end());
                throw;
            }
            summary.transcript.assign(planner.transcript().begin() + static_cast<long>(transcript_mark),
                                      planner.transcript().end());

            const std::uint64_t seed = stage_seed(config.seed, n);
            const StageGenerator generate = [&](const GuidanceConfig& guidance, int) {
                StageRequest request{n, summary.subprompt, summary.rough_mask, previous, guidance, seed};
                StageOutcome outcome;
                if (!summary.overlap) {
                    outcome.record = single_object_diffusion(request, *ports.denoiser);
                    return outcome;
                }
                CandidateRequest cand{request, summary.position, summary.count, config.overlap_ratios};
                CandidateSet set = generate_candidates(cand, *ports.denoiser);
                const size_t best = select_best(set.candidates, summary.subprompt, *ports.scorer);
                outcome.overlap_path = true;
                for (const auto& c : set.candidates)
                    outcome.candidates.push_back({c.ratio, c.bbox, c.clamped, c.score});
                outcome.chosen_ratio = set.candidates[best].ratio;
                outcome.record = std::move(set.candidates[best].record);
                outcome.events = std::move(set.events);
                return outcome;
            };

            std::optional<StageRelation> relation;
            if (n > 1)
                relation = StageRelation{plan.objects[static_cast<size_t>(n - 2)], summary.position};
            summary.questions = build_stage_questions(object, relation);

            FeedbackResult fb =
                run_stage_with_feedback(generate, summary.questions, *ports.checker, config.retry, config.guidance);

            StageRecord& record = fb.outcome.record;
            summary.candidates = fb.outcome.candidates;
            summary.chosen_ratio = fb.outcome.chosen_ratio;
            summary.attempts = fb.reports;
            summary.chosen_attempt = fb.chosen_attempt;
            summary.passed = fb.passed;
            if (!fb.passed)
                summary.events.push_back("no attempt passed the check; kept attempt " +
                                         std::to_string(fb.chosen_attempt));
            summary.rough_mask = record.rough_mask;
            summary.precise_mask = record.precise_mask;
            summary.precise_mask_fallback = record.precise_mask_fallback;
            for (const auto& latent : record.trajectory)
                summary.trajectory_digests.push_back(digest_hex(latent));
            for (auto& e : fb.outcome.events)
                summary.events.push_back(std::move(e));
            for (const auto& e : record.events)
                summary.events.push_back(e);

            if (!config.out_dir.empty())
                persist_stage(config, summary, record);
            result.records.push_back(std::move(record));
            result.stage_millis.push_back(
                std::chrono::duration<double, std::milli>(Clock::now() - stage_started).count());
        }
        if (!manifest.stages.empty())
            manifest.final_image = manifest.stages.back().artifacts.count("image")
                                       ? manifest.stages.back().artifacts.at("image")
                                       : std::string{};
    } catch (const Error& e) {
        manifest.status = "failed";
        manifest.error = e.what();
        if (const auto* failure = dynamic_cast<const StageFailure*>(&e); failure && failure->partial() &&
                                                                          !manifest.stages.empty()) {
            auto& summary = manifest.stages.back();
            for (const auto& latent : failure->partial()->trajectory)
                summary.trajectory_digests.push_back(digest_hex(latent));
        }
    }
    finish(config, result, started);
    return result;
}

}  // namespace stagewise
