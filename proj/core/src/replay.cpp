// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/replay.hpp"

#include <cstring>
#include <sstream>

#include "stagewise/manifest.hpp"

namespace stagewise {

std::string ReplayReport::describe() const {
    if (identical)
        return "replay identical";
    std::ostringstream out;
    out << "replay diverged";
    if (stage > 0)
        out << " at stage " << stage;
    if (trajectory_index >= 0)
        out << ", trajectory index " << trajectory_index << " (t=" << timestep << ")";
    out << ": " << what;
    return out.str();
}

namespace {

ReplayReport diverged(int stage, std::string what, int index = -1, int timestep = -1) {
    ReplayReport r;
    r.identical = false;
    r.stage = stage;
    r.trajectory_index = index;
    r.timestep = timestep;
    r.what = std::move(what);
    return r;
}

bool bit_equal(const LatentState& a, const LatentState& b) {
    return a.same_shape(b) &&
           std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0;
}

std::string box_text(const BBox& b) {
    std::ostringstream out;
    out << '(' << b.x << ',' << b.y << ',' << b.w << ',' << b.h << ')';
    return out.str();
}

}  // namespace

ReplayReport replay_check(const std::filesystem::path& manifest_path) {
    const RunManifest recorded = read_manifest(manifest_path);
    if (!recorded.config.ports.all_mock())
        raise(ErrorKind::contract, "replay needs a run made with mock ports only");

    RunConfig config = recorded.config;
    config.out_dir.clear();
    PortSet ports = make_ports(config.ports);
    const RunResult rerun = run_pipeline(config, ports);
    const RunManifest& fresh = rerun.manifest;

    if (fresh.canvas != recorded.canvas)
        return diverged(0, "canvas differs");
    if (fresh.plan.objects != recorded.plan.objects)
        return diverged(0, "object plan differs");

    const auto base = manifest_path.parent_path();
    const size_t stages = std::min(fresh.stages.size(), recorded.stages.size());
    for (size_t i = 0; i < stages; ++i) {
        const auto& a = recorded.stages[i];
        const auto& b = fresh.stages[i];
        const int n = a.n;
        if (a.subprompt.text != b.subprompt.text)
            return diverged(n, "sub-prompt differs");
        if (a.position != b.position || a.count != b.count)
            return diverged(n, "placement differs: recorded " + std::string(to_string(a.position)) + " x" +
                                   std::to_string(a.count) + ", replayed " + std::string(to_string(b.position)) +
                                   " x" + std::to_string(b.count));
        if (a.overlap != b.overlap)
            return diverged(n, "overlap judgement differs");
        if (a.chosen_attempt != b.chosen_attempt)
            return diverged(n, "chosen attempt differs");
        if (a.chosen_ratio != b.chosen_ratio)
            return diverged(n, "chosen overlap ratio differs");
        if (a.rough_mask != b.rough_mask)
            return diverged(n, "rough mask differs: " + box_text(a.rough_mask) + " vs " + box_text(b.rough_mask));

        const int steps = config.guidance.steps;
        const size_t len = std::min(a.trajectory_digests.size(), b.trajectory_digests.size());
        for (size_t k = 0; k < len; ++k)
            if (a.trajectory_digests[k] != b.trajectory_digests[k])
                return diverged(n, "latent digest differs", static_cast<int>(k), steps - static_cast<int>(k));
        if (a.trajectory_digests.size() != b.trajectory_digests.size())
            return diverged(n, "trajectory length differs", static_cast<int>(len), steps - static_cast<int>(len));

        if (auto it = a.artifacts.find("trajectory"); it != a.artifacts.end() && i < rerun.records.size()) {
            const auto saved = read_trajectory(base / it->second);
            const auto& now = rerun.records[i].trajectory;
            const size_t m = std::min(saved.size(), now.size());
            for (size_t k = 0; k < m; ++k)
                if (!bit_equal(saved[k], now[k]))
                    return diverged(n, "saved latent differs", static_cast<int>(k), steps - static_cast<int>(k));
            if (saved.size() != now.size())
                return diverged(n, "saved trajectory length differs");
        }

        if (a.precise_mask != b.precise_mask)
            return diverged(n, "precise mask differs: " + box_text(a.precise_mask) + " vs " + box_text(b.precise_mask));
    }
    if (fresh.stages.size() != recorded.stages.size())
        return diverged(static_cast<int>(stages) + 1, "number of stages differs");
    if (fresh.status != recorded.status || fresh.error != recorded.error)
        return diverged(0, "run status differs");
    if (serialize_manifest(fresh) != serialize_manifest([&] {
            RunManifest r = recorded;
            for (auto& s : r.stages)
                s.artifacts.clear();
            r.final_image.clear();
            return r;
        }())) {
        // Everything structural matched; remaining differences are in
        // transcripts, verdicts or scores.
        for (size_t i = 0; i < stages; ++i) {
            auto lhs = recorded.stages[i];
            lhs.artifacts.clear();
            RunManifest x, y;
            x.stages = {lhs};
            y.stages = {fresh.stages[i]};
            if (serialize_manifest(x) != serialize_manifest(y))
                return diverged(recorded.stages[i].n, "stage record differs outside the latents");
        }
        return diverged(0, "run record differs outside the stages");
    }
    return {};
}

RunManifest replay(const std::filesystem::path& manifest_path) {
    const ReplayReport report = replay_check(manifest_path);
    if (!report.identical)
        raise(ErrorKind::replay_mismatch, report.describe());
    return read_manifest(manifest_path);
}

}  // namespace stagewise
