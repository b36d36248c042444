// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/candidates.hpp"

#include <cmath>
#include <sstream>

namespace stagewise {

CandidateSet generate_candidates(const CandidateRequest& request, DenoiserPort& port) {
    require(!request.ratios.empty(), "at least one overlap ratio is required");
    require(request.stage.previous != nullptr, "overlap candidates need the previous stage");
    const Canvas canvas = port.canvas();

    CandidateSet out;
    std::string last_error;
    for (double ratio : request.ratios) {
        const OverlapCandidate mask =
            overlap_candidate(request.position, request.count, request.stage.previous->precise_mask, canvas, ratio);
        std::ostringstream tag;
        tag << "ratio " << ratio;
        if (mask.clamped)
            out.events.push_back(tag.str() + ": candidate mask clamped to the canvas");

        StageRequest stage = request.stage;
        stage.rough_mask = mask.bbox;
        try {
            out.candidates.push_back({ratio, mask.bbox, mask.clamped, single_object_diffusion(stage, port), 0.0});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numeric)
                throw;
            last_error = e.what();
            out.events.push_back(tag.str() + ": candidate dropped: " + e.what());
        }
    }
    if (out.candidates.empty())
        raise(ErrorKind::numeric, "every overlap candidate failed; last: " + last_error);
    return out;
}

size_t best_candidate_index(std::span<const Candidate> candidates) {
    require(!candidates.empty(), "no candidates to select from");
    size_t best = 0;
    for (size_t i = 1; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        const auto& b = candidates[best];
        if (c.score > b.score || (c.score == b.score && c.ratio < b.ratio))
            best = i;
    }
    return best;
}

size_t select_best(std::vector<Candidate>& candidates, const SubPrompt& subprompt, ScorerPort& scorer) {
    require(!candidates.empty(), "no candidates to select from");
    for (auto& c : candidates) {
        c.score = scorer.score(c.record.image, subprompt.text);
        if (!std::isfinite(c.score))
            raise(ErrorKind::backend, "scorer returned a non-finite score");
    }
    return best_candidate_index(candidates);
}

}  // namespace stagewise
