// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stagewise/mock/toy_denoiser.hpp"
#include "stagewise/ports.hpp"

namespace stagewise::mock {

// Scorer fixture grammar, one record per line (strings JSON-escaped):
//
//   # comment
//   target "<text>" <x> <y> [token <k>]
//   target * <x> <y> [token <k>]
//
// `*` applies to any text without its own record. Coordinates are canvas
// cell indices; the token defaults to the head noun of the text's first
// object phrase (the words before the first " and ").

struct ScoreTarget {
    std::string text;  // empty = wildcard
    double x = 0.0;
    double y = 0.0;
    std::optional<int> token;
};

std::vector<ScoreTarget> parse_score_targets(const std::string& text);

struct Centroid {
    double x = 0.0;
    double y = 0.0;
};

/// Mass centroid of a non-negative grid in cell-index coordinates.
Centroid centroid(const ScalarGrid& map);

/// Negative squared distance between the token's attention centroid on the
/// toy backend and a scripted target point. Maximum is 0.
class MockScorer : public ScorerPort {
public:
    MockScorer(ToyDenoiser denoiser, std::vector<ScoreTarget> targets,
               BlockGroup group = BlockGroup::near_middle);

    double score(const Image& image, const std::string& text) override;

    const ScoreTarget& target_for(const std::string& text) const;
    int token_for(const std::string& text) const;
    Centroid attention_centroid(const Image& image, const std::string& text) const;

private:
    ToyDenoiser m_denoiser;
    std::vector<ScoreTarget> m_targets;
    BlockGroup m_group;
};

/// Same score for everything; selection then falls to the tie-break.
class ConstantScorer : public ScorerPort {
public:
    explicit ConstantScorer(double value = 0.0) : m_value(value) {}
    double score(const Image&, const std::string&) override { return m_value; }

private:
    double m_value;
};

}  // namespace stagewise::mock
