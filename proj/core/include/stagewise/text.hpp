// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stagewise {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// Lower-cased word tokens ([a-z0-9'-]+ runs). Token k of a sub-prompt is
/// the k-th element of this list.
std::vector<std::string> words(std::string_view text);

bool is_article(std::string_view word);

/// Head noun of an object phrase: its last word.
std::string head_noun(std::string_view phrase);

/// Words of an object phrase other than the head noun and articles.
std::vector<std::string> attribute_words(std::string_view phrase);

/// Token index of the first object phrase's head noun inside a sub-prompt
/// built as "{obj_n}" or "{obj_n} and {obj_n-1}".
int head_token_index(std::string_view object_phrase);

enum class YesNo { yes, no, ambiguous };

/// Reads a leading "yes"/"no" (case-insensitive), ignoring leading
/// punctuation and markup.
YesNo parse_yes_no(std::string_view reply);

/// First integer token in `reply`; spelled-out numbers one..twelve count too.
std::optional<int> first_integer(std::string_view reply);

std::string replace_all(std::string text, std::string_view from, std::string_view to);
std::vector<std::string> split(std::string_view text, char sep);

}  // namespace stagewise
