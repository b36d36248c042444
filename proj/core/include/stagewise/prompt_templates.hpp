// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stagewise {

enum class TemplateId {
    decompose,
    first_position,
    first_count_horizontal,
    first_count_vertical,
    next_position,
    next_count,
    overlap,
};

/// Raw template text with {placeholders}: {p}, {obj_1}, {objs}, {obj_n},
/// {obj_prev}, {opt_n}.
std::string_view template_text(TemplateId id);
std::string_view template_name(TemplateId id);

using TemplateArgs = std::vector<std::pair<std::string_view, std::string>>;

/// Substitutes every {key} listed in `args`.
std::string render_template(TemplateId id, const TemplateArgs& args);

/// Appended to a query when its reply could not be parsed.
inline constexpr std::string_view retry_suffix = " Answer with a single word/number.";
inline constexpr std::string_view list_retry_suffix = " Answer with a comma-separated list of the objects only.";

}  // namespace stagewise
