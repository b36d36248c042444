// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/planner.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "stagewise/errors.hpp"
#include "stagewise/prompt_templates.hpp"
#include "stagewise/text.hpp"

namespace stagewise {

namespace {

constexpr size_t kMaxObjectWords = 6;

std::string strip_list_marker(const std::string& line, bool& had_marker) {
    had_marker = false;
    size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])))
        ++i;
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
        had_marker = true;
        return trim(std::string_view(line).substr(i + 1));
    }
    for (std::string_view bullet : {"- ", "* ", "\xE2\x80\xA2"}) {
        if (line.starts_with(bullet)) {
            had_marker = true;
            return trim(std::string_view(line).substr(bullet.size()));
        }
    }
    return line;
}

std::string clean_item(std::string item) {
    item = trim(item);
    item = replace_all(std::move(item), "**", "");
    while (!item.empty() && (item.back() == '.' || item.back() == ',' || item.back() == '"' || item.back() == '\''))
        item.pop_back();
    while (!item.empty() && (item.front() == '"' || item.front() == '\''))
        item.erase(item.begin());
    item = trim(item);
    if (to_lower(item).starts_with("and "))
        item = trim(std::string_view(item).substr(4));
    const auto space = item.find(' ');
    if (space != std::string::npos && is_article(to_lower(item.substr(0, space))))
        item = trim(std::string_view(item).substr(space + 1));
    return item;
}

bool plausible_object(const std::string& item, const std::set<std::string>& prompt_words) {
    if (item.empty() || item.find_first_of("!?:;") != std::string::npos || item.find("\xE2\x80\xA6") != std::string::npos)
        return false;
    const auto ws = words(item);
    if (ws.empty() || ws.size() > kMaxObjectWords)
        return false;
    if (prompt_words.empty())
        return true;
    for (const auto& w : ws) {
        if (is_article(w))
            continue;
        if (prompt_words.contains(w))
            return true;
        // tolerate singular/plural drift between prompt and reply
        if (prompt_words.contains(w + "s") || (w.size() > 1 && w.back() == 's' && prompt_words.contains(w.substr(0, w.size() - 1))))
            return true;
    }
    return false;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i)
            out += sep;
        out += items[i];
    }
    return out;
}

}  // namespace

SubPrompt make_subprompt(const ObjectPlan& plan, int n) {
    if (n < 1 || n > plan.size())
        raise(ErrorKind::index, "sub-prompt index " + std::to_string(n) + " outside 1.." + std::to_string(plan.size()));
    const std::string& current = plan.objects[static_cast<size_t>(n - 1)];
    SubPrompt sub{n, current, head_token_index(current)};
    if (n > 1)
        sub.text = current + " and " + plan.objects[static_cast<size_t>(n - 2)];
    return sub;
}

std::optional<std::vector<std::string>> parse_object_list(std::string_view reply, std::string_view source_prompt) {
    std::set<std::string> prompt_words;
    for (auto& w : words(source_prompt))
        prompt_words.insert(std::move(w));

    std::vector<std::string> lines;
    for (const auto& raw : split(reply, '\n')) {
        auto line = trim(raw);
        if (!line.empty())
            lines.push_back(std::move(line));
    }
    if (lines.empty())
        return std::nullopt;

    std::vector<std::string> marked;
    for (const auto& line : lines) {
        bool had_marker = false;
        auto item = strip_list_marker(line, had_marker);
        if (had_marker)
            marked.push_back(std::move(item));
    }

    std::vector<std::string> items;
    if (!marked.empty()) {
        items = std::move(marked);
    } else if (lines.size() > 1) {
        for (const auto& line : lines)
            if (line.back() != ':')
                items.push_back(line);
    } else {
        for (auto& part : split(lines.front(), ','))
            for (auto& piece : split(part, ';'))
                items.push_back(std::move(piece));
    }

    std::vector<std::string> objects;
    for (auto& item : items) {
        auto cleaned = clean_item(std::move(item));
        if (cleaned.empty())
            continue;
        if (!plausible_object(cleaned, prompt_words))
            return std::nullopt;
        objects.push_back(std::move(cleaned));
    }
    if (objects.empty())
        return std::nullopt;
    return objects;
}

std::optional<PositionWord> parse_position_word(std::string_view reply) {
    for (const auto& w : words(reply)) {
        if (w == "none") return PositionWord::none;
        if (w == "left") return PositionWord::left;
        if (w == "right") return PositionWord::right;
        if (w == "top" || w == "above" || w == "up") return PositionWord::top;
        if (w == "bottom" || w == "below" || w == "down") return PositionWord::bottom;
    }
    return std::nullopt;
}

std::optional<Position> project_first(PositionWord word) {
    switch (word) {
    case PositionWord::left:
    case PositionWord::right: return Position::left;
    case PositionWord::top:
    case PositionWord::bottom: return Position::bottom;
    case PositionWord::none: return std::nullopt;
    }
    return std::nullopt;
}

std::optional<Position> project_next(PositionWord word) {
    switch (word) {
    case PositionWord::left:
    case PositionWord::right: return Position::right;
    case PositionWord::top:
    case PositionWord::bottom: return Position::top;
    case PositionWord::none: return std::nullopt;
    }
    return std::nullopt;
}

int clamp_count(int count) {
    return std::clamp(count, min_object_count, max_object_count);
}

LlmPlanner::LlmPlanner(TextCompletionPort& port, int max_retries)
    : m_port(port), m_max_retries(std::max(0, max_retries)) {}

template <typename T, typename Parse>
std::optional<T> LlmPlanner::query(std::string_view name, const std::string& prompt, std::string_view suffix,
                                   Parse parse) {
    for (int attempt = 0; attempt <= m_max_retries; ++attempt) {
        const std::string sent = attempt == 0 ? prompt : prompt + std::string(suffix);
        std::string reply = m_port.complete(sent);
        std::optional<std::pair<T, std::string>> parsed = parse(reply);
        m_transcript.push_back({std::string(name), sent, reply, parsed ? parsed->second : "<unparsed>"});
        if (parsed)
            return std::move(parsed->first);
    }
    return std::nullopt;
}

ObjectPlan LlmPlanner::decompose(const std::string& prompt) {
    require(!trim(prompt).empty(), "prompt must be non-empty");
    const auto sent = render_template(TemplateId::decompose, {{"p", prompt}});
    auto objects = query<std::vector<std::string>>(
        template_name(TemplateId::decompose), sent, list_retry_suffix,
        [&](const std::string& reply) -> std::optional<std::pair<std::vector<std::string>, std::string>> {
            auto list = parse_object_list(reply, prompt);
            if (!list)
                return std::nullopt;
            return std::pair{*list, join(*list, " | ")};
        });
    if (!objects) {
        std::string raw;
        for (const auto& e : m_transcript)
            if (e.query == template_name(TemplateId::decompose))
                raw += "\n  > " + e.reply;
        raise(ErrorKind::decomposition, "no object list in planner replies:" + raw);
    }
    return {prompt, std::move(*objects)};
}

namespace {

auto count_parser() {
    return [](const std::string& reply) -> std::optional<std::pair<int, std::string>> {
        const auto n = first_integer(reply);
        if (!n)
            return std::nullopt;
        const int clamped = clamp_count(*n);
        return std::pair{clamped, std::to_string(clamped)};
    };
}

}  // namespace

Placement LlmPlanner::plan_first(const std::string& prompt, const std::string& first_object) {
    Placement out;
    const auto position_prompt = render_template(TemplateId::first_position, {{"p", prompt}, {"obj_1", first_object}});
    auto position = query<Position>(
        template_name(TemplateId::first_position), position_prompt, retry_suffix,
        [&](const std::string& reply) -> std::optional<std::pair<Position, std::string>> {
            const auto word = parse_position_word(reply);
            const auto projected = word ? project_first(*word) : std::nullopt;
            if (!projected)
                return std::nullopt;
            return std::pair{*projected, std::string(to_string(*projected))};
        });
    if (!position)
        raise(ErrorKind::planning, "no usable position for '" + first_object + "'");
    out.position = *position;
    out.raw_position = m_transcript.back().reply;

    const TemplateId count_id = out.position == Position::left ? TemplateId::first_count_horizontal
                                                               : TemplateId::first_count_vertical;
    auto count = query<int>(template_name(count_id), render_template(count_id, {{"p", prompt}}), retry_suffix,
                            count_parser());
    if (!count)
        raise(ErrorKind::planning, "non-numeric object count for '" + first_object + "'");
    out.count = *count;
    return out;
}

Placement LlmPlanner::plan_next(const std::string& prompt, const std::vector<std::string>& prior_objects,
                                const std::string& object) {
    require(!prior_objects.empty(), "plan_next needs at least one prior object");
    Placement out;
    const std::string objs = join(prior_objects, ", ");
    const std::string& previous = prior_objects.back();
    const auto position_prompt = render_template(
        TemplateId::next_position, {{"p", prompt}, {"objs", objs}, {"obj_n", object}, {"obj_prev", previous}});
    auto position = query<Position>(
        template_name(TemplateId::next_position), position_prompt, retry_suffix,
        [&](const std::string& reply) -> std::optional<std::pair<Position, std::string>> {
            const auto word = parse_position_word(reply);
            const auto projected = word ? project_next(*word) : std::nullopt;
            if (!projected)
                return std::nullopt;
            return std::pair{*projected, std::string(to_string(*projected))};
        });
    if (!position)
        raise(ErrorKind::planning, "no usable position for '" + object + "' relative to '" + previous + "'");
    out.position = *position;
    out.raw_position = m_transcript.back().reply;

    const auto count_prompt = render_template(
        TemplateId::next_count,
        {{"p", prompt}, {"objs", objs}, {"opt_n", std::string(to_string(out.position))}, {"obj_prev", previous}});
    auto count = query<int>(template_name(TemplateId::next_count), count_prompt, retry_suffix, count_parser());
    if (!count)
        raise(ErrorKind::planning, "non-numeric object count for '" + object + "'");
    out.count = *count;
    return out;
}

OverlapJudgement LlmPlanner::judge_overlap(const std::string& prompt, const std::string& object,
                                           const std::string& previous_object) {
    const auto sent =
        render_template(TemplateId::overlap, {{"p", prompt}, {"obj_n", object}, {"obj_prev", previous_object}});
    auto verdict = query<bool>(template_name(TemplateId::overlap), sent, retry_suffix,
                               [](const std::string& reply) -> std::optional<std::pair<bool, std::string>> {
                                   switch (parse_yes_no(reply)) {
                                   case YesNo::yes: return std::pair{true, std::string("yes")};
                                   case YesNo::no: return std::pair{false, std::string("no")};
                                   case YesNo::ambiguous: return std::nullopt;
                                   }
                                   return std::nullopt;
                               });
    if (!verdict)
        return {false, true};
    return {*verdict, false};
}

nlohmann::json to_json(const TranscriptEntry& entry) {
    return {{"query", entry.query}, {"prompt", entry.prompt}, {"reply", entry.reply}, {"parsed", entry.parsed}};
}

nlohmann::json to_json(const PlannerTranscript& transcript) {
    auto out = nlohmann::json::array();
    for (const auto& e : transcript)
        out.push_back(to_json(e));
    return out;
}

}  // namespace stagewise
