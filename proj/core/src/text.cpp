// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace stagewise {

namespace {

bool is_word_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '\'' || c == '-';
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> words(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (is_word_char(c)) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        out.push_back(std::move(current));
    return out;
}

bool is_article(std::string_view word) {
    return word == "a" || word == "an" || word == "the" || word == "some";
}

std::string head_noun(std::string_view phrase) {
    const auto ws = words(phrase);
    return ws.empty() ? std::string{} : ws.back();
}

std::vector<std::string> attribute_words(std::string_view phrase) {
    auto ws = words(phrase);
    if (ws.empty())
        return {};
    ws.pop_back();
    std::erase_if(ws, [](const std::string& w) { return is_article(w); });
    return ws;
}

int head_token_index(std::string_view object_phrase) {
    return std::max(0, static_cast<int>(words(object_phrase).size()) - 1);
}

YesNo parse_yes_no(std::string_view reply) {
    const auto ws = words(reply);
    if (ws.empty())
        return YesNo::ambiguous;
    if (ws.front() == "yes")
        return YesNo::yes;
    if (ws.front() == "no")
        return YesNo::no;
    return YesNo::ambiguous;
}

std::optional<int> first_integer(std::string_view reply) {
    static constexpr std::array<std::string_view, 13> spelled{
        "zero", "one", "two", "three", "four", "five", "six",
        "seven", "eight", "nine", "ten", "eleven", "twelve"};
    for (const auto& w : words(reply)) {
        if (!w.empty() && std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c); })) {
            if (w.size() > 6)
                return std::nullopt;
            return std::stoi(w);
        }
        for (size_t i = 0; i < spelled.size(); ++i)
            if (w == spelled[i])
                return static_cast<int>(i);
    }
    return std::nullopt;
}

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
    if (from.empty())
        return text;
    size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t pos = text.find(sep, start);
        out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

}  // namespace stagewise
