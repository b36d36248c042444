// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/mock/scripted_ports.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stagewise/errors.hpp"
#include "stagewise/text.hpp"

namespace stagewise::mock {

namespace {

class LineReader {
public:
    LineReader(const std::string& line, int number) : m_line(line), m_number(number) {}

    void skip_space() {
        while (m_pos < m_line.size() && (m_line[m_pos] == ' ' || m_line[m_pos] == '\t'))
            ++m_pos;
    }
    bool at_end() {
        skip_space();
        return m_pos >= m_line.size();
    }
    std::string word() {
        skip_space();
        const size_t start = m_pos;
        while (m_pos < m_line.size() && m_line[m_pos] != ' ' && m_line[m_pos] != '\t')
            ++m_pos;
        return m_line.substr(start, m_pos - start);
    }
    bool peek(char c) {
        skip_space();
        return m_pos < m_line.size() && m_line[m_pos] == c;
    }
    std::string quoted() {
        skip_space();
        if (m_pos >= m_line.size() || m_line[m_pos] != '"')
            fail("expected a quoted string");
        size_t end = m_pos + 1;
        while (end < m_line.size() && m_line[end] != '"')
            end += m_line[end] == '\\' ? 2 : 1;
        if (end >= m_line.size())
            fail("unterminated string");
        const std::string literal = m_line.substr(m_pos, end - m_pos + 1);
        m_pos = end + 1;
        try {
            return nlohmann::json::parse(literal).get<std::string>();
        } catch (const nlohmann::json::exception&) {
            fail("bad string escape");
        }
    }
    [[noreturn]] void fail(const std::string& what) const {
        raise(ErrorKind::contract, "fixture line " + std::to_string(m_number) + ": " + what);
    }

private:
    const std::string& m_line;
    int m_number;
    size_t m_pos = 0;
};

}  // namespace

ScriptedReplySet::ScriptedReplySet(std::vector<ScriptEntry> entries, Exhaustion policy)
    : m_entries(std::move(entries)), m_used(m_entries.size(), 0), m_policy(policy), m_stamp(m_entries.size(), 0) {}

ScriptedReplySet ScriptedReplySet::parse(const std::string& text) {
    std::vector<ScriptEntry> entries;
    Exhaustion policy = Exhaustion::error;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        LineReader reader(line, number);
        const std::string head = reader.word();
        if (head == "@exhaustion") {
            const std::string value = reader.word();
            if (value == "error") policy = Exhaustion::error;
            else if (value == "repeat-last") policy = Exhaustion::repeat_last;
            else reader.fail("unknown exhaustion policy '" + value + "'");
            continue;
        }
        ScriptEntry entry;
        if (head == "any") entry.kind = ScriptEntry::Kind::any;
        else if (head == "contains") entry.kind = ScriptEntry::Kind::contains;
        else if (head == "exact") entry.kind = ScriptEntry::Kind::exact;
        else if (head == "regex") entry.kind = ScriptEntry::Kind::regex;
        else reader.fail("unknown matcher '" + head + "'");
        if (entry.kind != ScriptEntry::Kind::any)
            entry.pattern = reader.quoted();
        if (entry.kind == ScriptEntry::Kind::regex) {
            try {
                std::regex check(entry.pattern);
            } catch (const std::regex_error&) {
                reader.fail("invalid regex");
            }
        }
        if (!reader.peek('=')) {
            const std::string count = reader.word();
            if (count == "*") {
                entry.uses = -1;
            } else if (count.size() > 1 && count.front() == 'x') {
                try {
                    entry.uses = std::stoi(count.substr(1));
                } catch (const std::logic_error&) {
                    reader.fail("bad repeat count '" + count + "'");
                }
                if (entry.uses < 1)
                    reader.fail("repeat count must be >= 1");
            } else {
                reader.fail("expected x<N>, * or =>");
            }
        }
        if (reader.word() != "=>")
            reader.fail("expected =>");
        entry.reply = reader.quoted();
        if (!reader.at_end())
            reader.fail("trailing characters");
        entries.push_back(std::move(entry));
    }
    return ScriptedReplySet(std::move(entries), policy);
}

ScriptedReplySet ScriptedReplySet::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        raise(ErrorKind::io, "cannot open fixture " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return parse(s.str());
}

bool ScriptedReplySet::matches(const ScriptEntry& entry, const std::string& query) const {
    switch (entry.kind) {
    case ScriptEntry::Kind::any: return true;
    case ScriptEntry::Kind::contains: return to_lower(query).find(to_lower(entry.pattern)) != std::string::npos;
    case ScriptEntry::Kind::exact: return query == entry.pattern;
    case ScriptEntry::Kind::regex: return std::regex_search(query, std::regex(entry.pattern));
    }
    return false;
}

std::string ScriptedReplySet::next(const std::string& query) {
    ++m_calls;
    for (size_t i = 0; i < m_entries.size(); ++i) {
        const auto& entry = m_entries[i];
        if (entry.uses >= 0 && m_used[i] >= entry.uses)
            continue;
        if (!matches(entry, query))
            continue;
        ++m_used[i];
        m_stamp[i] = m_calls;
        return entry.reply;
    }
    if (m_policy == Exhaustion::repeat_last) {
        int best = -1;
        for (size_t i = 0; i < m_entries.size(); ++i)
            if (m_stamp[i] > 0 && (best < 0 || m_stamp[i] > m_stamp[static_cast<size_t>(best)]) &&
                matches(m_entries[i], query))
                best = static_cast<int>(i);
        if (best >= 0)
            return m_entries[static_cast<size_t>(best)].reply;
    }
    raise(ErrorKind::script_exhausted, "no scripted reply left for: " + query.substr(0, 160));
}

}  // namespace stagewise::mock
