// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stagewise/ports.hpp"

namespace stagewise::mock {

// Fixture grammar, one record per line:
//
//   # comment
//   @exhaustion error | repeat-last
//   <matcher> [x<N> | *] => "<reply>"
//
//   <matcher> := any | contains "<text>" | exact "<text>" | regex "<ecmascript>"
//
// Strings use JSON escaping. `contains` is case-insensitive. An entry is
// used at most N times (default 1, `*` = unlimited). A call takes the first
// entry, in file order, that matches and still has uses left. When none is
// left, `error` raises script_exhausted and `repeat-last` replays the most
// recent entry whose matcher accepts the call.

struct ScriptEntry {
    enum class Kind { any, contains, exact, regex };
    Kind kind = Kind::any;
    std::string pattern;
    std::string reply;
    int uses = 1;  // -1 = unlimited
};

class ScriptedReplySet {
public:
    enum class Exhaustion { error, repeat_last };

    ScriptedReplySet() = default;
    ScriptedReplySet(std::vector<ScriptEntry> entries, Exhaustion policy = Exhaustion::error);

    static ScriptedReplySet parse(const std::string& text);
    static ScriptedReplySet load(const std::filesystem::path& path);

    /// Reply for `query`; consumes one use of the chosen entry.
    std::string next(const std::string& query);

    const std::vector<ScriptEntry>& entries() const { return m_entries; }
    Exhaustion policy() const { return m_policy; }
    int calls() const { return m_calls; }

private:
    bool matches(const ScriptEntry& entry, const std::string& query) const;

    std::vector<ScriptEntry> m_entries;
    std::vector<int> m_used;
    Exhaustion m_policy = Exhaustion::error;
    std::vector<int> m_stamp;  // call number of each entry's latest use, 0 = never
    int m_calls = 0;
};

/// Planner double: the matcher sees the full prompt text.
class ScriptedTextPort : public TextCompletionPort {
public:
    explicit ScriptedTextPort(ScriptedReplySet script) : m_script(std::move(script)) {}
    std::string complete(const std::string& prompt) override { return m_script.next(prompt); }
    const ScriptedReplySet& script() const { return m_script; }

private:
    ScriptedReplySet m_script;
};

/// Checker/judge double: the matcher sees the question; the image is ignored.
class ScriptedVlm : public VlmPort {
public:
    explicit ScriptedVlm(ScriptedReplySet script) : m_script(std::move(script)) {}
    std::string ask(const Image&, const std::string& question) override { return m_script.next(question); }
    const ScriptedReplySet& script() const { return m_script; }

private:
    ScriptedReplySet m_script;
};

/// Checker that answers "Yes" to everything.
class AlwaysYesVlm : public VlmPort {
public:
    std::string ask(const Image&, const std::string&) override { return "Yes"; }
};

}  // namespace stagewise::mock
