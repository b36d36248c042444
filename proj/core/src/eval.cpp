// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "stagewise/errors.hpp"
#include "stagewise/feedback.hpp"
#include "stagewise/text.hpp"

namespace stagewise {

std::string_view to_string(Aspect aspect) {
    switch (aspect) {
    case Aspect::completeness:
        return "completeness";
    case Aspect::attribute:
        return "attribute";
    case Aspect::spatial:
        return "spatial";
    }
    return "?";
}

size_t Questionnaire::count(Aspect aspect) const {
    return static_cast<size_t>(
        std::count_if(questions.begin(), questions.end(), [&](const Question& q) { return q.aspect == aspect; }));
}

const std::vector<std::string>& relation_phrases() {
    static const std::vector<std::string> phrases{
        "on the right side of", "on the left side of", "to the right of", "to the left of", "in front of",
        "on top of", "next to", "above", "below", "under", "beneath", "behind", "beside", "on", "in",
    };
    return phrases;
}

namespace {

struct PhraseHit {
    size_t begin = 0;  // first word index
    size_t end = 0;    // one past the last word
    std::string phrase;
};

std::vector<PhraseHit> scan_relations(const std::vector<std::string>& ws) {
    std::vector<std::vector<std::string>> split_phrases;
    for (const auto& p : relation_phrases())
        split_phrases.push_back(words(p));
    std::vector<PhraseHit> hits;
    for (size_t i = 0; i < ws.size();) {
        bool matched = false;
        for (size_t p = 0; p < split_phrases.size(); ++p) {
            const auto& ph = split_phrases[p];
            if (i + ph.size() <= ws.size() && std::equal(ph.begin(), ph.end(), ws.begin() + static_cast<long>(i))) {
                hits.push_back({i, i + ph.size(), relation_phrases()[p]});
                i += ph.size();
                matched = true;
                break;
            }
        }
        if (!matched)
            ++i;
    }
    return hits;
}

bool same_noun(const std::string& a, const std::string& b) {
    return a == b || a + "s" == b || b + "s" == a || a + "es" == b || b + "es" == a;
}

std::string join(const std::vector<std::string>& ws, size_t begin, size_t end) {
    std::string out;
    for (size_t i = begin; i < end; ++i) {
        if (!out.empty())
            out += ' ';
        out += ws[i];
    }
    return out;
}

}  // namespace

std::vector<StatedRelation> find_relations(std::string_view prompt, const std::vector<std::string>& objects) {
    const auto ws = words(prompt);
    // Word index of each object's head noun in the prompt.
    std::vector<std::pair<size_t, size_t>> located;  // (word index, object index)
    std::set<size_t> used;
    for (size_t o = 0; o < objects.size(); ++o) {
        const std::string head = head_noun(objects[o]);
        for (size_t i = 0; i < ws.size(); ++i) {
            if (!used.count(i) && same_noun(ws[i], head)) {
                located.emplace_back(i, o);
                used.insert(i);
                break;
            }
        }
    }
    std::sort(located.begin(), located.end());

    std::vector<StatedRelation> out;
    for (const auto& hit : scan_relations(ws)) {
        const std::pair<size_t, size_t>* before = nullptr;
        const std::pair<size_t, size_t>* after = nullptr;
        for (const auto& l : located) {
            if (l.first < hit.begin)
                before = &l;
            else if (l.first >= hit.end && !after)
                after = &l;
        }
        if (!before || !after || before->second == after->second)
            continue;
        StatedRelation r{objects[before->second], hit.phrase, objects[after->second]};
        const bool seen = std::any_of(out.begin(), out.end(), [&](const StatedRelation& x) {
            return x.subject == r.subject && x.phrase == r.phrase && x.object == r.object;
        });
        if (!seen)
            out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::string> split_objects(std::string_view prompt) {
    static const std::set<std::string> copulas{"is", "are", "was", "were", "sits", "sit", "stands", "stand",
                                               "lies", "lie", "there", "placed", "located", "with"};
    const auto ws = words(replace_all(std::string(prompt), ",", " and "));
    std::vector<std::pair<size_t, size_t>> cuts;
    for (const auto& hit : scan_relations(ws))
        cuts.emplace_back(hit.begin, hit.end);
    for (size_t i = 0; i < ws.size(); ++i)
        if (ws[i] == "and")
            cuts.emplace_back(i, i + 1);
    std::sort(cuts.begin(), cuts.end());

    std::vector<std::string> out;
    size_t start = 0;
    auto emit = [&](size_t begin, size_t end) {
        while (begin < end && (copulas.count(ws[begin]) || is_article(ws[begin])))
            ++begin;
        while (end > begin && copulas.count(ws[end - 1]))
            --end;
        if (begin < end)
            out.push_back(join(ws, begin, end));
    };
    for (const auto& [b, e] : cuts) {
        if (b < start)
            continue;
        emit(start, b);
        start = e;
    }
    emit(start, ws.size());
    return out;
}

Questionnaire build_questionnaire(const std::string& prompt, const ObjectPlan& plan) {
    Questionnaire q;
    q.prompt = prompt;
    for (const auto& object : plan.objects)
        q.questions.push_back({Aspect::completeness, presence_question(object)});
    for (const auto& object : plan.objects)
        for (auto& text : attribute_questions(object))
            q.questions.push_back({Aspect::attribute, std::move(text)});
    for (const auto& r : find_relations(prompt, plan.objects))
        q.questions.push_back({Aspect::spatial, relation_question(r.subject, r.phrase, r.object)});
    return q;
}

std::optional<double> AspectTally::percent() const {
    if (total == 0)
        return std::nullopt;
    return 100.0 * yes / total;
}

AspectScores aggregate(std::span<const JudgedAnswer> answers) {
    AspectScores s;
    for (const auto& a : answers) {
        auto& t = s.aspects[static_cast<size_t>(a.aspect)];
        ++t.total;
        t.yes += a.yes ? 1 : 0;
    }
    for (const auto& t : s.aspects) {
        s.overall.yes += t.yes;
        s.overall.total += t.total;
    }
    return s;
}

EvalResult evaluate(std::span<const Image> images, std::span<const Questionnaire> questionnaires, VlmPort& judge) {
    require(images.size() == questionnaires.size(), "evaluate needs one questionnaire per image");
    EvalResult result;
    for (size_t i = 0; i < images.size(); ++i) {
        for (const auto& q : questionnaires[i].questions) {
            JudgedAnswer a;
            a.item = i;
            a.aspect = q.aspect;
            a.question = q.text;
            try {
                a.reply = judge.ask(images[i], q.text);
                const YesNo parsed = parse_yes_no(a.reply);
                a.yes = parsed == YesNo::yes;
                if (parsed == YesNo::ambiguous) {
                    a.flagged = true;
                    a.note = "reply is neither yes nor no";
                }
            } catch (const std::exception& e) {
                a.flagged = true;
                a.note = std::string("judge failed: ") + e.what();
            }
            result.answers.push_back(std::move(a));
        }
    }
    result.scores = aggregate(result.answers);
    return result;
}

namespace {

std::string cell(const AspectTally& t) {
    const auto p = t.percent();
    if (!p)
        return "N/A";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *p);
    return buf;
}

}  // namespace

std::string format_report(const AspectScores& scores, const std::string& title) {
    const std::vector<std::string> headers{"", "Objects", "Attributes", "Spatial", "Overall"};
    const std::vector<std::string> row{title, cell(scores.at(Aspect::completeness)), cell(scores.at(Aspect::attribute)),
                                       cell(scores.at(Aspect::spatial)), cell(scores.overall)};
    std::vector<size_t> width(headers.size());
    for (size_t i = 0; i < headers.size(); ++i)
        width[i] = std::max(headers[i].size(), row[i].size());
    auto line = [&](const std::vector<std::string>& cells) {
        std::string out = "|";
        for (size_t i = 0; i < cells.size(); ++i) {
            const size_t pad = width[i] - cells[i].size();
            out += ' ' + (i == 0 ? cells[i] + std::string(pad, ' ') : std::string(pad, ' ') + cells[i]) + " |";
        }
        return out + "\n";
    };
    std::string sep = "|";
    for (size_t w : width)
        sep += std::string(w + 2, '-') + "|";
    return line(headers) + sep + "\n" + line(row);
}

nlohmann::json to_json(const AspectScores& scores) {
    auto tally = [](const AspectTally& t) {
        const auto p = t.percent();
        return nlohmann::json{{"yes", t.yes}, {"total", t.total}, {"percent", p ? nlohmann::json(*p) : nlohmann::json("N/A")}};
    };
    return {{"objects", tally(scores.at(Aspect::completeness))},
            {"attributes", tally(scores.at(Aspect::attribute))},
            {"spatial", tally(scores.at(Aspect::spatial))},
            {"overall", tally(scores.overall)}};
}

nlohmann::json to_json(const EvalResult& result) {
    auto answers = nlohmann::json::array();
    for (const auto& a : result.answers) {
        nlohmann::json j{{"item", a.item},         {"aspect", std::string(to_string(a.aspect))},
                         {"question", a.question}, {"reply", a.reply},
                         {"yes", a.yes},           {"flagged", a.flagged}};
        if (!a.note.empty())
            j["note"] = a.note;
        answers.push_back(std::move(j));
    }
    return {{"scores", to_json(result.scores)}, {"answers", answers}};
}

std::vector<PromptEntry> parse_prompt_list(std::string_view text) {
    std::vector<PromptEntry> out;
    int line_no = 0;
    for (const auto& raw : split(text, '\n')) {
        ++line_no;
        std::string line = raw;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (trim(line).empty() || trim(line).front() == '#')
            continue;
        const auto fields = split(line, '\t');
        if (fields.size() < 2 || trim(fields[0]).empty() || trim(fields[1]).empty())
            raise(ErrorKind::io, "prompt list line " + std::to_string(line_no) + ": expected image<TAB>prompt");
        PromptEntry e{trim(fields[0]), trim(fields[1]), {}};
        if (fields.size() >= 3)
            for (const auto& o : split(fields[2], '|'))
                if (!trim(o).empty())
                    e.objects.push_back(trim(o));
        out.push_back(std::move(e));
    }
    return out;
}

Image read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise(ErrorKind::io, "cannot read " + path.string());
    auto token = [&]() {
        std::string t;
        char c;
        while (in.get(c)) {
            if (c == '#') {
                std::string skip;
                std::getline(in, skip);
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!t.empty())
                    break;
                continue;
            }
            t += c;
        }
        return t;
    };
    if (token() != "P6")
        raise(ErrorKind::io, path.string() + ": not a binary PPM");
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(token());
        h = std::stoi(token());
        maxval = std::stoi(token());
    } catch (const std::exception&) {
        raise(ErrorKind::io, path.string() + ": bad PPM header");
    }
    if (w < 1 || h < 1 || maxval != 255)
        raise(ErrorKind::io, path.string() + ": unsupported PPM geometry");
    std::vector<unsigned char> raw(static_cast<size_t>(w) * h * 3);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        raise(ErrorKind::io, path.string() + ": truncated PPM");
    Image img{3, h, w, std::vector<double>(raw.size())};
    const size_t plane = static_cast<size_t>(w) * h;
    for (size_t i = 0; i < plane; ++i)
        for (size_t c = 0; c < 3; ++c)
            img.pixels[c * plane + i] = raw[i * 3 + c] / 255.0;
    return img;
}

}  // namespace stagewise
