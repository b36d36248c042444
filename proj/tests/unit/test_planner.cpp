// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "stagewise/errors.hpp"
#include "stagewise/mock/scripted_ports.hpp"
#include "stagewise/planner.hpp"
#include "stagewise/prompt_templates.hpp"

using namespace stagewise;
using stagewise::mock::ScriptedReplySet;
using stagewise::mock::ScriptedTextPort;

namespace {

const std::string kPrompt = "the orange pumpkin is on the right side of the black door";

ScriptedTextPort port(const std::string& script) {
    return ScriptedTextPort(ScriptedReplySet::parse(script));
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorKind::contract;
}

}  // namespace

TEST(ParseObjectList, NumberedList) {
    EXPECT_EQ(parse_object_list("1. black door\n2. orange pumpkin", kPrompt),
              (std::vector<std::string>{"black door", "orange pumpkin"}));
}

TEST(ParseObjectList, CommaList) {
    EXPECT_EQ(parse_object_list("black door, orange pumpkin", kPrompt),
              (std::vector<std::string>{"black door", "orange pumpkin"}));
}

TEST(ParseObjectList, LineList) {
    EXPECT_EQ(parse_object_list("Objects:\n- black door\n- orange pumpkin\n", kPrompt),
              (std::vector<std::string>{"black door", "orange pumpkin"}));
}

TEST(ParseObjectList, LeadingArticlesAreDropped) {
    EXPECT_EQ(parse_object_list("1. The black door\n2. an orange pumpkin", kPrompt),
              (std::vector<std::string>{"black door", "orange pumpkin"}));
    EXPECT_EQ(parse_object_list("a red apple", "a red apple"), (std::vector<std::string>{"red apple"}));
}

TEST(ParseObjectList, ChatterIsRejected) {
    EXPECT_EQ(parse_object_list("Sure! Here is my plan...", kPrompt), std::nullopt);
}

TEST(SubPrompt, Format) {
    const ObjectPlan plan{kPrompt, {"black door", "orange pumpkin"}};
    EXPECT_EQ(make_subprompt(plan, 1).text, "black door");
    EXPECT_EQ(make_subprompt(plan, 1).token_index, 1);
    EXPECT_EQ(make_subprompt(plan, 2).text, "orange pumpkin and black door");
    EXPECT_EQ(make_subprompt(plan, 2).token_index, 1);
    EXPECT_EQ(kind_of([&] { make_subprompt(plan, 3); }), ErrorKind::index);
    EXPECT_EQ(kind_of([&] { make_subprompt(plan, 0); }), ErrorKind::index);
}

TEST(SubPrompt, ContainsObjectVerbatim) {
    const ObjectPlan plan{"x", {"a", "big red barn", "small dog", "tall tree"}};
    for (int n = 1; n <= plan.size(); ++n)
        EXPECT_NE(make_subprompt(plan, n).text.find(plan.objects[static_cast<size_t>(n - 1)]), std::string::npos);
}

TEST(Projection, Closure) {
    for (auto w : {PositionWord::left, PositionWord::right, PositionWord::top, PositionWord::bottom}) {
        EXPECT_TRUE(is_first_position(*project_first(w)));
        EXPECT_TRUE(is_next_position(*project_next(w)));
    }
    EXPECT_EQ(project_first(PositionWord::right), Position::left);
    EXPECT_EQ(project_first(PositionWord::top), Position::bottom);
    EXPECT_EQ(project_next(PositionWord::none), std::nullopt);
}

TEST(Projection, PositionWords) {
    EXPECT_EQ(parse_position_word("Above."), PositionWord::top);
    EXPECT_EQ(parse_position_word("none of above"), PositionWord::none);
    EXPECT_EQ(parse_position_word("I would put it on the left"), PositionWord::left);
    EXPECT_EQ(parse_position_word("somewhere"), std::nullopt);
}

TEST(Planner, DecomposeSendsTemplate) {
    auto p = port(R"(contains "Description: the orange pumpkin" => "1. black door\n2. orange pumpkin")");
    LlmPlanner planner(p);
    const auto plan = planner.decompose(kPrompt);
    EXPECT_EQ(plan.objects, (std::vector<std::string>{"black door", "orange pumpkin"}));
    ASSERT_EQ(planner.transcript().size(), 1u);
    EXPECT_EQ(planner.transcript()[0].prompt, render_template(TemplateId::decompose, {{"p", kPrompt}}));
}

TEST(Planner, DecomposeRetriesThenFails) {
    auto p = port(R"(any x4 => "Sure! Here is my plan...")");
    LlmPlanner planner(p, 3);
    EXPECT_EQ(kind_of([&] { planner.decompose(kPrompt); }), ErrorKind::decomposition);
    EXPECT_EQ(planner.transcript().size(), 4u);
    EXPECT_EQ(p.script().calls(), 4);
    EXPECT_NE(planner.transcript()[1].prompt.find(list_retry_suffix), std::string::npos);
}

TEST(Planner, FirstLeftTwo) {
    auto p = port("contains \"firstly\" => \"left\"\ncontains \"horizontal\" => \"2\"\n");
    LlmPlanner planner(p);
    const auto pl = planner.plan_first(kPrompt, "black door");
    EXPECT_EQ(pl.position, Position::left);
    EXPECT_EQ(pl.count, 2);
}

TEST(Planner, FirstTopProjectsToBottomAndAsksVertical) {
    auto p = port("contains \"firstly\" => \"top\"\ncontains \"vertical\" => \"1\"\n");
    LlmPlanner planner(p);
    const auto pl = planner.plan_first(kPrompt, "black door");
    EXPECT_EQ(pl.position, Position::bottom);
    EXPECT_EQ(pl.count, 1);
}

TEST(Planner, FirstBottomThree) {
    auto p = port("contains \"firstly\" => \"bottom\"\ncontains \"vertical\" => \"3\"\n");
    LlmPlanner planner(p);
    const auto pl = planner.plan_first(kPrompt, "black door");
    EXPECT_EQ(pl.position, Position::bottom);
    EXPECT_EQ(pl.count, 3);
}

TEST(Planner, CountIsClampedAndRetried) {
    auto p = port("contains \"firstly\" => \"left\"\ncontains \"horizontal\" => \"lots\"\n"
                  "contains \"single word/number\" => \"40\"\n");
    LlmPlanner planner(p);
    const auto pl = planner.plan_first(kPrompt, "black door");
    EXPECT_EQ(pl.count, 6);
    EXPECT_EQ(planner.transcript().size(), 3u);
    EXPECT_EQ(planner.transcript()[1].parsed, "<unparsed>");
}

TEST(Planner, NonNumericCountFails) {
    auto p = port("contains \"firstly\" => \"left\"\ncontains \"horizontal\" * => \"many\"\n");
    LlmPlanner planner(p, 2);
    EXPECT_EQ(kind_of([&] { planner.plan_first(kPrompt, "black door"); }), ErrorKind::planning);
}

TEST(Planner, NextRightOne) {
    auto p = port("contains \"position of the\" => \"right\"\ncontains \"how many objects\" => \"1\"\n");
    LlmPlanner planner(p);
    const auto pl = planner.plan_next(kPrompt, {"black door"}, "orange pumpkin");
    EXPECT_EQ(pl.position, Position::right);
    EXPECT_EQ(pl.count, 1);
    EXPECT_NE(planner.transcript()[1].prompt.find("in/on the right of black door"), std::string::npos);
}

TEST(Planner, NextAboveTwo) {
    auto p = port("contains \"position of the\" => \"above\"\ncontains \"how many objects\" => \"2\"\n");
    LlmPlanner planner(p);
    const auto pl = planner.plan_next(kPrompt, {"black door"}, "orange pumpkin");
    EXPECT_EQ(pl.position, Position::top);
    EXPECT_EQ(pl.count, 2);
}

TEST(Planner, NextNoneIsPlanningError) {
    auto p = port("contains \"position of the\" * => \"none of above\"\n");
    LlmPlanner planner(p, 3);
    EXPECT_EQ(kind_of([&] { planner.plan_next(kPrompt, {"black door"}, "orange pumpkin"); }), ErrorKind::planning);
    EXPECT_EQ(planner.transcript().size(), 4u);
}

TEST(Planner, Overlap) {
    {
        auto p = port(R"(any => "Yes, the cat sits on the box.")");
        LlmPlanner planner(p);
        const auto j = planner.judge_overlap(kPrompt, "cat", "box");
        EXPECT_TRUE(j.overlap);
        EXPECT_FALSE(j.ambiguous);
    }
    {
        auto p = port(R"(any => "No.")");
        LlmPlanner planner(p);
        EXPECT_FALSE(planner.judge_overlap(kPrompt, "cat", "box").overlap);
    }
    {
        auto p = port(R"(any * => "It depends...")");
        LlmPlanner planner(p, 3);
        const auto j = planner.judge_overlap(kPrompt, "cat", "box");
        EXPECT_FALSE(j.overlap);
        EXPECT_TRUE(j.ambiguous);
        EXPECT_EQ(planner.transcript().size(), 4u);
    }
}

TEST(Planner, TranscriptCountsEveryCall) {
    auto p = port("contains \"firstly\" => \"hmm\"\ncontains \"firstly\" => \"left\"\ncontains \"horizontal\" => \"2\"\n");
    LlmPlanner planner(p);
    planner.plan_first(kPrompt, "black door");
    EXPECT_EQ(static_cast<int>(planner.transcript().size()), p.script().calls());
}

TEST(Templates, PlannerWording) {
    const auto t = render_template(TemplateId::first_position, {{"p", "P"}, {"obj_1", "door"}});
    EXPECT_NE(t.find("You are an excellent painter."), std::string::npos);
    EXPECT_NE(t.find("If I want to paint the door in the painting firstly, where to put the door?"),
              std::string::npos);
    EXPECT_EQ(t.find('{'), std::string::npos);
}
