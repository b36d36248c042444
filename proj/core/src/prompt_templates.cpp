// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/prompt_templates.hpp"

#include "stagewise/text.hpp"

namespace stagewise {

namespace {

constexpr std::string_view kPreamble =
    "You are an excellent painter. I will give you some descriptions. Your task is to turn the "
    "description into a painting.";

constexpr std::string_view kDecompose =
    "You are an excellent painter. I will give you some descriptions. Your task is to turn the "
    "description into a painting. You only need to list the objects in the description by painting "
    "order, from left to right, from down to top. Do not list additional information other than the "
    "objects mentioned in the description. Description: {p}.";

constexpr std::string_view kFirstPosition =
    "You are an excellent painter. I will give you some descriptions. Your task is to turn the "
    "description into a painting. Now given the description: {p}. If I want to paint the {obj_1} in "
    "the painting firstly, where to put the {obj_1}? Choose from left, right, top, and bottom. You can "
    "make reasonable guesses. Give one answer.";

constexpr std::string_view kFirstCountHorizontal =
    "You are an excellent painter. I will give you some descriptions. Your task is to turn the "
    "description into a painting. Now given the description: {p}. How many non-overlapping objects "
    "are there in the horizontal direction? ONLY give the final number.";

constexpr std::string_view kFirstCountVertical =
    "You are an excellent painter. I will give you some descriptions. Your task is to turn the "
    "description into a painting. Now given the description: {p}. How many non-overlapping objects "
    "are there in the vertical direction? ONLY give the final number.";

constexpr std::string_view kNextPosition =
    "You are an excellent painter. I will give you some descriptions. Your task is to turn the "
    "description into a painting. Now given the description: {p}. If I already have a painting that "
    "contains {objs}, what is the position of the {obj_n} relative to the {obj_prev}? Choose from "
    "left, right, above, bottom, and none of above. You can make reasonable guesses. Give one answer.";

constexpr std::string_view kNextCount =
    "You are an excellent painter. I will give you some descriptions. Your task is to turn the "
    "description into a painting. Now given the description: {p}. If I already have a painting that "
    "contains {objs}, how many objects are there in/on the {opt_n} of {obj_prev}? Only give the "
    "final number.";

// The overlap query reuses the planner preamble and asks for a yes/no answer.
constexpr std::string_view kOverlap =
    "You are an excellent painter. I will give you some descriptions. Your task is to turn the "
    "description into a painting. Now given the description: {p}. If I already have a painting that "
    "contains {obj_prev}, will the {obj_n} overlap with the {obj_prev} in the painting? Answer yes "
    "or no.";

}  // namespace

std::string_view template_text(TemplateId id) {
    switch (id) {
    case TemplateId::decompose: return kDecompose;
    case TemplateId::first_position: return kFirstPosition;
    case TemplateId::first_count_horizontal: return kFirstCountHorizontal;
    case TemplateId::first_count_vertical: return kFirstCountVertical;
    case TemplateId::next_position: return kNextPosition;
    case TemplateId::next_count: return kNextCount;
    case TemplateId::overlap: return kOverlap;
    }
    return kPreamble;
}

std::string_view template_name(TemplateId id) {
    switch (id) {
    case TemplateId::decompose: return "decompose";
    case TemplateId::first_position: return "first_position";
    case TemplateId::first_count_horizontal: return "first_count_horizontal";
    case TemplateId::first_count_vertical: return "first_count_vertical";
    case TemplateId::next_position: return "next_position";
    case TemplateId::next_count: return "next_count";
    case TemplateId::overlap: return "overlap";
    }
    return "unknown";
}

std::string render_template(TemplateId id, const TemplateArgs& args) {
    std::string out(template_text(id));
    for (const auto& [key, value] : args)
        out = replace_all(std::move(out), "{" + std::string(key) + "}", value);
    return out;
}

}  // namespace stagewise
