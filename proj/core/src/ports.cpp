// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/ports.hpp"

namespace stagewise {

std::string_view to_string(BlockGroup group) {
    switch (group) {
    case BlockGroup::near_input: return "near-input";
    case BlockGroup::near_middle: return "near-middle";
    case BlockGroup::near_output: return "near-output";
    }
    return "near-middle";
}

std::optional<BlockGroup> block_group_from_string(std::string_view text) {
    if (text == "near-input" || text == "near_input") return BlockGroup::near_input;
    if (text == "near-middle" || text == "near_middle") return BlockGroup::near_middle;
    if (text == "near-output" || text == "near_output") return BlockGroup::near_output;
    return std::nullopt;
}

std::vector<const BlockAttention*> AttentionMaps::select(BlockGroup group) const {
    std::vector<const BlockAttention*> out;
    for (const auto& block : blocks)
        if (block.group == group)
            out.push_back(&block);
    return out;
}

}  // namespace stagewise
