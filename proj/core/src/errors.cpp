// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include "stagewise/errors.hpp"

namespace stagewise {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_plan: return "invalid-plan";
    case ErrorKind::layout_exhausted: return "layout-exhausted";
    case ErrorKind::precise_mask_extraction: return "precise-mask-extraction";
    case ErrorKind::decomposition: return "decomposition";
    case ErrorKind::planning: return "planning";
    case ErrorKind::index: return "index";
    case ErrorKind::degenerate_attention: return "degenerate-attention";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::contract: return "contract";
    case ErrorKind::script_exhausted: return "script-exhausted";
    case ErrorKind::replay_mismatch: return "replay-mismatch";
    case ErrorKind::io: return "io";
    case ErrorKind::backend: return "backend";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), m_kind(kind) {}

void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace stagewise
