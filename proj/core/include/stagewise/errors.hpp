// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stagewise {

enum class ErrorKind {
    invalid_plan,
    layout_exhausted,
    precise_mask_extraction,
    decomposition,
    planning,
    index,
    degenerate_attention,
    numeric,
    contract,
    script_exhausted,
    replay_mismatch,
    io,
    backend,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers
/// (orchestrator, feedback controller, CLI) can pick a recovery path.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return m_kind; }

private:
    ErrorKind m_kind;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

inline void require(bool condition, const std::string& message) {
    if (!condition)
        raise(ErrorKind::contract, message);
}

}  // namespace stagewise
