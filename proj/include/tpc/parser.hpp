// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <string_view>

#include "tpc/ast.hpp"

namespace tpc {

/// Parses TinyPy source. Syntax only: binding of names is checked at execution.
/// Throws SourceError (SyntaxError / IndentationError) with a 1-based position.
Program parse(std::string_view source);

/// Canonical rendering: 4-space indents, single spaces around binary operators
/// and before `:`, minimal parentheses, trailing newline.
std::string unparse(const Program& program);
std::string unparse(const Expr& expr);

}  // namespace tpc
