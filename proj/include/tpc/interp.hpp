// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tpc/ast.hpp"

namespace tpc {

inline constexpr std::int64_t kDefaultStepBudget = 10'000;

/// Marker line separating code from its recorded output.
inline constexpr std::string_view kOutputMarker = "# output";

struct ExecutionOutput {
  std::vector<std::string> lines;  // decimal renderings, one per print
  std::int64_t step_count = 0;
  std::int64_t max_trip_count = 0;  // largest range() length entered

  friend bool operator==(const ExecutionOutput&, const ExecutionOutput&) = default;
};

/// Runs the program with Python semantics for the subset (floored `%`,
/// half-open ranges, left-to-right evaluation). Throws Error with
/// ModuloByZero, StepBudgetExceeded, UnboundVariable or IntegerOverflow.
ExecutionOutput execute(const Program& program, std::int64_t step_budget = kDefaultStepBudget);

/// Floored modulo as in Python; divisor must be non-zero.
std::int64_t floor_mod(std::int64_t a, std::int64_t b);

/// code, "# output", one "# <value>" line per output line, then a blank line.
std::string render_annotated(std::string_view source, const std::vector<std::string>& output_lines);

/// The exact text a model must produce after "# output\n": each value as
/// "# <value>\n", then the terminating "\n".
std::string expected_output_block(const std::vector<std::string>& output_lines);

struct AnnotatedText {
  std::string source;
  std::vector<std::string> output_lines;
};

/// Inverse of render_annotated for a single snippet. Throws
/// OffsetError(MalformedFile) relative to the start of `text`.
AnnotatedText split_annotated(std::string_view text);

}  // namespace tpc
