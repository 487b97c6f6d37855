// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "tpc/ast.hpp"

namespace tpc {

/// Basic-block control-flow graph of one program. Straight-line statements
/// share a block; every if/elif condition and every for header is a node with
/// two successors.
struct ControlFlowGraph {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;
  int entry = 0;
  int exit = 0;

  int num_edges() const { return static_cast<int>(edges.size()); }
  /// Weakly connected components.
  int components() const;
  /// E - N + 2P.
  int cyclomatic() const { return num_edges() - num_nodes + 2 * components(); }
};

ControlFlowGraph build_cfg(const Program& program);

/// Number of if/elif conditions and for headers.
int decision_count(const Program& program);

/// 1 + decisions.
double cyclomatic_complexity(const Program& program);

struct HalsteadCounts {
  std::int64_t eta1 = 0;      // distinct operators
  std::int64_t eta2 = 0;      // distinct operands
  std::int64_t n1_total = 0;  // operator occurrences
  std::int64_t n2_total = 0;  // operand occurrences

  friend bool operator==(const HalsteadCounts&, const HalsteadCounts&) = default;
};

/// Operators: = + - * % < > <= >= == != if elif else for in range print.
/// Operands: identifiers (by name) and integer literals (by value).
HalsteadCounts halstead_counts(const Program& program);

struct HalsteadMeasures {
  double vocabulary = 0;
  double length = 0;
  double calculated_length = 0;
  double volume = 0;
  double difficulty = 0;
  double effort = 0;
  double time = 0;  // seconds
  double bugs = 0;
};

HalsteadMeasures halstead_measures(const HalsteadCounts& c);

/// Mean of cyclomatic complexity and Halstead difficulty.
double overall_metric(double cc, double hd);

enum class DifficultyLevel { Easy, Medium, Hard };

inline constexpr double kEasyUpperBound = 2.0;  // easy: om < 2
inline constexpr double kHardLowerBound = 4.0;  // hard: om >= 4

DifficultyLevel classify(double om);

const char* to_string(DifficultyLevel level);
DifficultyLevel parse_level(std::string_view name);

struct DifficultyScore {
  double cc = 1;
  double hd = 0;
  double om = 0.5;

  friend bool operator==(const DifficultyScore&, const DifficultyScore&) = default;
};

DifficultyScore score(const Program& program);

}  // namespace tpc
