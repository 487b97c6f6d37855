// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tpc/random.hpp"
#include "tpc/snippet.hpp"

namespace tpc {

enum class Construct { Assignment, ArithExpr, IfChain, ForLoop, Print };

/// Constraints on random program generation.
struct GrammarProfile {
  std::set<Construct> allowed_constructs;
  int max_nesting = 2;
  int max_elif = 2;
  std::string identifier_pool = "abcdefgh";
  int literal_min = 0;
  int literal_max = 9;
  int max_statements = 12;
  std::optional<int> concept_level;

  bool allows(Construct c) const { return allowed_constructs.count(c) > 0; }

  /// Throws Error(InvalidProfile) when an invariant is violated.
  void validate() const;

  /// Unconstrained mix used for the leveled corpus.
  static GrammarProfile standard();

  friend bool operator==(const GrammarProfile&, const GrammarProfile&) = default;
};

/// Profiles for the six conceptual levels: 1 simple assignments, 2 multi-operator
/// arithmetic, 3 simple if-elif-else, 4 if-elif-else with arithmetic, 5 simple
/// for loops, 6 for loops with arithmetic. Throws Error(OutOfRange).
GrammarProfile concept_profile(int level);

/// Names accepted by profile_by_name: "standard", "level1" .. "level6".
GrammarProfile profile_by_name(const std::string& name);
std::string profile_name(const GrammarProfile& profile);

inline constexpr int kResampleBudget = 1000;
inline constexpr int kMaxRangeTrips = 9;
inline constexpr long long kMaxAbsOutput = 999;

/// Draws one program that parses, binds every name before use, runs within the
/// step budget without runtime error, iterates no range more than 9 times and
/// prints no value above 999 in magnitude.
/// Throws Error(ResampleBudgetExhausted) after 1000 consecutive rejections.
std::string generate_snippet(const GrammarProfile& profile, Rng& rng);

/// `count` independent draws, executed and scored. Reproducible per seed.
std::vector<AnnotatedSnippet> generate_corpus(const GrammarProfile& profile, std::int64_t count,
                                              std::uint64_t seed);

}  // namespace tpc
