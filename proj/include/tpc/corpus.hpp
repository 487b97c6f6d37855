// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tpc/grammar.hpp"
#include "tpc/snippet.hpp"

namespace tpc {

struct SplitFractions {
  double train = 0.85;
  double val = 0.13;
  double test = 0.02;
};

enum class Split { Train, Val, Test };
const char* to_string(Split split);

struct SplitCounts {
  std::int64_t train = 0;
  std::int64_t val = 0;
  std::int64_t test = 0;
};

/// train = floor(n * train_frac), val = floor(n * val_frac), test = the rest.
SplitCounts split_counts(std::int64_t n, const SplitFractions& fractions);

struct SplitSet {
  std::vector<AnnotatedSnippet> train;
  std::vector<AnnotatedSnippet> val;
  std::vector<AnnotatedSnippet> test;

  const std::vector<AnnotatedSnippet>& get(Split s) const;
  std::vector<AnnotatedSnippet>& get(Split s);
};

struct LeveledDataset {
  std::array<SplitSet, 3> levels;  // indexed by DifficultyLevel
  SplitSet all;                    // seeded shuffle of the three levels, per split

  std::int64_t per_level_count = 0;
  SplitFractions fractions;
  std::uint64_t seed = 0;
  std::string profile = "standard";
  std::int64_t draws = 0;  // candidates generated to fill all levels

  const SplitSet& level(DifficultyLevel l) const { return levels[static_cast<std::size_t>(l)]; }
  SplitSet& level(DifficultyLevel l) { return levels[static_cast<std::size_t>(l)]; }
};

inline constexpr std::int64_t kStarvationWindow = 1'000'000;
inline constexpr double kMinAcceptanceRate = 0.001;

/// Rejection-samples the generator until every level holds per_level_count
/// snippets, partitions each level by seed, then shuffles the ALL splits.
/// Throws Error(LevelStarvation) if a level's acceptance rate is below 0.1%
/// after 1e6 draws.
LeveledDataset build_leveled(std::int64_t per_level_count, const SplitFractions& fractions,
                             std::uint64_t seed,
                             const GrammarProfile& profile = GrammarProfile::standard());

/// The ceil(fraction * n) snippets with the highest OM, ties broken by higher
/// CC then input order; returned in input order.
std::vector<AnnotatedSnippet> top_fraction_hardest(std::span<const AnnotatedSnippet> snippets,
                                                   double fraction);

/// Concatenated annotated renderings; this is the training text.
std::string render_stream(std::span<const AnnotatedSnippet> snippets);

/// Inverse of render_stream. Throws OffsetError(MalformedFile) with the byte
/// offset of the first problem.
std::vector<AnnotatedSnippet> parse_stream(std::string_view text);

/// <root>/{easy,medium,hard,all}/{train,val,test}.txt plus manifest.json.
void write_dataset(const LeveledDataset& dataset, const std::filesystem::path& root);
LeveledDataset read_dataset(const std::filesystem::path& root);

struct HistogramBin {
  double lo = 0.0;  // bin covers [lo, lo + width)
  std::int64_t count = 0;
};

/// OM histogram from the lowest to the highest occupied bin, empty bins kept.
std::vector<HistogramBin> om_histogram(std::span<const AnnotatedSnippet> snippets,
                                       double width = 0.25);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace tpc
