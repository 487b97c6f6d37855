// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tpc/corpus.hpp"
#include "tpc/train.hpp"

namespace tpc {

enum class ScheduleKind { Baseline, Sequential, Incremental, Hybrid, HardOnly };

const char* to_string(ScheduleKind kind);
/// Throws Error(UnknownKind).
ScheduleKind parse_schedule_kind(std::string_view name);

enum class Source { Easy, Medium, Hard, HardestEasy50, HardestMedium50, All };

const char* to_string(Source source);

struct StageSpec {
  std::vector<Source> composition;
  std::int64_t iterations = 0;
};

struct Schedule {
  ScheduleKind kind = ScheduleKind::Baseline;
  std::vector<StageSpec> stages;

  std::int64_t total_iters() const;
  void validate() const;

  /// key = value block: kind, total_iters, stage_iters (comma separated).
  std::string to_text() const;
  static Schedule from_text(std::string_view text);
};

/// Stage iteration ratios out of 120: sequential 40/40/40, incremental
/// 25/30/65, hybrid 20/30/70. Other totals scale proportionally (rounded,
/// the last stage takes the remainder). Explicit stage iterations, when
/// given, replace the scaled ones and must match the stage count.
Schedule make_schedule(ScheduleKind kind, std::int64_t total_iters,
                       const std::optional<std::vector<std::int64_t>>& stage_iters = std::nullopt);

inline constexpr double kHardestFraction = 0.5;

/// Train-split snippets a source resolves to (hardest_* use
/// top_fraction_hardest over that level's train split).
std::vector<AnnotatedSnippet> resolve_source(Source source, const LeveledDataset& dataset);

/// Union of the stage's sources, shuffled with a seed derived from (seed, stage index).
std::vector<AnnotatedSnippet> stage_snippets(const StageSpec& spec, const LeveledDataset& dataset,
                                             std::uint64_t seed, int stage_index);

/// Rendered and tokenized stage stream. Throws Error(EmptyComposition).
std::vector<TokenId> materialize_stage(const StageSpec& spec, const LeveledDataset& dataset,
                                       std::uint64_t seed, int stage_index);

struct ScheduleRun {
  ModelParams<float> params;
  std::vector<TrainLog> logs;  // one per stage
  std::vector<std::filesystem::path> checkpoints;
  std::int64_t total_steps = 0;
};

/// Trains the stages in order. Parameters carry over; optimizer moments and
/// the learning-rate schedule restart each stage (plan.total_iters is
/// replaced by the stage's iteration count). Writes stage<k>.ckpt (k from 1)
/// into out_dir when it is non-empty.
ScheduleRun run_schedule(const Schedule& schedule, const LeveledDataset& dataset,
                         const ModelConfig& model_cfg, const TrainPlan& plan, std::uint64_t seed,
                         const std::filesystem::path& out_dir = {}, const TrainHooks& hooks = {});

}  // namespace tpc
