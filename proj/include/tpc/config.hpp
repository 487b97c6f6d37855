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
#include "tpc/curriculum.hpp"
#include "tpc/model.hpp"
#include "tpc/optim.hpp"

namespace tpc {

/// Every knob of a run. Serialized as `key = value` lines; the dump is
/// complete, so reading it back reproduces the run.
struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 1;

  // data
  std::string profile = "standard";
  std::int64_t per_level_count = 1000;
  SplitFractions fractions;
  std::int64_t count = 100;  // generate

  // model and training
  ModelConfig model;
  TrainPlan plan;
  std::string schedule = "baseline";
  std::vector<std::int64_t> stage_iters;  // empty: proportional

  // evaluation
  std::string decode = "greedy";
  double temperature = 1.0;
  std::int64_t eval_limit = 0;  // per level, 0 = whole test split

  // files
  std::string input;
  std::string dataset;
  std::string checkpoint;
  std::vector<std::string> checkpoints;  // compare: name=path
  std::string out;

  void validate() const;
  std::string to_text() const;
  /// Applies `key = value` lines on top of the current values. Unknown keys
  /// and unparsable values throw Error(InvalidConfig).
  void apply_text(std::string_view text);
  void set(std::string_view key, std::string_view value);

  static ExperimentConfig from_text(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);

  GenerateOptions decode_options() const;
  Schedule make_schedule() const;
};

}  // namespace tpc
