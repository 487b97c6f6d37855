// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tpc/model.hpp"
#include "tpc/optim.hpp"
#include "tpc/random.hpp"

namespace tpc {

struct TrainLogRow {
  std::int64_t iter = 0;
  int stage = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;  // NaN when not evaluated at this row
};

struct TrainLog {
  std::vector<TrainLogRow> rows;

  static constexpr const char* kHeader = "iter,stage,lr,train_loss,val_loss";
  /// Header plus one line per row; a missing val_loss is an empty field.
  std::string csv() const;
  static std::string csv_row(const TrainLogRow& row);
};

/// Everything needed to continue a run exactly where it stopped.
struct TrainState {
  ModelParams<float> params;
  OptimizerState opt;
  Rng rng;
  std::int64_t iter = 0;  // optimizer steps already taken in this stage
  int stage = 0;
};

struct TrainHooks {
  std::function<void(const TrainLogRow&)> on_log;
  /// Called after every step; returning true stops the loop early (the state
  /// stays resumable).
  std::function<bool(const TrainState&)> should_stop;
};

/// Fresh state: given params, zeroed moments, rng seeded from `seed`.
TrainState start_training(ModelParams<float> params, const TrainPlan& plan, std::uint64_t seed,
                          int stage = 0);

/// Runs optimizer steps from state.iter up to plan.total_iters. Each step
/// draws batch_size windows of block_size+1 ids at uniform random offsets of
/// `stream`, read cyclically so every snippet is seen at every window position
/// (the stream is a sequence of blank-line separated snippets). Validation loss, when `val_stream` is long enough, uses fixed
/// evenly spaced windows.
TrainLog train(TrainState& state, const TrainPlan& plan, std::span<const TokenId> stream,
               std::span<const TokenId> val_stream = {}, const TrainHooks& hooks = {});

/// Mean loss over `count` evenly spaced windows of `stream`.
double fixed_window_loss(const ModelParams<float>& params, std::span<const TokenId> stream,
                         int count);

}  // namespace tpc
