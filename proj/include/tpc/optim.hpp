// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <vector>

#include "tpc/model.hpp"

namespace tpc {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.95;
  double eps = 1e-8;
  double weight_decay = 0.1;

  void validate() const;
  friend bool operator==(const AdamWConfig&, const AdamWConfig&) = default;
};

struct OptimizerState {
  AdamWConfig hp;
  std::int64_t step = 0;
  AlignedVector<float> m;
  AlignedVector<float> v;

  static OptimizerState fresh(std::size_t n, const AdamWConfig& hp = {});
  friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

/// Step-decay learning-rate plan. Milestone k sits at llround(frac_k * total_iters).
struct TrainPlan {
  std::int64_t total_iters = 1000;
  int batch_size = 64;
  double base_lr = 1e-3;
  std::vector<double> milestone_fracs{0.7, 0.8, 0.9};
  double decay_factor = 0.1;
  double grad_clip = 1.0;  // global L2 norm; <= 0 disables
  AdamWConfig adamw;
  int log_interval = 10;
  int eval_interval = 0;  // 0: validation loss only on the last iteration
  int val_windows = 16;

  void validate() const;
};

double lr_at(const TrainPlan& plan, std::int64_t iter);

/// Scales grad in place so its global norm is at most max_norm. Returns the
/// norm before clipping (accumulated in double).
double clip_grad_norm(AlignedVector<float>& grad, double max_norm);

/// One decoupled-weight-decay Adam update. Decay is applied only to tensors
/// whose spec has decay set. Throws Error(NonFiniteGradient) naming the first
/// offending tensor and index, leaving params and state untouched.
void adamw_step(OptimizerState& state, ModelParams<float>& params, const AlignedVector<float>& grad,
                double lr);

}  // namespace tpc
