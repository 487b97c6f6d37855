// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/optim.hpp"

#include <cmath>
#include <string>

#include "tpc/error.hpp"

namespace tpc {

void AdamWConfig::validate() const {
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) {
    throw Error(ErrorKind::InvalidConfig, "adam betas must lie in [0, 1)");
  }
  if (!(eps > 0)) throw Error(ErrorKind::InvalidConfig, "adam eps must be positive");
  if (!(weight_decay >= 0)) throw Error(ErrorKind::InvalidConfig, "weight decay must be >= 0");
}

OptimizerState OptimizerState::fresh(std::size_t n, const AdamWConfig& hp) {
  hp.validate();
  OptimizerState s;
  s.hp = hp;
  s.m.assign(n, 0.0f);
  s.v.assign(n, 0.0f);
  return s;
}

void TrainPlan::validate() const {
  if (total_iters < 1) throw Error(ErrorKind::InvalidConfig, "total_iters must be positive");
  if (batch_size < 1) throw Error(ErrorKind::InvalidConfig, "batch_size must be positive");
  if (!(base_lr > 0)) throw Error(ErrorKind::InvalidConfig, "base_lr must be positive");
  if (!(decay_factor > 0 && decay_factor < 1)) {
    throw Error(ErrorKind::InvalidConfig, "decay_factor must lie in (0, 1)");
  }
  double prev = 0.0;
  for (double f : milestone_fracs) {
    if (!(f > prev && f < 1.0)) {
      throw Error(ErrorKind::InvalidConfig, "milestones must be strictly increasing in (0, 1)");
    }
    prev = f;
  }
  if (log_interval < 1) throw Error(ErrorKind::InvalidConfig, "log_interval must be positive");
  if (eval_interval < 0) throw Error(ErrorKind::InvalidConfig, "eval_interval must be >= 0");
  if (val_windows < 1) throw Error(ErrorKind::InvalidConfig, "val_windows must be positive");
  adamw.validate();
}

double lr_at(const TrainPlan& plan, std::int64_t iter) {
  if (iter < 0 || iter >= plan.total_iters) {
    throw Error(ErrorKind::OutOfRange, "iteration " + std::to_string(iter) + " outside plan");
  }
  double lr = plan.base_lr;
  for (double f : plan.milestone_fracs) {
    if (iter >= std::llround(f * static_cast<double>(plan.total_iters))) lr *= plan.decay_factor;
  }
  return lr;
}

double clip_grad_norm(AlignedVector<float>& grad, double max_norm) {
  double sq = 0.0;
  for (float g : grad) sq += static_cast<double>(g) * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0 && std::isfinite(norm) && norm > max_norm) {
    const float s = static_cast<float>(max_norm / norm);
    for (float& g : grad) g *= s;
  }
  return norm;
}

void adamw_step(OptimizerState& state, ModelParams<float>& params, const AlignedVector<float>& grad,
                double lr) {
  const std::size_t n = params.values.size();
  if (grad.size() != n || state.m.size() != n || state.v.size() != n) {
    throw Error(ErrorKind::InvalidConfig, "optimizer shapes do not match parameters");
  }
  for (const TensorSpec& s : params.layout) {
    for (std::size_t i = s.offset; i < s.offset + s.size(); ++i) {
      if (!std::isfinite(grad[i])) {
        throw Error(ErrorKind::NonFiniteGradient,
                    "tensor " + s.name + " element " + std::to_string(i - s.offset) + " at step " +
                        std::to_string(state.step + 1));
      }
    }
  }
  const AdamWConfig& hp = state.hp;
  ++state.step;
  const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.step));
  for (const TensorSpec& s : params.layout) {
    const double shrink = s.decay ? 1.0 - lr * hp.weight_decay : 1.0;
    for (std::size_t i = s.offset; i < s.offset + s.size(); ++i) {
      const double g = grad[i];
      const double m = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * g;
      const double v = hp.beta2 * state.v[i] + (1.0 - hp.beta2) * g * g;
      state.m[i] = static_cast<float>(m);
      state.v[i] = static_cast<float>(v);
      const double update = (m / bc1) / (std::sqrt(v / bc2) + hp.eps);
      params.values[i] = static_cast<float>(params.values[i] * shrink - lr * update);
    }
  }
}

}  // namespace tpc
