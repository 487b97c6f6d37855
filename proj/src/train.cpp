// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "tpc/error.hpp"

namespace tpc {

std::string TrainLog::csv_row(const TrainLogRow& r) {
  char buf[160];
  if (std::isnan(r.val_loss)) {
    std::snprintf(buf, sizeof buf, "%lld,%d,%.9g,%.9g,", static_cast<long long>(r.iter), r.stage,
                  r.lr, r.train_loss);
  } else {
    std::snprintf(buf, sizeof buf, "%lld,%d,%.9g,%.9g,%.9g", static_cast<long long>(r.iter),
                  r.stage, r.lr, r.train_loss, r.val_loss);
  }
  return buf;
}

std::string TrainLog::csv() const {
  std::string out = std::string(kHeader) + "\n";
  for (const auto& r : rows) out += csv_row(r) + "\n";
  return out;
}

TrainState start_training(ModelParams<float> params, const TrainPlan& plan, std::uint64_t seed,
                          int stage) {
  plan.validate();
  TrainState s{std::move(params), {}, Rng(seed), 0, stage};
  s.opt = OptimizerState::fresh(s.params.values.size(), plan.adamw);
  return s;
}

double fixed_window_loss(const ModelParams<float>& params, std::span<const TokenId> stream,
                         int count) {
  const std::size_t w = static_cast<std::size_t>(params.config.block_size) + 1;
  if (stream.size() < w || count < 1) {
    throw Error(ErrorKind::InvalidConfig, "stream shorter than one window");
  }
  const std::size_t span = stream.size() - w;
  std::vector<TokenId> batch;
  batch.reserve(w * static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const std::size_t start = count == 1 ? 0 : span * static_cast<std::size_t>(i) / (count - 1);
    batch.insert(batch.end(), stream.begin() + start, stream.begin() + start + w);
  }
  TransformerEngine<float> engine(params.config);
  return engine.loss_only(params, batch, count);
}

TrainLog train(TrainState& state, const TrainPlan& plan, std::span<const TokenId> stream,
               std::span<const TokenId> val_stream, const TrainHooks& hooks) {
  plan.validate();
  const ModelConfig& cfg = state.params.config;
  const std::size_t w = static_cast<std::size_t>(cfg.block_size) + 1;
  if (stream.size() <= w) {
    throw Error(ErrorKind::InvalidConfig, "training stream must be longer than block_size + 1");
  }
  const bool has_val = val_stream.size() >= w;
  TransformerEngine<float> engine(cfg);
  std::vector<TokenId> batch(w * static_cast<std::size_t>(plan.batch_size));
  AlignedVector<float> grad;
  TrainLog log;
  const std::size_t n = stream.size();

  while (state.iter < plan.total_iters) {
    const std::int64_t it = state.iter;
    for (int b = 0; b < plan.batch_size; ++b) {
      // without wrap-around the last snippets only ever sit at late positions
      const std::size_t start = state.rng.below(n);
      auto out = batch.begin() + static_cast<std::ptrdiff_t>(b * w);
      const std::size_t head = std::min(w, n - start);
      out = std::copy(stream.begin() + start, stream.begin() + start + head, out);
      std::copy(stream.begin(), stream.begin() + (w - head), out);
    }
    const double loss = engine.loss_and_grads(state.params, batch, plan.batch_size, grad);
    if (!std::isfinite(loss)) {
      throw Error(ErrorKind::NonFiniteGradient, "non-finite loss at step " + std::to_string(it));
    }
    if (plan.grad_clip > 0) clip_grad_norm(grad, plan.grad_clip);
    const double lr = lr_at(plan, it);
    adamw_step(state.opt, state.params, grad, lr);
    ++state.iter;

    const bool last = state.iter == plan.total_iters;
    if (it % plan.log_interval == 0 || last) {
      TrainLogRow row{it, state.stage, lr, loss, std::numeric_limits<double>::quiet_NaN()};
      const bool eval_now = plan.eval_interval > 0 ? (it % plan.eval_interval == 0 || last) : last;
      if (has_val && eval_now) {
        row.val_loss = fixed_window_loss(state.params, val_stream, plan.val_windows);
      }
      log.rows.push_back(row);
      if (hooks.on_log) hooks.on_log(row);
    }
    if (hooks.should_stop && hooks.should_stop(state)) break;
  }
  return log;
}

}  // namespace tpc
