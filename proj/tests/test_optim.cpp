// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "tpc/error.hpp"
#include "tpc/optim.hpp"

using namespace tpc;

namespace {

ModelParams<float> small_params() { return init_params<float>({1, 1, 4, 4, 8}, 1); }

}  // namespace

TEST(Optim, LrSchedule) {
  TrainPlan plan;
  plan.total_iters = 1000;
  EXPECT_DOUBLE_EQ(lr_at(plan, 0), 1e-3);
  EXPECT_DOUBLE_EQ(lr_at(plan, 699), 1e-3);
  EXPECT_NEAR(lr_at(plan, 700), 1e-4, 1e-18);
  EXPECT_NEAR(lr_at(plan, 750), 1e-4, 1e-18);
  EXPECT_NEAR(lr_at(plan, 800), 1e-5, 1e-18);
  EXPECT_NEAR(lr_at(plan, 950), 1e-6, 1e-18);
  EXPECT_THROW(lr_at(plan, 1000), Error);
  EXPECT_THROW(lr_at(plan, -1), Error);
}

TEST(Optim, ZeroGradNoDecayUnchanged) {
  auto p = small_params();
  const auto before = p.values;
  AdamWConfig hp;
  hp.weight_decay = 0;
  auto st = OptimizerState::fresh(p.values.size(), hp);
  adamw_step(st, p, AlignedVector<float>(p.values.size(), 0.f), 1e-3);
  EXPECT_EQ(p.values, before);
  EXPECT_EQ(st.step, 1);
}

TEST(Optim, DecayOnlyShrinks) {
  auto p = small_params();
  const auto before = p.values;
  auto st = OptimizerState::fresh(p.values.size());
  adamw_step(st, p, AlignedVector<float>(p.values.size(), 0.f), 1e-2);
  for (const auto& t : p.layout) {
    for (std::size_t i = t.offset; i < t.offset + t.size(); ++i) {
      const double want = t.decay ? before[i] * (1 - 1e-2 * 0.1) : before[i];
      ASSERT_FLOAT_EQ(p.values[i], static_cast<float>(want)) << t.name;
    }
  }
}

TEST(Optim, HandComputedStep) {
  // two steps on one scalar, g = 0.5 then -0.2, lr 0.1, no decay
  // m1 = 0.05, v1 = 0.0125, mhat = 0.5, vhat = 0.25 -> delta = 0.1 * 0.5 / (0.5 + 1e-8)
  // m2 = 0.045 - 0.02 = 0.025, v2 = 0.011875 + 0.002 = 0.013875
  // mhat = 0.025 / 0.19, vhat = 0.013875 / 0.0975
  auto p = small_params();
  AdamWConfig hp;
  hp.weight_decay = 0;
  auto st = OptimizerState::fresh(p.values.size(), hp);
  const std::size_t k = 3;
  const double x0 = p.values[k];
  AlignedVector<float> g(p.values.size(), 0.f);
  g[k] = 0.5f;
  adamw_step(st, p, g, 0.1);
  const double x1 = x0 - 0.1 * 0.5 / (0.5 + 1e-8);
  EXPECT_NEAR(p.values[k], x1, 1e-6);
  g[k] = -0.2f;
  adamw_step(st, p, g, 0.1);
  const double mhat = 0.025 / 0.19, vhat = 0.013875 / 0.0975;
  EXPECT_NEAR(p.values[k], x1 - 0.1 * mhat / (std::sqrt(vhat) + 1e-8), 1e-6);
  EXPECT_NEAR(st.m[k], 0.025, 1e-7);
  EXPECT_NEAR(st.v[k], 0.013875, 1e-7);
}

TEST(Optim, NonFiniteGradient) {
  auto p = small_params();
  const auto before = p.values;
  auto st = OptimizerState::fresh(p.values.size());
  AlignedVector<float> g(p.values.size(), 0.1f);
  g[5] = std::numeric_limits<float>::quiet_NaN();
  try {
    adamw_step(st, p, g, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteGradient);
  }
  EXPECT_EQ(p.values, before);
  EXPECT_EQ(st.step, 0);
}

TEST(Optim, Clip) {
  AlignedVector<float> g = {3.f, 4.f};
  EXPECT_DOUBLE_EQ(clip_grad_norm(g, 1.0), 5.0);
  EXPECT_NEAR(g[0], 0.6f, 1e-6);
  EXPECT_NEAR(g[1], 0.8f, 1e-6);
  AlignedVector<float> small = {0.3f, 0.4f};
  clip_grad_norm(small, 1.0);
  EXPECT_EQ(small, (AlignedVector<float>{0.3f, 0.4f}));
}

TEST(Optim, PlanValidation) {
  TrainPlan p;
  p.total_iters = 0;
  EXPECT_THROW(p.validate(), Error);
  p = TrainPlan{};
  p.milestone_fracs = {0.8, 0.7};
  EXPECT_THROW(p.validate(), Error);
}
