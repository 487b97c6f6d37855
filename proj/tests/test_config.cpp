// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include "tpc/config.hpp"
#include "tpc/error.hpp"

using namespace tpc;

TEST(Config, RoundTrip) {
  ExperimentConfig c;
  c.command = "train";
  c.seed = 42;
  c.model = ModelConfig::tiny();
  c.plan.base_lr = 3e-4;
  c.plan.milestone_fracs = {0.5, 0.75};
  c.schedule = "hybrid";
  c.stage_iters = {1, 2, 3};
  c.checkpoints = {"a=x.ckpt", "b=y.ckpt"};
  c.fractions = {0.8, 0.1, 0.1};
  const std::string text = c.to_text();
  const ExperimentConfig back = ExperimentConfig::from_text(text);
  EXPECT_EQ(back.to_text(), text);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.model, ModelConfig::tiny());
  EXPECT_EQ(back.plan.base_lr, 3e-4);
  EXPECT_EQ(back.stage_iters, (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_EQ(back.checkpoints, c.checkpoints);
}

TEST(Config, SetAndErrors) {
  ExperimentConfig c;
  c.set("total_iters", "77");
  EXPECT_EQ(c.plan.total_iters, 77);
  c.set("decode", "sample");
  EXPECT_EQ(c.decode_options().mode, DecodeMode::Sample);
  EXPECT_THROW(c.set("no_such_key", "1"), Error);
  EXPECT_THROW(c.set("total_iters", "many"), Error);
  try {
    ExperimentConfig::from_text("seed = 1\nbogus = 2\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
  }
}

TEST(Config, Validation) {
  ExperimentConfig c;
  c.schedule = "reverse";
  EXPECT_THROW(c.validate(), Error);
  c = ExperimentConfig{};
  c.decode = "beam";
  EXPECT_THROW(c.validate(), Error);
  c = ExperimentConfig{};
  c.schedule = "hybrid";
  c.plan.total_iters = 120;
  EXPECT_EQ(c.make_schedule().stages.size(), 3u);
}
