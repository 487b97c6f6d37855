// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "gradcheck.hpp"
#include "tpc/error.hpp"
#include "tpc/model.hpp"

using namespace tpc;

namespace {

std::vector<TokenId> random_ids(std::size_t n, int vocab, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TokenId> ids(n);
  for (auto& t : ids) t = static_cast<TokenId>(rng.below(static_cast<std::uint64_t>(vocab)));
  return ids;
}

std::size_t hand_count(std::size_t V, std::size_t B, std::size_t d, std::size_t L) {
  // embeddings + per layer (2 norms, qkv, proj, fc, fc proj) + final norm
  return V * d + B * d + L * (2 * d + 3 * d * d + d * d + 4 * d * d + 4 * d * d) + d;
}

}  // namespace

TEST(Model, ParameterCount) {
  EXPECT_EQ(parameter_count(ModelConfig::standard()), 1074000u);
  EXPECT_EQ(parameter_count(ModelConfig::standard()), hand_count(41, 256, 120, 6));
  EXPECT_EQ(parameter_count({2, 2, 16, 16, 8}), hand_count(8, 16, 16, 2));
  const auto layout = parameter_layout(ModelConfig::standard());
  EXPECT_EQ(layout.size(), 2u + 6 * 6 + 1);
  EXPECT_EQ(layout.front().name, "wte");
  EXPECT_EQ(layout.back().offset + layout.back().size(), 1074000u);
}

TEST(Model, InvalidConfig) {
  EXPECT_THROW((ModelConfig{2, 5, 64, 128, 41}.validate()), Error);  // 64 % 5 != 0
  EXPECT_THROW((ModelConfig{0, 4, 64, 128, 41}.validate()), Error);
}

TEST(Model, InitDeterministic) {
  const auto a = init_params<float>(ModelConfig::tiny(), 5);
  const auto b = init_params<float>(ModelConfig::tiny(), 5);
  const auto c = init_params<float>(ModelConfig::tiny(), 6);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  // norm scales start at one
  for (const auto& t : a.layout) {
    if (t.rows == 1) {
      for (float v : a.view(t)) ASSERT_EQ(v, 1.0f);
    }
  }
}

TEST(Model, LogitsShapeAndPurity) {
  const auto p = init_params<float>(ModelConfig::tiny(), 1);
  const auto ids = random_ids(50, kVocabSize, 2);
  const Mat<float> a = forward_logits(p, ids);
  EXPECT_EQ(a.rows(), 50);
  EXPECT_EQ(a.cols(), kVocabSize);
  EXPECT_EQ(a, forward_logits(p, ids));
}

TEST(Model, WindowTooLong) {
  const auto p = init_params<float>(ModelConfig::tiny(), 1);
  const auto ids = random_ids(129, kVocabSize, 2);
  try {
    forward_logits(p, ids);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::WindowTooLong);
  }
}

TEST(Model, Causality) {
  const auto p = init_params<double>({2, 4, 32, 32, kVocabSize}, 3, 0.1);
  auto ids = random_ids(32, kVocabSize, 4);
  const Mat<double> before = forward_logits(p, ids);
  for (int t : {0, 7, 20}) {
    auto changed = ids;
    for (std::size_t k = static_cast<std::size_t>(t) + 1; k < changed.size(); ++k) {
      changed[k] = (changed[k] + 5) % kVocabSize;
    }
    const Mat<double> after = forward_logits(p, changed);
    EXPECT_EQ((before.topRows(t + 1) - after.topRows(t + 1)).cwiseAbs().maxCoeff(), 0.0) << t;
  }
}

TEST(Model, SoftmaxNormalized) {
  const auto p = init_params<double>(ModelConfig::tiny(), 3, 0.5);
  const Mat<double> logits = forward_logits(p, random_ids(64, kVocabSize, 9));
  for (int r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    double z = 0;
    for (int c = 0; c < logits.cols(); ++c) z += std::exp(logits(r, c) - m);
    double total = 0;
    for (int c = 0; c < logits.cols(); ++c) total += std::exp(logits(r, c) - m) / z;
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(Model, GradientCheck) {
  for (const auto& t : cases::gradient_check()) EXPECT_LT(t.rel, 1e-4) << t.name;
}

TEST(Model, UniformLoss) {
  for (const ModelConfig cfg : {ModelConfig::tiny(), ModelConfig{2, 2, 16, 16, 8}}) {
    const auto z = zero_params<double>(cfg);
    const auto w = random_ids(static_cast<std::size_t>(4 * (cfg.block_size + 1)), cfg.vocab_size, 1);
    TransformerEngine<double> e(cfg);
    EXPECT_NEAR(e.loss_only(z, w, 4), std::log(static_cast<double>(cfg.vocab_size)), 1e-12);
  }
  const auto zf = zero_params<float>(ModelConfig::tiny());
  TransformerEngine<float> ef(ModelConfig::tiny());
  EXPECT_NEAR(ef.loss_only(zf, random_ids(2 * 129, kVocabSize, 1), 2), std::log(41.0), 1e-6);
}

TEST(Model, FloatMatchesDouble) {
  const auto pf = init_params<float>(ModelConfig::tiny(), 8);
  const auto pd = convert<double>(pf);
  const auto w = random_ids(2 * 129, kVocabSize, 5);
  TransformerEngine<float> ef(pf.config);
  TransformerEngine<double> ed(pd.config);
  AlignedVector<float> gf;
  AlignedVector<double> gd;
  EXPECT_NEAR(ef.loss_and_grads(pf, w, 2, gf), ed.loss_and_grads(pd, w, 2, gd), 1e-4);
  double diff = 0, norm = 0;
  for (std::size_t i = 0; i < gd.size(); ++i) {
    diff += (gf[i] - gd[i]) * (gf[i] - gd[i]);
    norm += gd[i] * gd[i];
  }
  EXPECT_LT(std::sqrt(diff / norm), 1e-3);
}

TEST(Decoder, MatchesForward) {
  const auto p = init_params<float>(ModelConfig::tiny(), 2);
  const auto ids = random_ids(40, kVocabSize, 6);
  const Mat<float> full = forward_logits(p, ids);
  Decoder d(p);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& l = d.feed(ids[i]);
    for (int c = 0; c < kVocabSize; ++c) {
      ASSERT_NEAR(l[static_cast<std::size_t>(c)], full(static_cast<int>(i), c), 1e-4);
    }
  }
  d.rewind(10);
  EXPECT_EQ(d.size(), 10u);
  for (int c = 0; c < kVocabSize; ++c) {
    EXPECT_NEAR(d.last_logits()[static_cast<std::size_t>(c)], full(9, c), 1e-4);
  }
}

TEST(Decoder, CropsToLastBlock) {
  const ModelConfig cfg{2, 4, 32, 16, kVocabSize};
  const auto p = init_params<float>(cfg, 2);
  const auto ids = random_ids(40, kVocabSize, 7);
  Decoder d(p);
  d.feed(ids);
  const Mat<float> tail = forward_logits(p, std::span<const TokenId>(ids).last(16));
  for (int c = 0; c < kVocabSize; ++c) {
    EXPECT_NEAR(d.last_logits()[static_cast<std::size_t>(c)], tail(15, c), 1e-4);
  }
}

TEST(Generate, OnlyLastBlockConditions) {
  const ModelConfig cfg{2, 4, 32, 16, kVocabSize};
  const auto p = init_params<float>(cfg, 2, 0.2);
  auto a = random_ids(40, kVocabSize, 8);
  auto b = a;
  for (std::size_t i = 0; i < 24; ++i) b[i] = (b[i] + 3) % kVocabSize;  // outside the last 16
  GenerateOptions o;
  o.max_new = 1;
  o.stop_at_blank_line = false;
  EXPECT_EQ(generate(p, a, o), generate(p, b, o));
}

TEST(Generate, Deterministic) {
  const auto p = init_params<float>(ModelConfig::tiny(), 4, 0.2);
  const auto prompt = tokenize("a = 1\n");
  GenerateOptions g;
  g.max_new = 40;
  EXPECT_EQ(generate(p, prompt, g), generate(p, prompt, g));
  GenerateOptions s = g;
  s.mode = DecodeMode::Sample;
  s.seed = 11;
  const auto x = generate(p, prompt, s);
  EXPECT_EQ(x, generate(p, prompt, s));
  EXPECT_LE(x.size(), 40u);
}

TEST(Generate, ChooseToken) {
  Rng rng(1);
  const std::vector<float> l = {0.f, 2.f, 2.f, -1.f};
  EXPECT_EQ(choose_token(l, DecodeMode::Greedy, 1.0, rng), 1);  // lowest id on ties
  int hits[4] = {};
  for (int i = 0; i < 4000; ++i) ++hits[choose_token(l, DecodeMode::Sample, 1.0, rng)];
  EXPECT_GT(hits[2], 1200);
  EXPECT_LT(hits[3], 150);
}
