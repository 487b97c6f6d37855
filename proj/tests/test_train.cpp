// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Training loop and checkpoint files.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "tpc/checkpoint.hpp"
#include "tpc/corpus.hpp"
#include "tpc/error.hpp"
#include "tpc/grammar.hpp"
#include "tpc/train.hpp"

using namespace tpc;

namespace {

const ModelConfig kCfg{1, 2, 16, 32, kVocabSize};

std::vector<TokenId> small_stream() {
  return tokenize(render_stream(generate_corpus(GrammarProfile::standard(), 60, 3)));
}

TrainPlan small_plan(std::int64_t iters) {
  TrainPlan p;
  p.total_iters = iters;
  p.batch_size = 4;
  p.log_interval = 1;
  return p;
}

ErrorKind parse_kind(const std::string& bytes) {
  try {
    parse_checkpoint(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

}  // namespace

TEST(Train, ExactStepCountAndLog) {
  const auto stream = small_stream();
  TrainState st = start_training(init_params<float>(kCfg, 1), small_plan(100), 5);
  int steps = 0;
  TrainHooks hooks;
  hooks.should_stop = [&](const TrainState&) {
    ++steps;
    return false;
  };
  const TrainLog log = train(st, small_plan(100), stream, stream, hooks);
  EXPECT_EQ(steps, 100);
  EXPECT_EQ(st.iter, 100);
  EXPECT_EQ(st.opt.step, 100);
  ASSERT_EQ(log.rows.size(), 100u);
  EXPECT_EQ(log.rows.front().iter, 0);
  EXPECT_TRUE(std::isnan(log.rows.front().val_loss));
  EXPECT_FALSE(std::isnan(log.rows.back().val_loss));
  EXPECT_LT(log.rows.back().train_loss, log.rows.front().train_loss);
  EXPECT_EQ(log.csv().substr(0, 34), std::string(TrainLog::kHeader) + "\n");
}

TEST(Train, Deterministic) {
  const auto stream = small_stream();
  TrainState a = start_training(init_params<float>(kCfg, 1), small_plan(20), 5);
  TrainState b = start_training(init_params<float>(kCfg, 1), small_plan(20), 5);
  const TrainLog la = train(a, small_plan(20), stream);
  const TrainLog lb = train(b, small_plan(20), stream);
  EXPECT_EQ(a.params.values, b.params.values);
  EXPECT_EQ(la.csv(), lb.csv());
}

TEST(Train, StreamTooShort) {
  const auto stream = tokenize("a = 1\n");
  TrainState st = start_training(init_params<float>(kCfg, 1), small_plan(5), 5);
  EXPECT_THROW(train(st, small_plan(5), stream), Error);
}

TEST(Checkpoint, ResumeIsBitIdentical) {
  const auto stream = small_stream();
  const TrainPlan plan = small_plan(30);
  TrainState full = start_training(init_params<float>(kCfg, 2), plan, 9);
  const TrainLog full_log = train(full, plan, stream);

  TrainState part = start_training(init_params<float>(kCfg, 2), plan, 9);
  TrainHooks stop;
  stop.should_stop = [](const TrainState& s) { return s.iter == 12; };
  TrainLog log = train(part, plan, stream, {}, stop);
  EXPECT_EQ(part.iter, 12);

  const auto path = std::filesystem::temp_directory_path() / "tpc_test_resume.ckpt";
  save_checkpoint({part, {{"note", "mid"}}}, path);
  Checkpoint back = load_checkpoint(path);
  ASSERT_NE(back.find_meta("note"), nullptr);
  EXPECT_EQ(*back.find_meta("note"), "mid");
  const TrainLog rest = train(back.state, plan, stream);
  log.rows.insert(log.rows.end(), rest.rows.begin(), rest.rows.end());

  EXPECT_EQ(back.state.params.values, full.params.values);
  EXPECT_EQ(back.state.opt, full.opt);
  EXPECT_EQ(back.state.rng, full.rng);
  EXPECT_EQ(log.csv(), full_log.csv());
  std::filesystem::remove(path);
}

TEST(Checkpoint, SaveLoadSaveIdentical) {
  const auto stream = small_stream();
  TrainState st = start_training(init_params<float>(kCfg, 2), small_plan(3), 9);
  train(st, small_plan(3), stream);
  const std::string a = serialize_checkpoint({st, {{"k", "v"}}});
  const std::string b = serialize_checkpoint(parse_checkpoint(a));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, 4), "TPCL");
}

TEST(Checkpoint, Corruption) {
  TrainState st = start_training(init_params<float>(kCfg, 2), small_plan(3), 9);
  const std::string good = serialize_checkpoint({st, {}});
  EXPECT_EQ(parse_kind(good.substr(0, good.size() / 2)), ErrorKind::CorruptFile);
  EXPECT_EQ(parse_kind(good.substr(0, 8)), ErrorKind::CorruptFile);
  std::string flipped = good;
  flipped[100] ^= 0x10;
  EXPECT_EQ(parse_kind(flipped), ErrorKind::CorruptFile);
  std::string magic = good;
  magic[0] = 'X';
  EXPECT_EQ(parse_kind(magic), ErrorKind::CorruptFile);
  std::string version = good;
  version[4] = 2;
  EXPECT_EQ(parse_kind(version), ErrorKind::VersionMismatch);
  EXPECT_THROW(load_checkpoint("/nonexistent/x.ckpt"), Error);
}

TEST(Checkpoint, AlphabetMismatch) {
  TrainState st = start_training(init_params<float>(kCfg, 2), small_plan(3), 9);
  std::string bytes = serialize_checkpoint({st, {}});
  // alphabet crc follows magic, version and five config words
  bytes[28] ^= 0x01;
  const std::uint32_t crc = crc32_of(std::string_view(bytes).substr(0, bytes.size() - 4));
  for (int i = 0; i < 4; ++i) bytes[bytes.size() - 4 + i] = static_cast<char>((crc >> (8 * i)) & 0xff);
  EXPECT_EQ(parse_kind(bytes), ErrorKind::VersionMismatch);
}
