// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "tpc/curriculum.hpp"
#include "tpc/error.hpp"

using namespace tpc;

namespace {

std::vector<std::int64_t> iters(const Schedule& s) {
  std::vector<std::int64_t> out;
  for (const auto& st : s.stages) out.push_back(st.iterations);
  return out;
}

std::vector<std::string> sorted_texts(std::span<const AnnotatedSnippet> s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.render());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AnnotatedSnippet> concat(std::initializer_list<std::vector<AnnotatedSnippet>> parts) {
  std::vector<AnnotatedSnippet> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const LeveledDataset& dataset() {
  static const LeveledDataset ds = build_leveled(60, {}, 4);
  return ds;
}

}  // namespace

TEST(Schedule, Iterations) {
  using V = std::vector<std::int64_t>;
  EXPECT_EQ(iters(make_schedule(ScheduleKind::Sequential, 120000)), (V{40000, 40000, 40000}));
  EXPECT_EQ(iters(make_schedule(ScheduleKind::Incremental, 120000)), (V{25000, 30000, 65000}));
  EXPECT_EQ(iters(make_schedule(ScheduleKind::Hybrid, 120000)), (V{20000, 30000, 70000}));
  EXPECT_EQ(iters(make_schedule(ScheduleKind::Hybrid, 12000)), (V{2000, 3000, 7000}));
  EXPECT_EQ(iters(make_schedule(ScheduleKind::Baseline, 12000)), (V{12000}));
  EXPECT_EQ(iters(make_schedule(ScheduleKind::HardOnly, 500)), (V{500}));
  EXPECT_EQ(iters(make_schedule(ScheduleKind::Sequential, 100, V{10, 20, 70})), (V{10, 20, 70}));
  EXPECT_THROW(make_schedule(ScheduleKind::Sequential, 100, V{10, 20}), Error);
  for (auto k : {ScheduleKind::Baseline, ScheduleKind::Sequential, ScheduleKind::Incremental,
                 ScheduleKind::Hybrid, ScheduleKind::HardOnly}) {
    for (std::int64_t t : {7, 100, 15000, 120001}) EXPECT_EQ(make_schedule(k, t).total_iters(), t);
  }
}

TEST(Schedule, Kinds) {
  EXPECT_EQ(parse_schedule_kind("hybrid"), ScheduleKind::Hybrid);
  EXPECT_EQ(parse_schedule_kind("hard_only"), ScheduleKind::HardOnly);
  try {
    parse_schedule_kind("anti");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownKind);
  }
  const Schedule b = make_schedule(ScheduleKind::Baseline, 10);
  ASSERT_EQ(b.stages.size(), 1u);
  EXPECT_EQ(b.stages[0].composition, std::vector<Source>{Source::All});
}

TEST(Schedule, TextRoundTrip) {
  const Schedule s = make_schedule(ScheduleKind::Incremental, 1234);
  const Schedule back = Schedule::from_text(s.to_text());
  EXPECT_EQ(back.kind, s.kind);
  EXPECT_EQ(iters(back), iters(s));
  EXPECT_EQ(back.to_text(), s.to_text());
}

TEST(Composition, Stages) {
  const LeveledDataset& ds = dataset();
  const auto& easy = ds.level(DifficultyLevel::Easy).train;
  const auto& med = ds.level(DifficultyLevel::Medium).train;
  const auto& hard = ds.level(DifficultyLevel::Hard).train;

  const Schedule hyb = make_schedule(ScheduleKind::Hybrid, 120);
  EXPECT_EQ(sorted_texts(stage_snippets(hyb.stages[1], ds, 1, 2)),
            sorted_texts(concat({top_fraction_hardest(easy, 0.5), med})));
  EXPECT_EQ(sorted_texts(stage_snippets(hyb.stages[2], ds, 1, 3)),
            sorted_texts(concat({top_fraction_hardest(easy, 0.5), top_fraction_hardest(med, 0.5),
                                 hard})));

  const Schedule inc = make_schedule(ScheduleKind::Incremental, 120);
  EXPECT_EQ(sorted_texts(stage_snippets(inc.stages[2], ds, 1, 3)),
            sorted_texts(concat({easy, med, hard})));

  const Schedule seq = make_schedule(ScheduleKind::Sequential, 120);
  EXPECT_EQ(sorted_texts(stage_snippets(seq.stages[0], ds, 1, 1)), sorted_texts(easy));
  EXPECT_EQ(sorted_texts(stage_snippets(seq.stages[1], ds, 1, 2)), sorted_texts(med));
  EXPECT_EQ(sorted_texts(stage_snippets(seq.stages[2], ds, 1, 3)), sorted_texts(hard));

  EXPECT_EQ(sorted_texts(stage_snippets(make_schedule(ScheduleKind::Baseline, 9).stages[0], ds, 1, 1)),
            sorted_texts(ds.all.train));
  EXPECT_THROW(materialize_stage(StageSpec{{}, 10}, ds, 1, 1), Error);
}

TEST(Composition, ShuffledPerStage) {
  const LeveledDataset& ds = dataset();
  const StageSpec s{{Source::Easy, Source::Medium}, 10};
  EXPECT_EQ(materialize_stage(s, ds, 1, 2), materialize_stage(s, ds, 1, 2));
  EXPECT_NE(materialize_stage(s, ds, 1, 2), materialize_stage(s, ds, 1, 3));
}

TEST(RunSchedule, ResetsAndConservesSteps) {
  const LeveledDataset& ds = dataset();
  const Schedule sched = make_schedule(ScheduleKind::Hybrid, 24);  // 4 / 6 / 14
  TrainPlan plan;
  plan.batch_size = 2;
  plan.log_interval = 1;
  const ModelConfig cfg{1, 2, 16, 32, kVocabSize};

  std::vector<TrainLogRow> rows;
  bool moments_restart = true;
  TrainHooks hooks;
  hooks.on_log = [&](const TrainLogRow& r) { rows.push_back(r); };
  hooks.should_stop = [&](const TrainState& s) {
    if (s.opt.step != s.iter) moments_restart = false;
    return false;
  };
  const auto dir = std::filesystem::temp_directory_path() / "tpc_test_schedule";
  std::filesystem::remove_all(dir);
  const ScheduleRun run = run_schedule(sched, ds, cfg, plan, 3, dir, hooks);
  EXPECT_EQ(run.total_steps, 24);
  EXPECT_TRUE(moments_restart);
  ASSERT_EQ(run.logs.size(), 3u);
  ASSERT_EQ(run.checkpoints.size(), 3u);
  for (int k = 1; k <= 3; ++k) EXPECT_TRUE(std::filesystem::exists(dir / ("stage" + std::to_string(k) + ".ckpt")));
  for (const auto& log : run.logs) {
    EXPECT_EQ(log.rows.front().iter, 0);
    EXPECT_DOUBLE_EQ(log.rows.front().lr, 1e-3);
  }
  EXPECT_EQ(run.logs[2].rows.size(), 14u);
  EXPECT_EQ(run.logs[2].rows.front().stage, 3);

  // baseline performs the same number of optimizer steps
  const ScheduleRun base = run_schedule(make_schedule(ScheduleKind::Baseline, 24), ds, cfg, plan, 3);
  EXPECT_EQ(base.total_steps, run.total_steps);
  std::filesystem::remove_all(dir);
}
