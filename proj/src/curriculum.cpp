// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/curriculum.hpp"

#include <cmath>
#include <sstream>

#include "tpc/checkpoint.hpp"
#include "tpc/error.hpp"

namespace tpc {

namespace {

struct KindInfo {
  ScheduleKind kind;
  const char* name;
};

constexpr KindInfo kKinds[] = {
    {ScheduleKind::Baseline, "baseline"},       {ScheduleKind::Sequential, "sequential"},
    {ScheduleKind::Incremental, "incremental"}, {ScheduleKind::Hybrid, "hybrid"},
    {ScheduleKind::HardOnly, "hard_only"},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::int64_t parse_int(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw Error(ErrorKind::InvalidConfig, "not an integer: '" + s + "'");
  }
  return v;
}

}  // namespace

const char* to_string(ScheduleKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "?";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  for (const auto& k : kKinds) {
    if (name == k.name) return k.kind;
  }
  throw Error(ErrorKind::UnknownKind, "unknown schedule kind '" + std::string(name) + "'");
}

const char* to_string(Source source) {
  switch (source) {
    case Source::Easy: return "easy";
    case Source::Medium: return "medium";
    case Source::Hard: return "hard";
    case Source::HardestEasy50: return "hardest_easy_50";
    case Source::HardestMedium50: return "hardest_medium_50";
    case Source::All: return "all";
  }
  return "?";
}

std::int64_t Schedule::total_iters() const {
  std::int64_t t = 0;
  for (const auto& s : stages) t += s.iterations;
  return t;
}

void Schedule::validate() const {
  if (stages.empty()) throw Error(ErrorKind::InvalidConfig, "schedule has no stages");
  for (const auto& s : stages) {
    if (s.composition.empty()) throw Error(ErrorKind::EmptyComposition, "stage has no sources");
    if (s.iterations < 1) {
      throw Error(ErrorKind::InvalidConfig, "every stage needs at least one iteration");
    }
  }
}

std::string Schedule::to_text() const {
  std::ostringstream os;
  os << "kind = " << to_string(kind) << "\n";
  os << "total_iters = " << total_iters() << "\n";
  os << "stage_iters = ";
  for (std::size_t i = 0; i < stages.size(); ++i) {
    os << (i ? "," : "") << stages[i].iterations;
  }
  os << "\n";
  return os.str();
}

Schedule Schedule::from_text(std::string_view text) {
  std::optional<ScheduleKind> kind;
  std::optional<std::int64_t> total;
  std::optional<std::vector<std::int64_t>> iters;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidConfig, "expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key == "kind") {
      kind = parse_schedule_kind(value);
    } else if (key == "total_iters") {
      total = parse_int(value);
    } else if (key == "stage_iters") {
      std::vector<std::int64_t> v;
      std::istringstream parts(value);
      std::string part;
      while (std::getline(parts, part, ',')) v.push_back(parse_int(trim(part)));
      iters = v;
    } else {
      throw Error(ErrorKind::InvalidConfig, "unknown schedule key '" + key + "'");
    }
  }
  if (!kind) throw Error(ErrorKind::InvalidConfig, "schedule needs a kind");
  if (!total && !iters) throw Error(ErrorKind::InvalidConfig, "schedule needs total_iters");
  std::int64_t t = total.value_or(0);
  if (iters) {
    std::int64_t sum = 0;
    for (auto v : *iters) sum += v;
    if (total && sum != *total) {
      throw Error(ErrorKind::InvalidConfig, "stage_iters do not sum to total_iters");
    }
    t = sum;
  }
  return make_schedule(*kind, t, iters);
}

Schedule make_schedule(ScheduleKind kind, std::int64_t total_iters,
                       const std::optional<std::vector<std::int64_t>>& stage_iters) {
  using S = Source;
  Schedule sched;
  sched.kind = kind;
  std::vector<std::vector<Source>> comps;
  std::vector<int> ratio;
  switch (kind) {
    case ScheduleKind::Baseline:
      comps = {{S::All}};
      ratio = {1};
      break;
    case ScheduleKind::HardOnly:
      comps = {{S::Hard}};
      ratio = {1};
      break;
    case ScheduleKind::Sequential:
      comps = {{S::Easy}, {S::Medium}, {S::Hard}};
      ratio = {40, 40, 40};
      break;
    case ScheduleKind::Incremental:
      comps = {{S::Easy}, {S::Easy, S::Medium}, {S::Easy, S::Medium, S::Hard}};
      ratio = {25, 30, 65};
      break;
    case ScheduleKind::Hybrid:
      comps = {{S::Easy},
               {S::HardestEasy50, S::Medium},
               {S::HardestEasy50, S::HardestMedium50, S::Hard}};
      ratio = {20, 30, 70};
      break;
  }
  if (total_iters < 1) throw Error(ErrorKind::InvalidConfig, "total_iters must be positive");
  std::vector<std::int64_t> iters;
  if (stage_iters) {
    if (stage_iters->size() != comps.size()) {
      throw Error(ErrorKind::InvalidConfig, std::string(to_string(kind)) + " has " +
                                                std::to_string(comps.size()) + " stages");
    }
    iters = *stage_iters;
  } else {
    int denom = 0;
    for (int r : ratio) denom += r;
    std::int64_t used = 0;
    for (std::size_t i = 0; i + 1 < ratio.size(); ++i) {
      iters.push_back(std::llround(static_cast<double>(total_iters) * ratio[i] / denom));
      used += iters.back();
    }
    iters.push_back(total_iters - used);
  }
  for (std::size_t i = 0; i < comps.size(); ++i) sched.stages.push_back({comps[i], iters[i]});
  sched.validate();
  return sched;
}

std::vector<AnnotatedSnippet> resolve_source(Source source, const LeveledDataset& dataset) {
  switch (source) {
    case Source::Easy: return dataset.level(DifficultyLevel::Easy).train;
    case Source::Medium: return dataset.level(DifficultyLevel::Medium).train;
    case Source::Hard: return dataset.level(DifficultyLevel::Hard).train;
    case Source::HardestEasy50:
      return top_fraction_hardest(dataset.level(DifficultyLevel::Easy).train, kHardestFraction);
    case Source::HardestMedium50:
      return top_fraction_hardest(dataset.level(DifficultyLevel::Medium).train, kHardestFraction);
    case Source::All: return dataset.all.train;
  }
  return {};
}

std::vector<AnnotatedSnippet> stage_snippets(const StageSpec& spec, const LeveledDataset& dataset,
                                             std::uint64_t seed, int stage_index) {
  if (spec.composition.empty()) throw Error(ErrorKind::EmptyComposition, "stage has no sources");
  std::vector<AnnotatedSnippet> out;
  for (Source s : spec.composition) {
    auto part = resolve_source(s, dataset);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  if (out.empty()) throw Error(ErrorKind::EmptyComposition, "stage sources are all empty");
  Rng rng(derive_seed(seed, 0x57a6, static_cast<std::uint64_t>(stage_index)));
  rng.shuffle(out);
  return out;
}

std::vector<TokenId> materialize_stage(const StageSpec& spec, const LeveledDataset& dataset,
                                       std::uint64_t seed, int stage_index) {
  return tokenize(render_stream(stage_snippets(spec, dataset, seed, stage_index)));
}

ScheduleRun run_schedule(const Schedule& schedule, const LeveledDataset& dataset,
                         const ModelConfig& model_cfg, const TrainPlan& plan, std::uint64_t seed,
                         const std::filesystem::path& out_dir, const TrainHooks& hooks) {
  schedule.validate();
  plan.validate();
  ScheduleRun run;
  run.params = init_params<float>(model_cfg, derive_seed(seed, 0x1a1));
  const std::vector<TokenId> val = tokenize(render_stream(dataset.all.val));
  for (std::size_t k = 0; k < schedule.stages.size(); ++k) {
    const StageSpec& spec = schedule.stages[k];
    const int stage = static_cast<int>(k) + 1;
    const std::vector<TokenId> stream = materialize_stage(spec, dataset, seed, stage);
    TrainPlan stage_plan = plan;
    stage_plan.total_iters = spec.iterations;
    TrainState state = start_training(std::move(run.params), stage_plan,
                                      derive_seed(seed, 0x57a9, static_cast<std::uint64_t>(stage)),
                                      stage);
    run.logs.push_back(train(state, stage_plan, stream, val, hooks));
    run.total_steps += state.iter;
    const bool finished = state.iter == stage_plan.total_iters;
    if (!out_dir.empty()) {
      Checkpoint ck{std::move(state), {}};
      ck.meta = {{"schedule", to_string(schedule.kind)},
                 {"stage", std::to_string(stage)},
                 {"stages", std::to_string(schedule.stages.size())},
                 {"seed", std::to_string(seed)}};
      const auto path = out_dir / ("stage" + std::to_string(stage) + ".ckpt");
      save_checkpoint(ck, path);
      run.checkpoints.push_back(path);
      run.params = std::move(ck.state.params);
    } else {
      run.params = std::move(state.params);
    }
    if (!finished) break;  // stopped by a hook
  }
  return run;
}

}  // namespace tpc
