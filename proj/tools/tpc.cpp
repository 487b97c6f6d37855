// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//
// tpc: corpus generation, scoring, dataset building, curriculum training,
// evaluation and comparison tables.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "tpc/checkpoint.hpp"
#include "tpc/config.hpp"
#include "tpc/corpus.hpp"
#include "tpc/curriculum.hpp"
#include "tpc/error.hpp"
#include "tpc/eval.hpp"
#include "tpc/experiments.hpp"
#include "tpc/grammar.hpp"

namespace fs = std::filesystem;
using namespace tpc;

namespace {

struct Invocation {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> sets;
  int threads = 1;
};

void note(const std::string& msg) { std::cerr << msg << std::endl; }

fs::path out_dir(const ExperimentConfig& c) {
  if (c.out.empty()) throw Error(ErrorKind::InvalidConfig, "an output directory is required (--out)");
  fs::create_directories(c.out);
  return c.out;
}

void need(const std::string& value, const char* what) {
  if (value.empty()) throw Error(ErrorKind::InvalidConfig, std::string(what) + " is required");
}

void write_config(const ExperimentConfig& c, const fs::path& dir) {
  write_file(dir / "config.txt", c.to_text());
}

// ---- commands ----

void cmd_generate(const ExperimentConfig& c) {
  const fs::path dir = out_dir(c);
  const auto snippets = generate_corpus(profile_by_name(c.profile), c.count, c.seed);
  write_file(dir / "snippets.txt", render_stream(snippets));
  write_config(c, dir);
  note("generate: " + std::to_string(snippets.size()) + " snippets -> " +
       (dir / "snippets.txt").string());
}

void cmd_score(const ExperimentConfig& c) {
  need(c.input, "input");
  const auto snippets = parse_stream(read_file(c.input));
  const fs::path dir = out_dir(c);
  std::string csv = "index,cc,hd,om,level\n";
  char buf[128];
  for (std::size_t i = 0; i < snippets.size(); ++i) {
    const auto& s = snippets[i];
    std::snprintf(buf, sizeof buf, "%zu,%d,%.6f,%.6f,%s\n", i, static_cast<int>(s.score.cc), s.score.hd, s.score.om,
                  to_string(s.level));
    csv += buf;
  }
  std::string hist = "om_lo,om_hi,count\n";
  for (const auto& b : om_histogram(snippets, 0.25)) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f,%lld\n", b.lo, b.lo + 0.25,
                  static_cast<long long>(b.count));
    hist += buf;
  }
  write_file(dir / "scores.csv", csv);
  write_file(dir / "histogram.csv", hist);
  write_config(c, dir);
  note("score: " + std::to_string(snippets.size()) + " snippets scored");
}

void cmd_build(const ExperimentConfig& c) {
  const fs::path dir = out_dir(c);
  note("build: " + std::to_string(c.per_level_count) + " snippets per level");
  const auto ds = build_leveled(c.per_level_count, c.fractions, c.seed, profile_by_name(c.profile));
  write_dataset(ds, dir);
  write_config(c, dir);
  note("build: " + std::to_string(ds.draws) + " draws -> " + dir.string());
}

void cmd_train(const ExperimentConfig& c) {
  need(c.dataset, "dataset");
  const LeveledDataset ds = read_dataset(c.dataset);
  const Schedule sched = c.make_schedule();
  const fs::path dir = out_dir(c);
  write_config(c, dir);
  write_file(dir / "schedule.txt", sched.to_text());
  const int n_stages = static_cast<int>(sched.stages.size());
  TrainHooks hooks;
  hooks.on_log = [&](const TrainLogRow& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "train: stage %d/%d iter %lld loss %.4f lr %.3g", r.stage,
                  n_stages, static_cast<long long>(r.iter), r.train_loss, r.lr);
    note(buf);
  };
  const ScheduleRun run = run_schedule(sched, ds, c.model, c.plan, c.seed, dir, hooks);
  std::string csv = std::string(TrainLog::kHeader) + "\n";
  for (const auto& log : run.logs) {
    for (const auto& r : log.rows) csv += TrainLog::csv_row(r) + "\n";
  }
  write_file(dir / "train_log.csv", csv);
  fs::copy_file(run.checkpoints.back(), dir / "final.ckpt", fs::copy_options::overwrite_existing);
  note("train: " + std::to_string(run.total_steps) + " steps, checkpoints in " + dir.string());
}

EvalReport eval_checkpoint(const ExperimentConfig& c, const std::string& path,
                           const LeveledDataset& ds, const std::string& name, int threads) {
  const Checkpoint ck = load_checkpoint(path);
  note("eval: " + name + " (" + path + ")");
  return evaluate_params(ck.state.params, ds, c.decode_options(), c.eval_limit, name, threads);
}

void cmd_eval(const ExperimentConfig& c, int threads) {
  need(c.checkpoint, "checkpoint");
  need(c.dataset, "dataset");
  const LeveledDataset ds = read_dataset(c.dataset);
  const EvalReport rep = eval_checkpoint(c, c.checkpoint, ds, fs::path(c.checkpoint).stem().string(),
                                         threads);
  const fs::path dir = out_dir(c);
  write_file(dir / "report.csv", EvalReport::csv_header() + "\n" + rep.csv_row() + "\n");
  write_file(dir / "report.txt", comparison_table(std::span(&rep, 1)));
  write_config(c, dir);
  std::cout << comparison_table(std::span(&rep, 1));
}

void cmd_compare(const ExperimentConfig& c, int threads) {
  if (c.checkpoints.empty()) throw Error(ErrorKind::InvalidConfig, "checkpoints are required");
  need(c.dataset, "dataset");
  const LeveledDataset ds = read_dataset(c.dataset);
  std::vector<EvalReport> reports;
  for (const auto& item : c.checkpoints) {
    const auto eq = item.find('=');
    const std::string name = eq == std::string::npos ? fs::path(item).stem().string() : item.substr(0, eq);
    const std::string path = eq == std::string::npos ? item : item.substr(eq + 1);
    reports.push_back(eval_checkpoint(c, path, ds, name, threads));
  }
  const fs::path dir = out_dir(c);
  std::string csv = EvalReport::csv_header() + "\n";
  for (const auto& r : reports) csv += r.csv_row() + "\n";
  write_file(dir / "comparison.csv", csv);
  write_file(dir / "comparison.txt", comparison_table(reports));
  write_config(c, dir);
  std::cout << comparison_table(reports);
}

void cmd_om_validate(const ExperimentConfig& c, int threads) {
  const fs::path dir = out_dir(c);
  write_config(c, dir);
  OmValidationSetup setup;
  setup.model = c.model;
  setup.plan = c.plan;
  setup.per_level_count = c.per_level_count;
  setup.held_out = std::max<std::int64_t>(c.eval_limit, 1);
  setup.seed = c.seed;
  setup.decode = c.decode_options();
  setup.threads = threads;
  const OmValidationTable table = run_om_validation(setup, dir, note);
  std::cout << table.table();
}

// ---- option wiring ----

void add_common(CLI::App* sub, Invocation& inv) {
  sub->add_option("--config", inv.config_file, "key = value config file (flags override it)");
  sub->add_option("--threads", inv.threads, "worker threads for evaluation")->check(CLI::PositiveNumber);
  sub->add_option("--set", inv.sets, "extra key=value overrides");
}

void flag(CLI::App* sub, Invocation& inv, const std::string& name, const std::string& key,
          const std::string& help) {
  sub->add_option_function<std::string>(
      name, [&inv, key](const std::string& v) { inv.overrides.emplace_back(key, v); }, help);
}

void model_preset(CLI::App* sub, Invocation& inv) {
  sub->add_option_function<std::string>(
      "--model",
      [&inv](const std::string& v) {
        ModelConfig m;
        if (v == "tiny") {
          m = ModelConfig::tiny();
        } else if (v != "standard") {
          throw CLI::ValidationError("--model", "expected standard or tiny");
        }
        inv.overrides.emplace_back("n_layers", std::to_string(m.n_layers));
        inv.overrides.emplace_back("n_heads", std::to_string(m.n_heads));
        inv.overrides.emplace_back("embed_dim", std::to_string(m.embed_dim));
        inv.overrides.emplace_back("block_size", std::to_string(m.block_size));
      },
      "model preset: standard or tiny");
}

ExperimentConfig resolve(const std::string& command, const Invocation& inv) {
  ExperimentConfig c;
  if (command == "om-validate") {
    // per-concept-level defaults; a config file or flags override them
    const OmValidationSetup d;
    c.model = d.model;
    c.plan = d.plan;
    c.per_level_count = d.per_level_count;
    c.eval_limit = d.held_out;
  }
  if (!inv.config_file.empty()) c.apply_text(read_file(inv.config_file));
  c.command = command;
  for (const auto& [k, v] : inv.overrides) c.set(k, v);
  for (const auto& kv : inv.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidConfig, "--set expects key=value");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  // absolute paths so the emitted config reruns from any directory
  const auto absolute = [](std::string& path) {
    if (!path.empty()) path = fs::absolute(path).lexically_normal().string();
  };
  absolute(c.input);
  absolute(c.dataset);
  absolute(c.checkpoint);
  absolute(c.out);
  for (auto& item : c.checkpoints) {
    const auto eq = item.find('=');
    std::string path = eq == std::string::npos ? item : item.substr(eq + 1);
    absolute(path);
    item = eq == std::string::npos ? path : item.substr(0, eq + 1) + path;
  }
  c.validate();
  return c;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::UnknownKind:
    case ErrorKind::Io:
    case ErrorKind::MalformedFile:
    case ErrorKind::CorruptFile:
    case ErrorKind::VersionMismatch:
    case ErrorKind::OutOfRange:
    case ErrorKind::InvalidProfile:
    case ErrorKind::UnknownCharacter:
    case ErrorKind::SyntaxError:
    case ErrorKind::IndentationError:
    case ErrorKind::EmptyComposition:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TinyPy curriculum lab: generate, score, build, train, eval, compare"};
  app.require_subcommand(1);
  Invocation inv;

  auto* gen = app.add_subcommand("generate", "emit annotated snippets");
  add_common(gen, inv);
  flag(gen, inv, "--count", "count", "number of snippets");
  flag(gen, inv, "--profile", "profile", "standard or level1..level6");
  flag(gen, inv, "--seed", "seed", "random seed");
  flag(gen, inv, "--out", "out", "output directory");

  auto* score = app.add_subcommand("score", "CC/HD/OM/level per snippet plus an OM histogram");
  add_common(score, inv);
  flag(score, inv, "--in", "input", "annotated snippet file");
  flag(score, inv, "--out", "out", "output directory");

  auto* build = app.add_subcommand("build", "build a leveled dataset on disk");
  add_common(build, inv);
  flag(build, inv, "--per-level", "per_level_count", "snippets per difficulty level");
  flag(build, inv, "--profile", "profile", "grammar profile");
  flag(build, inv, "--seed", "seed", "random seed");
  flag(build, inv, "--out", "out", "dataset directory");

  auto* trn = app.add_subcommand("train", "train under a schedule");
  add_common(trn, inv);
  flag(trn, inv, "--schedule", "schedule", "baseline, sequential, incremental, hybrid, hard_only");
  flag(trn, inv, "--data", "dataset", "dataset directory");
  flag(trn, inv, "--iters", "total_iters", "total optimizer steps");
  flag(trn, inv, "--stage-iters", "stage_iters", "explicit per-stage steps, comma separated");
  flag(trn, inv, "--batch", "batch_size", "windows per step");
  flag(trn, inv, "--lr", "base_lr", "base learning rate");
  flag(trn, inv, "--log-interval", "log_interval", "log every k steps");
  flag(trn, inv, "--eval-interval", "eval_interval", "validation loss every k steps");
  flag(trn, inv, "--seed", "seed", "random seed");
  flag(trn, inv, "--out", "out", "run directory");
  model_preset(trn, inv);

  auto* ev = app.add_subcommand("eval", "evaluate one checkpoint");
  add_common(ev, inv);
  flag(ev, inv, "--ckpt", "checkpoint", "checkpoint file");
  flag(ev, inv, "--data", "dataset", "dataset directory");
  flag(ev, inv, "--decode", "decode", "greedy or sample");
  flag(ev, inv, "--temperature", "temperature", "sampling temperature");
  flag(ev, inv, "--limit", "eval_limit", "test snippets per level (0 = all)");
  flag(ev, inv, "--seed", "seed", "seed for sampled decoding");
  flag(ev, inv, "--out", "out", "report directory");

  auto* cmp = app.add_subcommand("compare", "side-by-side tables for several checkpoints");
  add_common(cmp, inv);
  cmp->add_option_function<std::vector<std::string>>(
      "--ckpt",
      [&inv](const std::vector<std::string>& v) {
        std::string joined;
        for (const auto& s : v) joined += (joined.empty() ? "" : ",") + s;
        inv.overrides.emplace_back("checkpoints", joined);
      },
      "name=path, repeatable");
  flag(cmp, inv, "--data", "dataset", "dataset directory");
  flag(cmp, inv, "--decode", "decode", "greedy or sample");
  flag(cmp, inv, "--limit", "eval_limit", "test snippets per level (0 = all)");
  flag(cmp, inv, "--seed", "seed", "seed for sampled decoding");
  flag(cmp, inv, "--out", "out", "report directory");

  auto* omv = app.add_subcommand("om-validate",
                                 "train one model per concept level and relate OM to accuracy");
  add_common(omv, inv);
  flag(omv, inv, "--per-level", "per_level_count", "corpus size per concept level");
  flag(omv, inv, "--iters", "total_iters", "steps per level");
  flag(omv, inv, "--batch", "batch_size", "windows per step");
  flag(omv, inv, "--limit", "eval_limit", "held-out snippets per level");
  flag(omv, inv, "--seed", "seed", "random seed");
  flag(omv, inv, "--out", "out", "output directory");
  model_preset(omv, inv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const ExperimentConfig c = resolve(name, inv);
    if (name == "generate") cmd_generate(c);
    else if (name == "score") cmd_score(c);
    else if (name == "build") cmd_build(c);
    else if (name == "train") cmd_train(c);
    else if (name == "eval") cmd_eval(c, inv.threads);
    else if (name == "compare") cmd_compare(c, inv.threads);
    else if (name == "om-validate") cmd_om_validate(c, inv.threads);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << std::endl;
    return 2;
  }
}
