// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "tpc/error.hpp"
#include "tpc/grammar.hpp"

namespace tpc {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <typename T>
T parse_num(std::string_view key, std::string_view s) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorKind::InvalidConfig,
                "bad value '" + std::string(s) + "' for " + std::string(key));
  }
  return v;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string item;
  std::istringstream is{std::string(s)};
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, std::string>) {
      out += v[i];
    } else if constexpr (std::is_floating_point_v<T>) {
      out += fmt(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

struct Field {
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

#define TPC_INT(name, member, type)                                                        \
  Field {                                                                                  \
    name, [](const ExperimentConfig& c) { return std::to_string(c.member); },              \
        [](ExperimentConfig& c, std::string_view v) { c.member = parse_num<type>(name, v); } \
  }
#define TPC_REAL(name, member)                                                             \
  Field {                                                                                  \
    name, [](const ExperimentConfig& c) { return fmt(c.member); },                          \
        [](ExperimentConfig& c, std::string_view v) { c.member = parse_num<double>(name, v); } \
  }
#define TPC_STR(name, member)                                                              \
  Field {                                                                                  \
    name, [](const ExperimentConfig& c) { return c.member; },                               \
        [](ExperimentConfig& c, std::string_view v) { c.member = std::string(v); }          \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      TPC_STR("command", command),
      TPC_INT("seed", seed, std::uint64_t),
      TPC_STR("profile", profile),
      TPC_INT("per_level_count", per_level_count, std::int64_t),
      TPC_REAL("train_fraction", fractions.train),
      TPC_REAL("val_fraction", fractions.val),
      TPC_REAL("test_fraction", fractions.test),
      TPC_INT("count", count, std::int64_t),
      TPC_INT("n_layers", model.n_layers, int),
      TPC_INT("n_heads", model.n_heads, int),
      TPC_INT("embed_dim", model.embed_dim, int),
      TPC_INT("block_size", model.block_size, int),
      TPC_INT("vocab_size", model.vocab_size, int),
      TPC_INT("total_iters", plan.total_iters, std::int64_t),
      TPC_INT("batch_size", plan.batch_size, int),
      TPC_REAL("base_lr", plan.base_lr),
      Field{"milestones", [](const ExperimentConfig& c) { return join(c.plan.milestone_fracs); },
            [](ExperimentConfig& c, std::string_view v) {
              c.plan.milestone_fracs.clear();
              for (const auto& s : split_list(v)) {
                c.plan.milestone_fracs.push_back(parse_num<double>("milestones", s));
              }
            }},
      TPC_REAL("decay_factor", plan.decay_factor),
      TPC_REAL("grad_clip", plan.grad_clip),
      TPC_REAL("beta1", plan.adamw.beta1),
      TPC_REAL("beta2", plan.adamw.beta2),
      TPC_REAL("adam_eps", plan.adamw.eps),
      TPC_REAL("weight_decay", plan.adamw.weight_decay),
      TPC_INT("log_interval", plan.log_interval, int),
      TPC_INT("eval_interval", plan.eval_interval, int),
      TPC_INT("val_windows", plan.val_windows, int),
      TPC_STR("schedule", schedule),
      Field{"stage_iters", [](const ExperimentConfig& c) { return join(c.stage_iters); },
            [](ExperimentConfig& c, std::string_view v) {
              c.stage_iters.clear();
              for (const auto& s : split_list(v)) {
                c.stage_iters.push_back(parse_num<std::int64_t>("stage_iters", s));
              }
            }},
      TPC_STR("decode", decode),
      TPC_REAL("temperature", temperature),
      TPC_INT("eval_limit", eval_limit, std::int64_t),
      TPC_STR("input", input),
      TPC_STR("dataset", dataset),
      TPC_STR("checkpoint", checkpoint),
      Field{"checkpoints", [](const ExperimentConfig& c) { return join(c.checkpoints); },
            [](ExperimentConfig& c, std::string_view v) { c.checkpoints = split_list(v); }},
      TPC_STR("out", out),
  };
  return f;
}

#undef TPC_INT
#undef TPC_REAL
#undef TPC_STR

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(*this, trim(value));
      return;
    }
  }
  throw Error(ErrorKind::InvalidConfig, "unknown config key '" + std::string(key) + "'");
}

void ExperimentConfig::apply_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::InvalidConfig,
                  "line " + std::to_string(lineno) + ": expected key = value");
    }
    set(trim(std::string_view(t).substr(0, eq)), std::string_view(t).substr(eq + 1));
  }
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(*this) + "\n";
  return out;
}

ExperimentConfig ExperimentConfig::from_text(std::string_view text) {
  ExperimentConfig c;
  c.apply_text(text);
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  return from_text(read_file(path));
}

void ExperimentConfig::validate() const {
  model.validate();
  if (model.vocab_size != kVocabSize) {
    throw Error(ErrorKind::InvalidConfig, "vocab_size must equal the alphabet size");
  }
  plan.validate();
  profile_by_name(profile);
  if (per_level_count < 1 || count < 0 || eval_limit < 0) {
    throw Error(ErrorKind::InvalidConfig, "counts must be positive");
  }
  if (std::abs(fractions.train + fractions.val + fractions.test - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidConfig, "split fractions must sum to 1");
  }
  if (decode != "greedy" && decode != "sample") {
    throw Error(ErrorKind::InvalidConfig, "decode must be greedy or sample");
  }
  if (!(temperature > 0)) throw Error(ErrorKind::InvalidConfig, "temperature must be positive");
  make_schedule();
}

GenerateOptions ExperimentConfig::decode_options() const {
  GenerateOptions o;
  o.mode = decode == "sample" ? DecodeMode::Sample : DecodeMode::Greedy;
  o.temperature = temperature;
  o.seed = derive_seed(seed, 0xdec0);
  return o;
}

Schedule ExperimentConfig::make_schedule() const {
  const ScheduleKind kind = parse_schedule_kind(schedule);
  if (stage_iters.empty()) return tpc::make_schedule(kind, plan.total_iters);
  std::int64_t sum = 0;
  for (auto v : stage_iters) sum += v;
  if (sum != plan.total_iters) {
    throw Error(ErrorKind::InvalidConfig, "stage_iters must sum to total_iters");
  }
  return tpc::make_schedule(kind, plan.total_iters, stage_iters);
}

}  // namespace tpc
