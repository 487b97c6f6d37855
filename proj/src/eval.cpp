// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "tpc/error.hpp"
#include "tpc/interp.hpp"

namespace tpc {

namespace {

TokenId argmax_row(const float* row, int n) {
  return static_cast<TokenId>(std::max_element(row, row + n) - row);
}

std::string strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string_view> code_lines(std::string_view source) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < source.size()) {
    const auto nl = source.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.push_back(source.substr(pos));
      break;
    }
    out.push_back(source.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

// Shared stop rule for the non-model completers.
bool stops(std::span<const TokenId> prompt, const std::vector<TokenId>& gen,
           const GenerateOptions& opts) {
  const TokenId tok = gen.back();
  if (tok != kNewlineId) return false;
  if (opts.stop_at_newline) return true;
  if (!opts.stop_at_blank_line) return false;
  const TokenId prev = gen.size() >= 2 ? gen[gen.size() - 2] : prompt.back();
  return prev == kNewlineId;
}

std::vector<const AnnotatedSnippet*> limited(std::span<const AnnotatedSnippet> s,
                                             std::int64_t limit) {
  std::vector<const AnnotatedSnippet*> out;
  const std::size_t n =
      limit > 0 ? std::min<std::size_t>(s.size(), static_cast<std::size_t>(limit)) : s.size();
  for (std::size_t i = 0; i < n; ++i) out.push_back(&s[i]);
  return out;
}

std::string pct(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * f);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace

// ---- transformer ----

TransformerCompletion::TransformerCompletion(const ModelParams<float>& params)
    : params_(params), engine_(params.config), decoder_(params) {}

std::vector<TokenId> TransformerCompletion::teacher_forced(std::span<const TokenId> ids) {
  std::vector<TokenId> out;
  if (ids.size() < 2) return out;
  const int vocab = params_.config.vocab_size;
  if (ids.size() <= static_cast<std::size_t>(params_.config.block_size)) {
    engine_.forward(params_, ids, 1, static_cast<int>(ids.size()));
    const Mat<float>& logits = engine_.logits();
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      out.push_back(argmax_row(logits.data() + i * static_cast<std::size_t>(vocab), vocab));
    }
    return out;
  }
  decoder_.reset();
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    const auto& logits = decoder_.feed(ids[i]);
    out.push_back(argmax_row(logits.data(), vocab));
  }
  return out;
}

std::vector<TokenId> TransformerCompletion::complete(std::span<const TokenId> prompt,
                                                     const GenerateOptions& opts) {
  if (prompt.empty()) throw Error(ErrorKind::InvalidConfig, "generation needs a prompt");
  const auto& hist = decoder_.history();
  std::size_t common = 0;
  while (common < hist.size() && common < prompt.size() && hist[common] == prompt[common]) {
    ++common;
  }
  if (common == 0) {
    decoder_.reset();
  } else {
    decoder_.rewind(common);
  }
  decoder_.feed(prompt.subspan(common));
  return generate(decoder_, opts);
}

// ---- oracles ----

ReplayOracle::ReplayOracle(std::span<const AnnotatedSnippet> snippets) {
  for (const auto& s : snippets) texts_.push_back(tokenize(s.render()));
}

std::vector<TokenId> ReplayOracle::teacher_forced(std::span<const TokenId> ids) {
  std::vector<TokenId> out;
  if (ids.size() < 2) return out;
  for (const auto& t : texts_) {
    if (t.size() >= ids.size() && std::equal(ids.begin(), ids.end(), t.begin())) {
      out.assign(t.begin() + 1, t.begin() + static_cast<std::ptrdiff_t>(ids.size()));
      return out;
    }
  }
  out.assign(ids.size() - 1, kNewlineId);
  return out;
}

std::vector<TokenId> ReplayOracle::complete(std::span<const TokenId> prompt,
                                            const GenerateOptions& opts) {
  std::vector<TokenId> out;
  for (const auto& t : texts_) {
    if (t.size() < prompt.size() || !std::equal(prompt.begin(), prompt.end(), t.begin())) continue;
    for (std::size_t i = prompt.size(); i < t.size() && static_cast<int>(out.size()) < opts.max_new;
         ++i) {
      out.push_back(t[i]);
      if (stops(prompt, out, opts)) break;
    }
    break;
  }
  return out;
}

RandomPredictor::RandomPredictor(std::uint64_t seed, int vocab) : rng_(seed), vocab_(vocab) {}

std::vector<TokenId> RandomPredictor::teacher_forced(std::span<const TokenId> ids) {
  std::vector<TokenId> out;
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    out.push_back(static_cast<TokenId>(rng_.below(static_cast<std::uint64_t>(vocab_))));
  }
  return out;
}

std::vector<TokenId> RandomPredictor::complete(std::span<const TokenId> prompt,
                                               const GenerateOptions& opts) {
  std::vector<TokenId> out;
  while (static_cast<int>(out.size()) < opts.max_new) {
    out.push_back(static_cast<TokenId>(rng_.below(static_cast<std::uint64_t>(vocab_))));
    if (stops(prompt, out, opts)) break;
  }
  return out;
}

// ---- metrics ----

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double edit_similarity(std::string_view pred, std::string_view ref) {
  const double denom = static_cast<double>(std::max({pred.size(), ref.size(), std::size_t{1}}));
  return 100.0 * (1.0 - static_cast<double>(levenshtein(pred, ref)) / denom);
}

Tally token_level_accuracy(CompletionModel& model, std::span<const AnnotatedSnippet> snippets) {
  Tally t;
  for (const auto& s : snippets) {
    const auto ids = tokenize(s.source);
    const auto pred = model.teacher_forced(ids);
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      t.correct += pred[i] == ids[i + 1];
      ++t.total;
    }
  }
  return t;
}

LineLevelResult line_level_eval(CompletionModel& model, std::span<const AnnotatedSnippet> snippets,
                                const GenerateOptions& decode) {
  LineLevelResult r;
  GenerateOptions opts = decode;
  opts.max_new = kLineMaxTokens;
  opts.stop_at_newline = true;
  opts.stop_at_blank_line = false;
  for (const auto& s : snippets) {
    const auto lines = code_lines(s.source);
    std::string prompt;
    for (std::size_t j = 0; j < lines.size(); ++j) {
      if (j > 0) {
        std::string pred = detokenize(model.complete(tokenize(prompt), opts));
        pred = strip(pred);
        const std::string ref = strip(lines[j]);
        r.exact.correct += pred == ref;
        ++r.exact.total;
        r.es_sum += edit_similarity(pred, ref);
      }
      prompt.append(lines[j]);
      prompt.push_back('\n');
    }
  }
  return r;
}

std::string execution_prompt(const AnnotatedSnippet& s) {
  return s.source + std::string(kOutputMarker) + "\n";
}

std::string execution_expected(const AnnotatedSnippet& s) {
  return expected_output_block(s.output_lines);
}

int execution_budget(const AnnotatedSnippet& s) {
  return 2 * static_cast<int>(execution_expected(s).size()) + 32;
}

Tally execution_tally(CompletionModel& model, std::span<const AnnotatedSnippet> snippets,
                      const GenerateOptions& decode) {
  Tally t;
  GenerateOptions opts = decode;
  opts.stop_at_newline = false;
  opts.stop_at_blank_line = true;
  for (const auto& s : snippets) {
    opts.max_new = execution_budget(s);
    const std::string got = detokenize(model.complete(tokenize(execution_prompt(s)), opts));
    t.correct += got == execution_expected(s);
    ++t.total;
  }
  return t;
}

ExecutionResult execution_accuracy(CompletionModel& model, const LeveledDataset& dataset,
                                   const GenerateOptions& decode, std::int64_t limit_per_level) {
  ExecutionResult r;
  for (int l = 0; l < 3; ++l) {
    const auto& test = dataset.levels[static_cast<std::size_t>(l)].test;
    const std::size_t n = limit_per_level > 0
                              ? std::min<std::size_t>(test.size(), limit_per_level)
                              : test.size();
    r.per_level[static_cast<std::size_t>(l)] =
        execution_tally(model, std::span(test).first(n), decode);
    r.overall += r.per_level[static_cast<std::size_t>(l)];
  }
  return r;
}

std::string EvalReport::csv_header() {
  return "model,token_acc,token_n,line_acc,line_es,line_n,exec_all,exec_easy,exec_medium,"
         "exec_hard,exec_n_easy,exec_n_medium,exec_n_hard";
}

std::string EvalReport::csv_row() const {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%.6f,%lld,%.6f,%.4f,%lld,%.6f,%.6f,%.6f,%.6f,%lld,%lld,%lld",
                name.c_str(), token.fraction(), static_cast<long long>(token.total),
                line.accuracy(), line.mean_es(), static_cast<long long>(line.exact.total),
                exec.overall.fraction(), exec.per_level[0].fraction(),
                exec.per_level[1].fraction(), exec.per_level[2].fraction(),
                static_cast<long long>(exec.per_level[0].total),
                static_cast<long long>(exec.per_level[1].total),
                static_cast<long long>(exec.per_level[2].total));
  return buf;
}

EvalReport evaluate(CompletionModel& model, const LeveledDataset& dataset,
                    const GenerateOptions& decode, std::int64_t limit_per_level,
                    std::string name) {
  EvalReport rep;
  rep.name = std::move(name);
  std::vector<AnnotatedSnippet> pool;
  for (const auto& level : dataset.levels) {
    for (const auto* s : limited(level.test, limit_per_level)) pool.push_back(*s);
  }
  rep.token = token_level_accuracy(model, pool);
  rep.line = line_level_eval(model, pool, decode);
  rep.exec = execution_accuracy(model, dataset, decode, limit_per_level);
  return rep;
}

namespace {

// Runs fn(model, i) for i in [0, n) over `threads` workers, each with its own
// TransformerCompletion. Items are claimed dynamically; outputs are indexed.
template <typename Fn>
void parallel_items(const ModelParams<float>& params, std::size_t n, int threads, Fn fn) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    try {
      TransformerCompletion model(params);
      for (std::size_t i = next++; i < n; i = next++) fn(model, i);
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = n;
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

Tally execution_tally_params(const ModelParams<float>& params,
                             std::span<const AnnotatedSnippet> snippets,
                             const GenerateOptions& decode, int threads) {
  std::vector<Tally> per(snippets.size());
  parallel_items(params, snippets.size(), threads, [&](CompletionModel& m, std::size_t i) {
    per[i] = execution_tally(m, snippets.subspan(i, 1), decode);
  });
  Tally t;
  for (const auto& p : per) t += p;
  return t;
}

EvalReport evaluate_params(const ModelParams<float>& params, const LeveledDataset& dataset,
                           const GenerateOptions& decode, std::int64_t limit_per_level,
                           std::string name, int threads) {
  EvalReport rep;
  rep.name = std::move(name);
  std::vector<const AnnotatedSnippet*> pool;
  std::vector<int> level_of;
  for (int l = 0; l < 3; ++l) {
    for (const auto* s : limited(dataset.levels[static_cast<std::size_t>(l)].test,
                                 limit_per_level)) {
      pool.push_back(s);
      level_of.push_back(l);
    }
  }
  struct Item {
    Tally token, exec;
    LineLevelResult line;
  };
  std::vector<Item> items(pool.size());
  parallel_items(params, pool.size(), threads, [&](CompletionModel& m, std::size_t i) {
    const std::span<const AnnotatedSnippet> one(pool[i], 1);
    items[i].token = token_level_accuracy(m, one);
    items[i].line = line_level_eval(m, one, decode);
    items[i].exec = execution_tally(m, one, decode);
  });
  for (std::size_t i = 0; i < items.size(); ++i) {
    rep.token += items[i].token;
    rep.line.exact += items[i].line.exact;
    rep.line.es_sum += items[i].line.es_sum;
    rep.exec.per_level[static_cast<std::size_t>(level_of[i])] += items[i].exec;
    rep.exec.overall += items[i].exec;
  }
  return rep;
}

std::string comparison_table(std::span<const EvalReport> reports) {
  std::size_t w = 6;
  for (const auto& r : reports) w = std::max(w, r.name.size() + 2);
  std::string out = "Code completion\n";
  out += pad("model", w) + pad("token_acc", 12) + pad("line_acc", 12) + "line_es\n";
  for (const auto& r : reports) {
    char es[32];
    std::snprintf(es, sizeof es, "%.2f", r.line.mean_es());
    out += pad(r.name, w) + pad(pct(r.token.fraction()), 12) + pad(pct(r.line.accuracy()), 12) +
           es + "\n";
  }
  out += "\nExecution accuracy\n";
  out += pad("model", w) + pad("ALL", 10) + pad("Easy", 10) + pad("Medium", 10) + "Hard\n";
  for (const auto& r : reports) {
    out += pad(r.name, w) + pad(pct(r.exec.overall.fraction()), 10) +
           pad(pct(r.exec.per_level[0].fraction()), 10) +
           pad(pct(r.exec.per_level[1].fraction()), 10) + pct(r.exec.per_level[2].fraction()) +
           "\n";
  }
  return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::InvalidConfig, "spearman needs two equal-length samples of size >= 2");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

double mean_om(std::span<const AnnotatedSnippet> snippets) {
  if (snippets.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : snippets) sum += s.score.om;
  return sum / static_cast<double>(snippets.size());
}

OmValidationTable om_validation(std::vector<OmValidationRow> rows) {
  OmValidationTable t;
  t.rows = std::move(rows);
  std::vector<double> om, acc;
  for (const auto& r : t.rows) {
    om.push_back(r.mean_om);
    acc.push_back(r.exec.fraction());
  }
  t.spearman_rho = spearman(om, acc);
  return t;
}

std::string OmValidationTable::csv() const {
  std::string out = "level,mean_om,exec_acc,n\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%lld\n", r.concept_level, r.mean_om,
                  r.exec.fraction(), static_cast<long long>(r.exec.total));
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "spearman,%.6f,,\n", spearman_rho);
  return out + buf;
}

std::string OmValidationTable::table() const {
  std::string out = pad("level", 8) + pad("mean_om", 10) + pad("exec_acc", 10) + "n\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.2f", r.mean_om);
    out += pad(std::to_string(r.concept_level), 8) + pad(buf, 10) +
           pad(pct(r.exec.fraction()), 10) + std::to_string(r.exec.total) + "\n";
  }
  std::snprintf(buf, sizeof buf, "spearman(OM, accuracy) = %.4f\n", spearman_rho);
  return out + buf;
}

}  // namespace tpc
