// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tpc/corpus.hpp"
#include "tpc/model.hpp"

namespace tpc {

/// What the evaluators need from a model.
class CompletionModel {
 public:
  virtual ~CompletionModel() = default;

  /// Prediction i is the argmax guess for ids[i + 1] given ids[0..i]
  /// (ids.size() - 1 predictions).
  virtual std::vector<TokenId> teacher_forced(std::span<const TokenId> ids) = 0;

  /// Continuation of a non-empty prompt under the generation options.
  virtual std::vector<TokenId> complete(std::span<const TokenId> prompt,
                                        const GenerateOptions& opts) = 0;
};

/// The transformer. Consecutive prompts sharing a prefix reuse the key/value
/// cache.
class TransformerCompletion : public CompletionModel {
 public:
  explicit TransformerCompletion(const ModelParams<float>& params);

  std::vector<TokenId> teacher_forced(std::span<const TokenId> ids) override;
  std::vector<TokenId> complete(std::span<const TokenId> prompt,
                                const GenerateOptions& opts) override;

 private:
  const ModelParams<float>& params_;
  TransformerEngine<float> engine_;
  Decoder decoder_;
};

/// Harness self-test: replays the true continuation of whichever known text
/// starts with the prompt.
class ReplayOracle : public CompletionModel {
 public:
  explicit ReplayOracle(std::span<const AnnotatedSnippet> snippets);

  std::vector<TokenId> teacher_forced(std::span<const TokenId> ids) override;
  std::vector<TokenId> complete(std::span<const TokenId> prompt,
                                const GenerateOptions& opts) override;

 private:
  std::vector<std::vector<TokenId>> texts_;
};

/// Uniform random ids; seeded.
class RandomPredictor : public CompletionModel {
 public:
  explicit RandomPredictor(std::uint64_t seed, int vocab = kVocabSize);

  std::vector<TokenId> teacher_forced(std::span<const TokenId> ids) override;
  std::vector<TokenId> complete(std::span<const TokenId> prompt,
                                const GenerateOptions& opts) override;

 private:
  Rng rng_;
  int vocab_;
};

std::size_t levenshtein(std::string_view a, std::string_view b);

/// 100 * (1 - lev(a, b) / max(|a|, |b|, 1)).
double edit_similarity(std::string_view pred, std::string_view ref);

struct Tally {
  std::int64_t correct = 0;
  std::int64_t total = 0;

  double fraction() const { return total ? static_cast<double>(correct) / total : 0.0; }
  Tally& operator+=(const Tally& o) {
    correct += o.correct;
    total += o.total;
    return *this;
  }
};

/// Teacher-forced next-token accuracy over each snippet's code region.
Tally token_level_accuracy(CompletionModel& model, std::span<const AnnotatedSnippet> snippets);

inline constexpr int kLineMaxTokens = 128;

struct LineLevelResult {
  Tally exact;
  double es_sum = 0.0;

  double accuracy() const { return exact.fraction(); }
  double mean_es() const { return exact.total ? es_sum / static_cast<double>(exact.total) : 0.0; }
};

/// Every code line after the first is a target; the prompt is all preceding
/// lines. Generation stops at a newline or 128 tokens. Compared after
/// stripping surrounding whitespace.
LineLevelResult line_level_eval(CompletionModel& model, std::span<const AnnotatedSnippet> snippets,
                                const GenerateOptions& decode = {});

/// Prompt and exact expected continuation for the execution task.
std::string execution_prompt(const AnnotatedSnippet& s);
std::string execution_expected(const AnnotatedSnippet& s);
int execution_budget(const AnnotatedSnippet& s);

/// Exact-match output prediction over a flat list.
Tally execution_tally(CompletionModel& model, std::span<const AnnotatedSnippet> snippets,
                      const GenerateOptions& decode = {});

struct ExecutionResult {
  std::array<Tally, 3> per_level;  // by DifficultyLevel
  Tally overall;
};

/// Per-level test splits; overall is the count-weighted pool.
ExecutionResult execution_accuracy(CompletionModel& model, const LeveledDataset& dataset,
                                   const GenerateOptions& decode = {},
                                   std::int64_t limit_per_level = 0);

struct EvalReport {
  std::string name;
  Tally token;
  LineLevelResult line;
  ExecutionResult exec;

  static std::string csv_header();
  std::string csv_row() const;
};

/// Test split of ALL for token and line metrics, per-level test splits for
/// execution. limit_per_level > 0 truncates each split (in stored order).
EvalReport evaluate(CompletionModel& model, const LeveledDataset& dataset,
                    const GenerateOptions& decode = {}, std::int64_t limit_per_level = 0,
                    std::string name = {});

/// Same as evaluate() on a transformer, spread over `threads` workers that
/// each own a decoder. Results do not depend on the thread count.
EvalReport evaluate_params(const ModelParams<float>& params, const LeveledDataset& dataset,
                           const GenerateOptions& decode = {}, std::int64_t limit_per_level = 0,
                           std::string name = {}, int threads = 1);

/// Execution tally of a transformer over a flat list, parallel as above.
Tally execution_tally_params(const ModelParams<float>& params,
                             std::span<const AnnotatedSnippet> snippets,
                             const GenerateOptions& decode = {}, int threads = 1);

/// Aligned text tables: completion metrics (token acc, line acc, ES) and
/// execution accuracy with ALL / Easy / Medium / Hard columns, one row per report.
std::string comparison_table(std::span<const EvalReport> reports);

/// Spearman rank correlation with average ranks for ties; NaN when either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

struct OmValidationRow {
  int concept_level = 0;
  double mean_om = 0.0;
  Tally exec;
};

struct OmValidationTable {
  std::vector<OmValidationRow> rows;
  double spearman_rho = 0.0;

  std::string csv() const;
  std::string table() const;
};

OmValidationTable om_validation(std::vector<OmValidationRow> rows);

double mean_om(std::span<const AnnotatedSnippet> snippets);

}  // namespace tpc
