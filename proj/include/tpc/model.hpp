// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tpc/alphabet.hpp"
#include "tpc/random.hpp"

namespace tpc {

/// Decoder-only transformer hyperparameters. Defaults are the ~1M-parameter
/// configuration: 6 layers, 6 heads, width 120, context 256, 41 tokens, no
/// biases, no dropout.
struct ModelConfig {
  int n_layers = 6;
  int n_heads = 6;
  int embed_dim = 120;
  int block_size = 256;
  int vocab_size = kVocabSize;

  int head_dim() const { return embed_dim / n_heads; }
  void validate() const;

  static ModelConfig standard() { return {}; }
  /// Small text model used for the per-concept-level runs.
  static ModelConfig tiny() { return {2, 4, 64, 128, kVocabSize}; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// One named tensor inside the flat parameter vector. Matrices are row-major
/// [rows x cols]; linear layers are stored [out x in].
struct TensorSpec {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool decay = false;  // receives weight decay

  std::size_t size() const { return rows * cols; }
};

/// Tensor order (also the checkpoint order):
///   wte [vocab x d], wpe [block x d],
///   per layer: ln1 [1 x d], attn_qkv [3d x d], attn_proj [d x d],
///              ln2 [1 x d], mlp_fc [4d x d], mlp_proj [d x 4d],
///   ln_f [1 x d].
/// The output head reuses wte.
std::vector<TensorSpec> parameter_layout(const ModelConfig& cfg);
std::size_t parameter_count(const ModelConfig& cfg);

/// Storage for parameter-sized buffers. The fixed 64-byte alignment keeps
/// Eigen's vectorized loops on the same scalar/packet split in every process,
/// which bit-exact reruns depend on.
template <typename T>
using AlignedVector = std::vector<T, Eigen::aligned_allocator<T>>;

template <typename T>
struct ModelParams {
  ModelConfig config;
  std::vector<TensorSpec> layout;
  AlignedVector<T> values;

  const TensorSpec& tensor(std::size_t i) const { return layout[i]; }
  std::span<T> view(const TensorSpec& t) { return {values.data() + t.offset, t.size()}; }
  std::span<const T> view(const TensorSpec& t) const { return {values.data() + t.offset, t.size()}; }
};

/// All parameters zero: norm scales included, so every logit is zero.
template <typename T>
ModelParams<T> zero_params(const ModelConfig& cfg) {
  cfg.validate();
  ModelParams<T> p;
  p.config = cfg;
  p.layout = parameter_layout(cfg);
  p.values.assign(parameter_count(cfg), T(0));
  return p;
}

/// Gaussian N(0, 0.02) weights, residual output projections scaled by
/// 1/sqrt(2 * n_layers), norm scales 1. Deterministic per seed.
template <typename T>
ModelParams<T> init_params(const ModelConfig& cfg, std::uint64_t seed, double std_dev = 0.02);

template <typename T>
ModelParams<T> convert(const ModelParams<float>& p) {
  ModelParams<T> out;
  out.config = p.config;
  out.layout = p.layout;
  out.values.assign(p.values.begin(), p.values.end());
  return out;
}

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Forward and exact reverse-mode pass over a batch of equal-length windows.
/// Owns its activation buffers so repeated calls do not reallocate.
template <typename T>
class TransformerEngine {
 public:
  explicit TransformerEngine(const ModelConfig& cfg);

  /// tokens: batch * len ids, row-major by sequence. Throws
  /// Error(WindowTooLong) if len exceeds the block size.
  void forward(const ModelParams<T>& p, std::span<const TokenId> tokens, int batch, int len);

  /// [batch*len x vocab] from the last forward.
  const Mat<T>& logits() const { return logits_; }

  /// Mean next-token cross-entropy of the last forward against `targets`
  /// (batch * len ids). Accumulated in double.
  double loss(std::span<const TokenId> targets);

  /// Gradient of the last loss() with respect to every parameter, written
  /// (not accumulated) into `grad`, which is resized to the parameter count.
  void backward(const ModelParams<T>& p, AlignedVector<T>& grad);

  /// Convenience: windows of len+1 ids; inputs are the first len, targets the
  /// last len of each window.
  double loss_and_grads(const ModelParams<T>& p, std::span<const TokenId> windows, int batch,
                        AlignedVector<T>& grad);

  /// Loss only, same window convention.
  double loss_only(const ModelParams<T>& p, std::span<const TokenId> windows, int batch);

 private:
  struct LayerCache {
    Mat<T> xhat1, a1, qkv, y, xhat2, a2, h, t;  // t = tanh term of the GELU
    Vec<T> rstd1, rstd2;
    // batch * heads * len * len softmax probabilities; aligned so vectorized
    // exp sees the same packet split regardless of heap placement
    std::vector<T, Eigen::aligned_allocator<T>> att;
  };

  void split_windows(std::span<const TokenId> windows, int batch);

  ModelConfig cfg_;
  int batch_ = 0;
  int len_ = 0;
  std::vector<TokenId> tokens_;
  std::vector<TokenId> inputs_;
  std::vector<TokenId> targets_;
  std::vector<LayerCache> layers_;
  Mat<T> x_;
  Mat<T> xhatf_, af_;
  Vec<T> rstdf_;
  Mat<T> logits_;
  Mat<T> dlogits_;
  // backward scratch
  Mat<T> gelu_, dx_, dwide_, dnarrow_, dy_, dqkv_, dp_;
};

extern template class TransformerEngine<float>;
extern template class TransformerEngine<double>;

/// Logits for a single window, shape [len x vocab].
template <typename T>
Mat<T> forward_logits(const ModelParams<T>& p, std::span<const TokenId> window);

/// Incremental single-sequence inference with a key/value cache. Once the
/// history exceeds the block size the context is the last block_size ids and
/// the cache is rebuilt for the shifted positions.
class Decoder {
 public:
  explicit Decoder(const ModelParams<float>& params);

  void reset();

  /// Appends one id; returns logits for the next position.
  const AlignedVector<float>& feed(TokenId id);
  const AlignedVector<float>& feed(std::span<const TokenId> ids);

  /// Logits after the most recent feed.
  const AlignedVector<float>& last_logits() const { return logits_; }

  std::size_t size() const { return history_.size(); }
  const std::vector<TokenId>& history() const { return history_; }

  /// Drops history back to `n` ids (n >= 1) and restores the matching logits.
  void rewind(std::size_t n);

 private:
  void step(TokenId id, int pos);
  void rebuild();

  const ModelParams<float>& p_;
  ModelConfig cfg_;
  std::vector<TokenId> history_;
  std::size_t window_start_ = 0;  // history index of cache position 0
  int cached_ = 0;
  std::vector<Mat<float>> k_;  // per layer [block x d]
  std::vector<Mat<float>> v_;
  std::vector<AlignedVector<float>> logits_at_;  // per cached position
  AlignedVector<float> logits_;
  // scratch
  Vec<float> x_, a_, qkv_, y_, h_, scores_;
};

enum class DecodeMode { Greedy, Sample };

struct GenerateOptions {
  int max_new = 256;
  DecodeMode mode = DecodeMode::Greedy;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  bool stop_at_newline = false;   // stop once a newline is generated
  bool stop_at_blank_line = true;  // stop once the sequence ends in "\n\n"
};

/// Picks the next id from logits: argmax (lowest id on ties) or a
/// multinomial draw from softmax(logits / temperature).
TokenId choose_token(std::span<const float> logits, DecodeMode mode, double temperature, Rng& rng);

/// Appends up to max_new ids after `prompt` and returns only the new ids.
std::vector<TokenId> generate(const ModelParams<float>& params, std::span<const TokenId> prompt,
                              const GenerateOptions& opts);

/// Continues generation on a decoder whose history is the prompt.
std::vector<TokenId> generate(Decoder& decoder, const GenerateOptions& opts);

}  // namespace tpc
