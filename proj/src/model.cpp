// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/model.hpp"

#include <algorithm>
#include <cmath>

#include "tpc/error.hpp"

namespace tpc {

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluK = 0.044715;

// index of the first tensor of layer l
constexpr std::size_t layer_base(int l) { return 2 + 6 * static_cast<std::size_t>(l); }
enum : std::size_t { kLn1 = 0, kQkv = 1, kProj = 2, kLn2 = 3, kFc = 4, kMlpProj = 5 };

template <typename T>
using CMap = Eigen::Map<const Mat<T>>;
template <typename T>
using MMap = Eigen::Map<Mat<T>>;
template <typename T>
using CRow = Eigen::Map<const Eigen::Array<T, 1, Eigen::Dynamic>>;

template <typename T>
CMap<T> tensor_map(const ModelParams<T>& p, std::size_t i) {
  const TensorSpec& s = p.layout[i];
  return CMap<T>(p.values.data() + s.offset, static_cast<Eigen::Index>(s.rows),
                 static_cast<Eigen::Index>(s.cols));
}

template <typename T>
MMap<T> grad_map(const ModelParams<T>& p, AlignedVector<T>& g, std::size_t i) {
  const TensorSpec& s = p.layout[i];
  return MMap<T>(g.data() + s.offset, static_cast<Eigen::Index>(s.rows),
                 static_cast<Eigen::Index>(s.cols));
}

template <typename T>
void layernorm_forward(const Mat<T>& x, const T* gamma, Mat<T>& xhat, Vec<T>& rstd, Mat<T>& out) {
  const Eigen::Index rows = x.rows(), c = x.cols();
  xhat.resize(rows, c);
  out.resize(rows, c);
  rstd.resize(rows);
  CRow<T> g(gamma, c);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = x.row(r).template cast<double>().array();
    const double mean = row.sum() / static_cast<double>(c);
    const double var = (row - mean).square().sum() / static_cast<double>(c);
    const double rs = 1.0 / std::sqrt(var + kLnEps);
    rstd[r] = static_cast<T>(rs);
    xhat.row(r) = ((row - mean) * rs).template cast<T>().matrix();
    out.row(r) = (xhat.row(r).array() * g).matrix();
  }
}

// dx += d(in) given d(out); dgamma += sum over rows
template <typename T>
void layernorm_backward(const Mat<T>& dout, const Mat<T>& xhat, const Vec<T>& rstd, const T* gamma,
                        T* dgamma, Mat<T>& dx) {
  const Eigen::Index rows = dout.rows(), c = dout.cols();
  CRow<T> g(gamma, c);
  Eigen::Map<Eigen::Array<T, 1, Eigen::Dynamic>> dg(dgamma, c);
  dg += (dout.array() * xhat.array()).colwise().sum();
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Array<T, 1, Eigen::Dynamic> dxhat = dout.row(r).array() * g;
    const double m1 = dxhat.template cast<double>().sum() / static_cast<double>(c);
    const double m2 =
        (dxhat * xhat.row(r).array()).template cast<double>().sum() / static_cast<double>(c);
    dx.row(r).array() +=
        rstd[r] * (dxhat - static_cast<T>(m1) - xhat.row(r).array() * static_cast<T>(m2));
  }
}

void check_tokens(std::span<const TokenId> ids, int vocab) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= vocab) {
      throw OffsetError(ErrorKind::UnknownCharacter, i, "token id out of vocabulary");
    }
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (n_layers < 1 || n_heads < 1 || embed_dim < 1 || block_size < 1 || vocab_size < 1) {
    throw Error(ErrorKind::InvalidConfig, "model dimensions must be positive");
  }
  if (embed_dim % n_heads != 0) {
    throw Error(ErrorKind::InvalidConfig, "embed_dim must be divisible by n_heads");
  }
}

std::vector<TensorSpec> parameter_layout(const ModelConfig& cfg) {
  cfg.validate();
  const std::size_t d = static_cast<std::size_t>(cfg.embed_dim);
  std::vector<TensorSpec> out;
  std::size_t offset = 0;
  auto add = [&](std::string name, std::size_t rows, std::size_t cols, bool decay) {
    out.push_back({std::move(name), offset, rows, cols, decay});
    offset += rows * cols;
  };
  add("wte", static_cast<std::size_t>(cfg.vocab_size), d, false);
  add("wpe", static_cast<std::size_t>(cfg.block_size), d, false);
  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string pre = "h" + std::to_string(l) + ".";
    add(pre + "ln1", 1, d, false);
    add(pre + "attn_qkv", 3 * d, d, true);
    add(pre + "attn_proj", d, d, true);
    add(pre + "ln2", 1, d, false);
    add(pre + "mlp_fc", 4 * d, d, true);
    add(pre + "mlp_proj", d, 4 * d, true);
  }
  add("ln_f", 1, d, false);
  return out;
}

std::size_t parameter_count(const ModelConfig& cfg) {
  const auto layout = parameter_layout(cfg);
  return layout.back().offset + layout.back().size();
}

template <typename T>
ModelParams<T> init_params(const ModelConfig& cfg, std::uint64_t seed, double std_dev) {
  ModelParams<T> p = zero_params<T>(cfg);
  Rng rng(derive_seed(seed, 0x1417));
  const double resid = std_dev / std::sqrt(2.0 * cfg.n_layers);
  for (const TensorSpec& s : p.layout) {
    auto v = p.view(s);
    const bool norm = s.rows == 1;
    const bool is_resid = s.name.ends_with("attn_proj") || s.name.ends_with("mlp_proj");
    for (T& x : v) {
      if (norm) {
        x = T(1);
      } else {
        x = static_cast<T>(rng.normal() * (is_resid ? resid : std_dev));
      }
    }
  }
  return p;
}

template ModelParams<float> init_params<float>(const ModelConfig&, std::uint64_t, double);
template ModelParams<double> init_params<double>(const ModelConfig&, std::uint64_t, double);

template <typename T>
TransformerEngine<T>::TransformerEngine(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  layers_.resize(static_cast<std::size_t>(cfg_.n_layers));
}

template <typename T>
void TransformerEngine<T>::forward(const ModelParams<T>& p, std::span<const TokenId> tokens,
                                   int batch, int len) {
  if (len > cfg_.block_size) {
    throw Error(ErrorKind::WindowTooLong, "sequence of " + std::to_string(len) +
                                              " exceeds block size " +
                                              std::to_string(cfg_.block_size));
  }
  if (batch < 1 || len < 1 || tokens.size() != static_cast<std::size_t>(batch) * len) {
    throw Error(ErrorKind::InvalidConfig, "token count does not match batch * len");
  }
  if (!(p.config == cfg_)) throw Error(ErrorKind::InvalidConfig, "parameter config mismatch");
  check_tokens(tokens, cfg_.vocab_size);
  batch_ = batch;
  len_ = len;
  tokens_.assign(tokens.begin(), tokens.end());

  const int c = cfg_.embed_dim, nh = cfg_.n_heads, hs = cfg_.head_dim();
  const Eigen::Index rows = static_cast<Eigen::Index>(batch) * len;
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(hs)));

  const auto wte = tensor_map(p, 0);
  const auto wpe = tensor_map(p, 1);
  x_.resize(rows, c);
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < len; ++t) {
      const Eigen::Index r = static_cast<Eigen::Index>(b) * len + t;
      x_.row(r) = wte.row(tokens_[static_cast<std::size_t>(r)]) + wpe.row(t);
    }
  }

  for (int l = 0; l < cfg_.n_layers; ++l) {
    LayerCache& lc = layers_[static_cast<std::size_t>(l)];
    const std::size_t base = layer_base(l);
    layernorm_forward(x_, p.values.data() + p.layout[base + kLn1].offset, lc.xhat1, lc.rstd1,
                      lc.a1);
    lc.qkv.noalias() = lc.a1 * tensor_map(p, base + kQkv).transpose();

    lc.y.resize(rows, c);
    lc.att.resize(static_cast<std::size_t>(batch) * nh * len * len);
    for (int b = 0; b < batch; ++b) {
      const Eigen::Index r0 = static_cast<Eigen::Index>(b) * len;
      for (int h = 0; h < nh; ++h) {
        MMap<T> P(lc.att.data() + (static_cast<std::size_t>(b) * nh + h) * len * len, len, len);
        const auto q = lc.qkv.block(r0, h * hs, len, hs);
        const auto k = lc.qkv.block(r0, c + h * hs, len, hs);
        const auto v = lc.qkv.block(r0, 2 * c + h * hs, len, hs);
        P.noalias() = q * k.transpose();
        for (int i = 0; i < len; ++i) {
          auto seg = P.row(i).head(i + 1).array();
          seg *= scale;
          const T m = seg.maxCoeff();
          seg = (seg - m).exp();
          seg /= seg.sum();
          P.row(i).tail(len - i - 1).setZero();
        }
        lc.y.block(r0, h * hs, len, hs).noalias() = P * v;
      }
    }
    x_.noalias() += lc.y * tensor_map(p, base + kProj).transpose();

    layernorm_forward(x_, p.values.data() + p.layout[base + kLn2].offset, lc.xhat2, lc.rstd2,
                      lc.a2);
    lc.h.noalias() = lc.a2 * tensor_map(p, base + kFc).transpose();
    lc.t = (static_cast<T>(kGeluC) * (lc.h.array() + static_cast<T>(kGeluK) * lc.h.array().cube()))
               .tanh()
               .matrix();
    gelu_ = (static_cast<T>(0.5) * lc.h.array() * (T(1) + lc.t.array())).matrix();
    x_.noalias() += gelu_ * tensor_map(p, base + kMlpProj).transpose();
  }

  layernorm_forward(x_, p.values.data() + p.layout.back().offset, xhatf_, rstdf_, af_);
  logits_.noalias() = af_ * wte.transpose();
}

template <typename T>
double TransformerEngine<T>::loss(std::span<const TokenId> targets) {
  const Eigen::Index rows = logits_.rows();
  if (targets.size() != static_cast<std::size_t>(rows)) {
    throw Error(ErrorKind::InvalidConfig, "target count does not match the last forward");
  }
  check_tokens(targets, cfg_.vocab_size);
  targets_.assign(targets.begin(), targets.end());
  dlogits_.resize(rows, logits_.cols());
  double total = 0.0;
  const T inv = static_cast<T>(1.0 / static_cast<double>(rows));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = logits_.row(r).array();
    const T m = row.maxCoeff();
    dlogits_.row(r) = (row - m).exp().matrix();
    const double s = dlogits_.row(r).template cast<double>().sum();
    const TokenId tgt = targets_[static_cast<std::size_t>(r)];
    total += static_cast<double>(m) + std::log(s) - static_cast<double>(row[tgt]);
    dlogits_.row(r) *= static_cast<T>(1.0 / s);
    dlogits_(r, tgt) -= T(1);
    dlogits_.row(r) *= inv;
  }
  return total / static_cast<double>(rows);
}

template <typename T>
void TransformerEngine<T>::backward(const ModelParams<T>& p, AlignedVector<T>& grad) {
  if (dlogits_.rows() != logits_.rows() || targets_.empty()) {
    throw Error(ErrorKind::InvalidConfig, "backward requires forward and loss first");
  }
  grad.assign(p.values.size(), T(0));
  const int c = cfg_.embed_dim, nh = cfg_.n_heads, hs = cfg_.head_dim();
  const int len = len_;
  const Eigen::Index rows = static_cast<Eigen::Index>(batch_) * len;
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(hs)));

  const auto wte = tensor_map(p, 0);
  auto dwte = grad_map(p, grad, 0);
  auto dwpe = grad_map(p, grad, 1);

  dwte.noalias() += dlogits_.transpose() * af_;
  dnarrow_.noalias() = dlogits_ * wte;
  dx_.setZero(rows, c);
  layernorm_backward(dnarrow_, xhatf_, rstdf_, p.values.data() + p.layout.back().offset,
                     grad.data() + p.layout.back().offset, dx_);

  for (int l = cfg_.n_layers - 1; l >= 0; --l) {
    LayerCache& lc = layers_[static_cast<std::size_t>(l)];
    const std::size_t base = layer_base(l);

    // MLP branch
    gelu_ = (static_cast<T>(0.5) * lc.h.array() * (T(1) + lc.t.array())).matrix();
    grad_map(p, grad, base + kMlpProj).noalias() += dx_.transpose() * gelu_;
    dwide_.noalias() = dx_ * tensor_map(p, base + kMlpProj);
    {
      const auto h = lc.h.array();
      const auto t = lc.t.array();
      dwide_.array() *= static_cast<T>(0.5) * (T(1) + t) +
                        static_cast<T>(0.5) * h * (T(1) - t.square()) *
                            static_cast<T>(kGeluC) *
                            (T(1) + static_cast<T>(3 * kGeluK) * h.square());
    }
    grad_map(p, grad, base + kFc).noalias() += dwide_.transpose() * lc.a2;
    dnarrow_.noalias() = dwide_ * tensor_map(p, base + kFc);
    layernorm_backward(dnarrow_, lc.xhat2, lc.rstd2,
                       p.values.data() + p.layout[base + kLn2].offset,
                       grad.data() + p.layout[base + kLn2].offset, dx_);

    // attention branch
    grad_map(p, grad, base + kProj).noalias() += dx_.transpose() * lc.y;
    dy_.noalias() = dx_ * tensor_map(p, base + kProj);
    dqkv_.resize(rows, 3 * c);
    dp_.resize(len, len);
    for (int b = 0; b < batch_; ++b) {
      const Eigen::Index r0 = static_cast<Eigen::Index>(b) * len;
      for (int h = 0; h < nh; ++h) {
        const CMap<T> P(lc.att.data() + (static_cast<std::size_t>(b) * nh + h) * len * len, len,
                        len);
        const auto q = lc.qkv.block(r0, h * hs, len, hs);
        const auto k = lc.qkv.block(r0, c + h * hs, len, hs);
        const auto v = lc.qkv.block(r0, 2 * c + h * hs, len, hs);
        const auto dyh = dy_.block(r0, h * hs, len, hs);
        dp_.noalias() = dyh * v.transpose();
        dqkv_.block(r0, 2 * c + h * hs, len, hs).noalias() = P.transpose() * dyh;
        for (int i = 0; i < len; ++i) {
          const auto pi = P.row(i).head(i + 1).array();
          auto di = dp_.row(i).head(i + 1).array();
          const T dot = (pi * di).sum();
          di = pi * (di - dot) * scale;
          dp_.row(i).tail(len - i - 1).setZero();
        }
        dqkv_.block(r0, h * hs, len, hs).noalias() = dp_ * k;
        dqkv_.block(r0, c + h * hs, len, hs).noalias() = dp_.transpose() * q;
      }
    }
    grad_map(p, grad, base + kQkv).noalias() += dqkv_.transpose() * lc.a1;
    dnarrow_.noalias() = dqkv_ * tensor_map(p, base + kQkv);
    layernorm_backward(dnarrow_, lc.xhat1, lc.rstd1,
                       p.values.data() + p.layout[base + kLn1].offset,
                       grad.data() + p.layout[base + kLn1].offset, dx_);
  }

  for (int b = 0; b < batch_; ++b) {
    for (int t = 0; t < len; ++t) {
      const Eigen::Index r = static_cast<Eigen::Index>(b) * len + t;
      dwte.row(tokens_[static_cast<std::size_t>(r)]) += dx_.row(r);
      dwpe.row(t) += dx_.row(r);
    }
  }
}

template <typename T>
void TransformerEngine<T>::split_windows(std::span<const TokenId> windows, int batch) {
  if (batch < 1 || windows.size() % static_cast<std::size_t>(batch) != 0 ||
      windows.size() / static_cast<std::size_t>(batch) < 2) {
    throw Error(ErrorKind::InvalidConfig, "windows must be batch * (len + 1) ids, len >= 1");
  }
  const std::size_t w = windows.size() / static_cast<std::size_t>(batch);
  inputs_.clear();
  targets_.clear();
  for (int b = 0; b < batch; ++b) {
    const auto row = windows.subspan(static_cast<std::size_t>(b) * w, w);
    inputs_.insert(inputs_.end(), row.begin(), row.end() - 1);
    targets_.insert(targets_.end(), row.begin() + 1, row.end());
  }
}

template <typename T>
double TransformerEngine<T>::loss_and_grads(const ModelParams<T>& p,
                                            std::span<const TokenId> windows, int batch,
                                            AlignedVector<T>& grad) {
  const double l = loss_only(p, windows, batch);
  backward(p, grad);
  return l;
}

template <typename T>
double TransformerEngine<T>::loss_only(const ModelParams<T>& p, std::span<const TokenId> windows,
                                       int batch) {
  split_windows(windows, batch);
  const int len = static_cast<int>(inputs_.size() / static_cast<std::size_t>(batch));
  const std::vector<TokenId> targets = targets_;
  forward(p, inputs_, batch, len);
  return loss(targets);
}

template class TransformerEngine<float>;
template class TransformerEngine<double>;

template <typename T>
Mat<T> forward_logits(const ModelParams<T>& p, std::span<const TokenId> window) {
  TransformerEngine<T> engine(p.config);
  engine.forward(p, window, 1, static_cast<int>(window.size()));
  return engine.logits();
}

template Mat<float> forward_logits<float>(const ModelParams<float>&, std::span<const TokenId>);
template Mat<double> forward_logits<double>(const ModelParams<double>&, std::span<const TokenId>);

// ---- incremental decoding ----

namespace {

void layernorm_vec(const Vec<float>& x, const float* gamma, Vec<float>& out) {
  const auto d = x.template cast<double>().array();
  const double mean = d.mean();
  const double var = (d - mean).square().mean();
  const double rs = 1.0 / std::sqrt(var + kLnEps);
  out = ((d - mean) * rs).cast<float>().matrix();
  out.array() *= Eigen::Map<const Eigen::ArrayXf>(gamma, x.size());
}

}  // namespace

Decoder::Decoder(const ModelParams<float>& params) : p_(params), cfg_(params.config) {
  cfg_.validate();
  k_.assign(static_cast<std::size_t>(cfg_.n_layers), Mat<float>(cfg_.block_size, cfg_.embed_dim));
  v_.assign(static_cast<std::size_t>(cfg_.n_layers), Mat<float>(cfg_.block_size, cfg_.embed_dim));
  logits_at_.assign(static_cast<std::size_t>(cfg_.block_size), {});
  reset();
}

void Decoder::reset() {
  history_.clear();
  window_start_ = 0;
  cached_ = 0;
  logits_.assign(static_cast<std::size_t>(cfg_.vocab_size), 0.0f);
}

void Decoder::step(TokenId id, int pos) {
  const int c = cfg_.embed_dim, nh = cfg_.n_heads, hs = cfg_.head_dim();
  const float scale = 1.0f / std::sqrt(static_cast<float>(hs));
  const auto wte = tensor_map(p_, 0);
  x_ = (wte.row(id) + tensor_map(p_, 1).row(pos)).transpose();
  for (int l = 0; l < cfg_.n_layers; ++l) {
    const std::size_t base = layer_base(l);
    Mat<float>& K = k_[static_cast<std::size_t>(l)];
    Mat<float>& V = v_[static_cast<std::size_t>(l)];
    layernorm_vec(x_, p_.values.data() + p_.layout[base + kLn1].offset, a_);
    qkv_.noalias() = tensor_map(p_, base + kQkv) * a_;
    K.row(pos) = qkv_.segment(c, c).transpose();
    V.row(pos) = qkv_.segment(2 * c, c).transpose();
    y_.resize(c);
    for (int h = 0; h < nh; ++h) {
      scores_.noalias() = K.block(0, h * hs, pos + 1, hs) * qkv_.segment(h * hs, hs);
      scores_ *= scale;
      const float m = scores_.maxCoeff();
      scores_ = (scores_.array() - m).exp().matrix();
      scores_ /= scores_.sum();
      y_.segment(h * hs, hs).noalias() = V.block(0, h * hs, pos + 1, hs).transpose() * scores_;
    }
    x_.noalias() += tensor_map(p_, base + kProj) * y_;
    layernorm_vec(x_, p_.values.data() + p_.layout[base + kLn2].offset, a_);
    h_.noalias() = tensor_map(p_, base + kFc) * a_;
    h_ = (0.5f * h_.array() *
          (1.0f + (static_cast<float>(kGeluC) *
                   (h_.array() + static_cast<float>(kGeluK) * h_.array().cube()))
                      .tanh()))
             .matrix();
    x_.noalias() += tensor_map(p_, base + kMlpProj) * h_;
  }
  layernorm_vec(x_, p_.values.data() + p_.layout.back().offset, a_);
  Eigen::Map<Eigen::VectorXf> out(logits_.data(), cfg_.vocab_size);
  out.noalias() = wte * a_;
  logits_at_[static_cast<std::size_t>(pos)] = logits_;
}

void Decoder::rebuild() {
  const std::size_t block = static_cast<std::size_t>(cfg_.block_size);
  window_start_ = history_.size() > block ? history_.size() - block : 0;
  cached_ = 0;
  for (std::size_t i = window_start_; i < history_.size(); ++i) {
    step(history_[i], cached_);
    ++cached_;
  }
}

const AlignedVector<float>& Decoder::feed(TokenId id) {
  if (id < 0 || id >= cfg_.vocab_size) {
    throw OffsetError(ErrorKind::UnknownCharacter, history_.size(), "token id out of vocabulary");
  }
  history_.push_back(id);
  if (cached_ == cfg_.block_size) {
    rebuild();
  } else {
    step(id, cached_);
    ++cached_;
  }
  return logits_;
}

const AlignedVector<float>& Decoder::feed(std::span<const TokenId> ids) {
  for (TokenId id : ids) feed(id);
  return logits_;
}

void Decoder::rewind(std::size_t n) {
  if (n == 0 || n > history_.size()) {
    throw Error(ErrorKind::OutOfRange, "rewind target outside history");
  }
  history_.resize(n);
  if (window_start_ == 0 && n <= static_cast<std::size_t>(cached_)) {
    cached_ = static_cast<int>(n);
    logits_ = logits_at_[n - 1];
  } else {
    rebuild();
  }
}

TokenId choose_token(std::span<const float> logits, DecodeMode mode, double temperature,
                     Rng& rng) {
  if (logits.empty()) throw Error(ErrorKind::InvalidConfig, "empty logits");
  if (mode == DecodeMode::Greedy || temperature <= 0.0) {
    return static_cast<TokenId>(std::max_element(logits.begin(), logits.end()) - logits.begin());
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> w(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    w[i] = std::exp((static_cast<double>(logits[i]) - m) / temperature);
  }
  return static_cast<TokenId>(rng.weighted(w));
}

std::vector<TokenId> generate(Decoder& decoder, const GenerateOptions& opts) {
  if (decoder.size() == 0) throw Error(ErrorKind::InvalidConfig, "generation needs a prompt");
  Rng rng(opts.seed);
  std::vector<TokenId> out;
  for (int i = 0; i < opts.max_new; ++i) {
    const TokenId tok = choose_token(decoder.last_logits(), opts.mode, opts.temperature, rng);
    out.push_back(tok);
    if (tok == kNewlineId) {
      if (opts.stop_at_newline) break;
      if (opts.stop_at_blank_line && decoder.history().back() == kNewlineId) break;
    }
    if (i + 1 < opts.max_new) decoder.feed(tok);
  }
  return out;
}

std::vector<TokenId> generate(const ModelParams<float>& params, std::span<const TokenId> prompt,
                              const GenerateOptions& opts) {
  Decoder d(params);
  d.feed(prompt);
  return generate(d, opts);
}

}  // namespace tpc
