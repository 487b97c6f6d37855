// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "tpc/corpus.hpp"
#include "tpc/error.hpp"

namespace tpc {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

namespace {

constexpr char kMagic[4] = {'T', 'P', 'C', 'L'};

class Writer {
 public:
  template <typename T>
  void put(T v) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out_.append(b, sizeof(T));
  }
  void put_string(std::string_view s) {
    put(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void put_floats(const AlignedVector<float>& v) {
    out_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(float));
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view b) : b_(b) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s(b_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  AlignedVector<float> get_floats(std::size_t n) {
    if (n > (b_.size() - pos_) / sizeof(float)) fail("truncated tensor data");
    AlignedVector<float> v(n);
    std::memcpy(v.data(), b_.data() + pos_, n * sizeof(float));
    pos_ += n * sizeof(float);
    return v;
  }
  std::size_t pos() const { return pos_; }
  [[noreturn]] void fail(const std::string& what) const {
    throw OffsetError(ErrorKind::CorruptFile, pos_, what);
  }

 private:
  void need(std::size_t n) const {
    if (n > b_.size() - pos_) fail("truncated checkpoint");
  }
  std::string_view b_;
  std::size_t pos_ = 0;
};

}  // namespace

const std::string* Checkpoint::find_meta(std::string_view key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string serialize_checkpoint(const Checkpoint& ck) {
  const TrainState& s = ck.state;
  const ModelConfig& c = s.params.config;
  Writer w;
  w.raw(std::string_view(kMagic, 4));
  w.put(kCheckpointVersion);
  for (int v : {c.n_layers, c.n_heads, c.embed_dim, c.block_size, c.vocab_size}) {
    w.put(static_cast<std::uint32_t>(v));
  }
  w.put(alphabet_checksum());
  w.put(static_cast<std::uint32_t>(ck.meta.size()));
  for (const auto& [k, v] : ck.meta) {
    w.put_string(k);
    w.put_string(v);
  }
  w.put(static_cast<std::uint64_t>(s.params.values.size()));
  w.put_floats(s.params.values);
  w.put(static_cast<std::uint64_t>(s.opt.step));
  w.put(s.opt.hp.beta1);
  w.put(s.opt.hp.beta2);
  w.put(s.opt.hp.eps);
  w.put(s.opt.hp.weight_decay);
  if (s.opt.m.size() != s.params.values.size() || s.opt.v.size() != s.params.values.size()) {
    throw Error(ErrorKind::InvalidConfig, "optimizer moments do not match parameters");
  }
  w.put_floats(s.opt.m);
  w.put_floats(s.opt.v);
  w.put_string(s.rng.state());
  w.put(static_cast<std::int64_t>(s.iter));
  w.put(static_cast<std::int32_t>(s.stage));
  w.put(crc32_of(w.bytes()));
  return std::move(w.bytes());
}

Checkpoint parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != std::string_view(kMagic, 4)) {
    throw OffsetError(ErrorKind::CorruptFile, 0, "not a checkpoint file");
  }
  Reader head(bytes.substr(4));
  const auto version = head.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::VersionMismatch,
                "checkpoint version " + std::to_string(version) + ", expected " +
                    std::to_string(kCheckpointVersion));
  }
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
  if (crc32_of(bytes.substr(0, bytes.size() - 4)) != stored) {
    throw OffsetError(ErrorKind::CorruptFile, bytes.size() - 4, "checksum mismatch");
  }

  Reader r(bytes.substr(0, bytes.size() - 4));
  r.get<std::uint32_t>();  // magic
  r.get<std::uint32_t>();  // version
  ModelConfig cfg;
  cfg.n_layers = static_cast<int>(r.get<std::uint32_t>());
  cfg.n_heads = static_cast<int>(r.get<std::uint32_t>());
  cfg.embed_dim = static_cast<int>(r.get<std::uint32_t>());
  cfg.block_size = static_cast<int>(r.get<std::uint32_t>());
  cfg.vocab_size = static_cast<int>(r.get<std::uint32_t>());
  if (r.get<std::uint32_t>() != alphabet_checksum() || cfg.vocab_size != kVocabSize) {
    throw Error(ErrorKind::VersionMismatch, "checkpoint was written for a different alphabet");
  }
  Checkpoint ck;
  const auto n_meta = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.get_string();
    std::string v = r.get_string();
    ck.meta.emplace_back(std::move(k), std::move(v));
  }
  try {
    ck.state.params = zero_params<float>(cfg);
  } catch (const Error& e) {
    r.fail(std::string("bad model config: ") + e.what());
  }
  const auto n = r.get<std::uint64_t>();
  if (n != ck.state.params.values.size()) r.fail("parameter count does not match config");
  ck.state.params.values = r.get_floats(n);
  ck.state.opt.step = static_cast<std::int64_t>(r.get<std::uint64_t>());
  ck.state.opt.hp.beta1 = r.get<double>();
  ck.state.opt.hp.beta2 = r.get<double>();
  ck.state.opt.hp.eps = r.get<double>();
  ck.state.opt.hp.weight_decay = r.get<double>();
  ck.state.opt.m = r.get_floats(n);
  ck.state.opt.v = r.get_floats(n);
  ck.state.rng.set_state(r.get_string());
  ck.state.iter = r.get<std::int64_t>();
  ck.state.stage = r.get<std::int32_t>();
  if (r.pos() != bytes.size() - 4) r.fail("trailing bytes before checksum");
  return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  write_file(path, serialize_checkpoint(ck));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

}  // namespace tpc
