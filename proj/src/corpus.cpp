// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tpc/alphabet.hpp"
#include "tpc/error.hpp"
#include "tpc/random.hpp"

namespace tpc {

namespace {

constexpr std::uint64_t kDrawTag = 0xd4a7;
constexpr std::uint64_t kPartitionTag = 0x5917;
constexpr std::uint64_t kMergeTag = 0xa11;

constexpr std::array<DifficultyLevel, 3> kLevels = {DifficultyLevel::Easy, DifficultyLevel::Medium,
                                                    DifficultyLevel::Hard};
constexpr std::array<Split, 3> kSplits = {Split::Train, Split::Val, Split::Test};

}  // namespace

const char* to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

const std::vector<AnnotatedSnippet>& SplitSet::get(Split s) const {
  switch (s) {
    case Split::Train: return train;
    case Split::Val: return val;
    case Split::Test: break;
  }
  return test;
}

std::vector<AnnotatedSnippet>& SplitSet::get(Split s) {
  return const_cast<std::vector<AnnotatedSnippet>&>(std::as_const(*this).get(s));
}

SplitCounts split_counts(std::int64_t n, const SplitFractions& f) {
  SplitCounts c;
  c.train = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * f.train + 1e-9));
  c.val = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * f.val + 1e-9));
  c.test = n - c.train - c.val;
  return c;
}

LeveledDataset build_leveled(std::int64_t per_level_count, const SplitFractions& fractions,
                             std::uint64_t seed, const GrammarProfile& profile) {
  if (per_level_count < 10) throw Error(ErrorKind::OutOfRange, "per_level_count must be >= 10");
  if (fractions.train < 0 || fractions.val < 0 || fractions.test < 0 ||
      std::abs(fractions.train + fractions.val + fractions.test - 1.0) > 1e-9) {
    throw Error(ErrorKind::OutOfRange, "split fractions must be non-negative and sum to 1");
  }
  profile.validate();

  LeveledDataset ds;
  ds.per_level_count = per_level_count;
  ds.fractions = fractions;
  ds.seed = seed;
  ds.profile = profile_name(profile);

  std::array<std::vector<AnnotatedSnippet>, 3> pools;
  std::array<std::int64_t, 3> hits{};
  std::int64_t draws = 0;
  const auto full = [&](std::size_t l) {
    return static_cast<std::int64_t>(pools[l].size()) >= per_level_count;
  };
  while (!(full(0) && full(1) && full(2))) {
    Rng rng(derive_seed(seed, kDrawTag, static_cast<std::uint64_t>(draws)));
    AnnotatedSnippet s = annotate(generate_snippet(profile, rng));
    ++draws;
    const auto l = static_cast<std::size_t>(s.level);
    ++hits[l];
    if (!full(l)) pools[l].push_back(std::move(s));
    if (draws % kStarvationWindow == 0) {
      for (std::size_t k = 0; k < 3; ++k) {
        const double rate = static_cast<double>(hits[k]) / static_cast<double>(draws);
        if (!full(k) && rate < kMinAcceptanceRate) {
          throw Error(ErrorKind::LevelStarvation,
                      std::string(to_string(kLevels[k])) + " acceptance rate " + std::to_string(rate) +
                          " after " + std::to_string(draws) + " draws; widen the generator profile");
        }
      }
    }
  }
  ds.draws = draws;

  const SplitCounts counts = split_counts(per_level_count, fractions);
  for (std::size_t l = 0; l < 3; ++l) {
    std::vector<AnnotatedSnippet>& pool = pools[l];
    Rng rng(derive_seed(seed, kPartitionTag, l));
    rng.shuffle(pool);
    SplitSet& dst = ds.levels[l];
    auto it = std::make_move_iterator(pool.begin());
    dst.train.assign(it, it + counts.train);
    dst.val.assign(it + counts.train, it + counts.train + counts.val);
    dst.test.assign(it + counts.train + counts.val, std::make_move_iterator(pool.end()));
  }

  for (std::size_t k = 0; k < kSplits.size(); ++k) {
    std::vector<AnnotatedSnippet>& merged = ds.all.get(kSplits[k]);
    for (const SplitSet& lv : ds.levels) {
      const auto& part = lv.get(kSplits[k]);
      merged.insert(merged.end(), part.begin(), part.end());
    }
    Rng rng(derive_seed(seed, kMergeTag, k));
    rng.shuffle(merged);
  }
  return ds;
}

std::vector<AnnotatedSnippet> top_fraction_hardest(std::span<const AnnotatedSnippet> snippets,
                                                   double fraction) {
  if (snippets.empty()) throw Error(ErrorKind::OutOfRange, "no snippets to rank");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::OutOfRange, "fraction must lie in (0, 1]");
  }
  const std::size_t n = snippets.size();
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const DifficultyScore& x = snippets[a].score;
    const DifficultyScore& y = snippets[b].score;
    if (x.om != y.om) return x.om > y.om;
    return x.cc > y.cc;
  });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  std::vector<AnnotatedSnippet> out;
  out.reserve(keep);
  for (std::size_t i : order) out.push_back(snippets[i]);
  return out;
}

std::string render_stream(std::span<const AnnotatedSnippet> snippets) {
  std::string out;
  for (const AnnotatedSnippet& s : snippets) out += s.render();
  return out;
}

std::vector<AnnotatedSnippet> parse_stream(std::string_view text) {
  std::vector<AnnotatedSnippet> out;
  std::size_t at = 0;
  while (at < text.size()) {
    const std::size_t blank = text.find("\n\n", at);
    if (blank == std::string_view::npos) {
      throw OffsetError(ErrorKind::MalformedFile, text.size(), "snippet missing blank terminator line");
    }
    const std::size_t end = blank + 2;
    try {
      out.push_back(from_annotated_text(text.substr(at, end - at)));
    } catch (const OffsetError& e) {
      throw OffsetError(ErrorKind::MalformedFile, at + e.offset(), e.what());
    }
    at = end;
  }
  return out;
}

std::vector<HistogramBin> om_histogram(std::span<const AnnotatedSnippet> snippets, double width) {
  if (!(width > 0)) throw Error(ErrorKind::InvalidConfig, "histogram width must be positive");
  std::vector<HistogramBin> out;
  if (snippets.empty()) return out;
  auto bin = [&](double om) { return static_cast<std::int64_t>(std::floor(om / width + 1e-9)); };
  std::int64_t lo = bin(snippets.front().score.om), hi = lo;
  for (const auto& s : snippets) {
    lo = std::min(lo, bin(s.score.om));
    hi = std::max(hi, bin(s.score.om));
  }
  for (std::int64_t b = lo; b <= hi; ++b) out.push_back({static_cast<double>(b) * width, 0});
  for (const auto& s : snippets) ++out[static_cast<std::size_t>(bin(s.score.om) - lo)].count;
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

namespace {

std::filesystem::path split_path(const std::filesystem::path& root, std::string_view group, Split s) {
  return root / std::string(group) / (std::string(to_string(s)) + ".txt");
}

}  // namespace

void write_dataset(const LeveledDataset& ds, const std::filesystem::path& root) {
  nlohmann::ordered_json counts;
  for (std::size_t l = 0; l < 3; ++l) {
    const char* name = to_string(kLevels[l]);
    for (Split s : kSplits) {
      const auto& part = ds.levels[l].get(s);
      write_file(split_path(root, name, s), render_stream(part));
      counts[name][to_string(s)] = part.size();
    }
  }
  for (Split s : kSplits) {
    write_file(split_path(root, "all", s), render_stream(ds.all.get(s)));
    counts["all"][to_string(s)] = ds.all.get(s).size();
  }

  nlohmann::ordered_json m;
  m["format"] = "tinypy-leveled-dataset";
  m["version"] = 1;
  m["seed"] = ds.seed;
  m["per_level_count"] = ds.per_level_count;
  m["fractions"] = {{"train", ds.fractions.train}, {"val", ds.fractions.val}, {"test", ds.fractions.test}};
  m["profile"] = ds.profile;
  m["thresholds"] = {{"easy_below", kEasyUpperBound}, {"hard_from", kHardLowerBound}};
  m["alphabet_crc32"] = alphabet_checksum();
  m["alphabet_size"] = kVocabSize;
  m["deduplicated"] = false;
  m["draws"] = ds.draws;
  m["counts"] = counts;
  write_file(root / "manifest.json", m.dump(2) + "\n");
}

LeveledDataset read_dataset(const std::filesystem::path& root) {
  LeveledDataset ds;
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(root / "manifest.json"));
    ds.seed = m.at("seed").get<std::uint64_t>();
    ds.per_level_count = m.at("per_level_count").get<std::int64_t>();
    ds.fractions.train = m.at("fractions").at("train").get<double>();
    ds.fractions.val = m.at("fractions").at("val").get<double>();
    ds.fractions.test = m.at("fractions").at("test").get<double>();
    ds.profile = m.at("profile").get<std::string>();
    ds.draws = m.at("draws").get<std::int64_t>();
    if (m.at("alphabet_crc32").get<std::uint32_t>() != alphabet_checksum()) {
      throw Error(ErrorKind::VersionMismatch, "dataset was written with a different alphabet");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedFile, "manifest.json: " + std::string(e.what()));
  }

  const auto load = [&](std::string_view group, Split s) {
    const std::filesystem::path p = split_path(root, group, s);
    try {
      return parse_stream(read_file(p));
    } catch (const OffsetError& e) {
      throw OffsetError(ErrorKind::MalformedFile, e.offset(), p.string() + ": " + e.what());
    }
  };
  for (std::size_t l = 0; l < 3; ++l) {
    const char* name = to_string(kLevels[l]);
    for (Split s : kSplits) {
      ds.levels[l].get(s) = load(name, s);
      for (const AnnotatedSnippet& snip : ds.levels[l].get(s)) {
        if (snip.level != kLevels[l]) {
          throw Error(ErrorKind::MalformedFile, std::string("snippet in ") + name + "/" +
                                                    to_string(s) + " has level " + to_string(snip.level));
        }
      }
      if (m.at("counts").at(name).at(to_string(s)).get<std::size_t>() != ds.levels[l].get(s).size()) {
        throw Error(ErrorKind::MalformedFile, std::string("count mismatch for ") + name);
      }
    }
  }
  for (Split s : kSplits) ds.all.get(s) = load("all", s);
  return ds;
}

}  // namespace tpc
