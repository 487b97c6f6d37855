// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpc/train.hpp"

namespace tpc {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout, all little-endian:
///   "TPCL" | u32 version | u32 x5 config (layers, heads, d, block, vocab)
///   | u32 alphabet crc | u32 n_meta, n x (u32 len, key, u32 len, value)
///   | u64 n_params | f32 params (layout order)
///   | u64 opt step | f64 beta1, beta2, eps, weight_decay | f32 m | f32 v
///   | u32 len, rng state text | i64 iter | i32 stage | u32 crc32 of all prior bytes
struct Checkpoint {
  TrainState state;
  std::vector<std::pair<std::string, std::string>> meta;

  const std::string* find_meta(std::string_view key) const;
};

std::string serialize_checkpoint(const Checkpoint& ck);

/// Throws Error(CorruptFile) on bad magic, truncation or checksum failure and
/// Error(VersionMismatch) on an unknown version or alphabet.
Checkpoint parse_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tpc
