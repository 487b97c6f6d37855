// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tpc {

using TokenId = std::int32_t;

// The fixed character vocabulary. Token ids are positions in this string.
inline constexpr std::string_view kAlphabet = "\n #%()*+,-0123456789:<=>abcdefghilnoprstu";
inline constexpr int kVocabSize = static_cast<int>(kAlphabet.size());
static_assert(kVocabSize == 41);

inline constexpr TokenId kNewlineId = 0;

bool in_alphabet(char c) noexcept;

/// Throws OffsetError(UnknownCharacter) with the position of the first bad char.
std::vector<TokenId> tokenize(std::string_view text);
std::string detokenize(std::span<const TokenId> ids);

TokenId token_of(char c);
char char_of(TokenId id);

/// CRC-32 of the alphabet string; recorded in manifests and checkpoints.
std::uint32_t alphabet_checksum();

std::uint32_t crc32_of(std::string_view bytes);

}  // namespace tpc
