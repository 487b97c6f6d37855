// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/alphabet.hpp"

#include <zlib.h>

#include <array>

#include "tpc/error.hpp"

namespace tpc {

namespace {

constexpr std::array<TokenId, 256> make_table() {
  std::array<TokenId, 256> table{};
  for (auto& t : table) t = -1;
  for (std::size_t i = 0; i < kAlphabet.size(); ++i) {
    table[static_cast<unsigned char>(kAlphabet[i])] = static_cast<TokenId>(i);
  }
  return table;
}

constexpr auto kTable = make_table();

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "syntax-error";
    case ErrorKind::IndentationError: return "indentation-error";
    case ErrorKind::ModuloByZero: return "modulo-by-zero";
    case ErrorKind::StepBudgetExceeded: return "step-budget-exceeded";
    case ErrorKind::UnboundVariable: return "unbound-variable";
    case ErrorKind::IntegerOverflow: return "integer-overflow";
    case ErrorKind::ResampleBudgetExhausted: return "resample-budget-exhausted";
    case ErrorKind::InvalidProfile: return "invalid-profile";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::LevelStarvation: return "level-starvation";
    case ErrorKind::MalformedFile: return "malformed-file";
    case ErrorKind::UnknownCharacter: return "unknown-character";
    case ErrorKind::WindowTooLong: return "window-too-long";
    case ErrorKind::NonFiniteGradient: return "non-finite-gradient";
    case ErrorKind::VersionMismatch: return "version-mismatch";
    case ErrorKind::CorruptFile: return "corrupt-file";
    case ErrorKind::UnknownKind: return "unknown-kind";
    case ErrorKind::EmptyComposition: return "empty-composition";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::Io: return "io-error";
  }
  return "error";
}

bool in_alphabet(char c) noexcept { return kTable[static_cast<unsigned char>(c)] >= 0; }

TokenId token_of(char c) {
  const TokenId id = kTable[static_cast<unsigned char>(c)];
  if (id < 0) throw OffsetError(ErrorKind::UnknownCharacter, 0, "character not in alphabet");
  return id;
}

char char_of(TokenId id) {
  if (id < 0 || id >= kVocabSize) {
    throw Error(ErrorKind::OutOfRange, "token id " + std::to_string(id));
  }
  return kAlphabet[static_cast<std::size_t>(id)];
}

std::vector<TokenId> tokenize(std::string_view text) {
  std::vector<TokenId> ids;
  ids.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const TokenId id = kTable[static_cast<unsigned char>(text[i])];
    if (id < 0) {
      throw OffsetError(ErrorKind::UnknownCharacter, i,
                        "character code " + std::to_string(static_cast<unsigned char>(text[i])) +
                            " not in alphabet");
    }
    ids.push_back(id);
  }
  return ids;
}

std::string detokenize(std::span<const TokenId> ids) {
  std::string text;
  text.reserve(ids.size());
  for (const TokenId id : ids) text.push_back(char_of(id));
  return text;
}

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

std::uint32_t alphabet_checksum() { return crc32_of(kAlphabet); }

}  // namespace tpc
