// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tpc {

enum class ErrorKind {
  SyntaxError,
  IndentationError,
  ModuloByZero,
  StepBudgetExceeded,
  UnboundVariable,
  IntegerOverflow,
  ResampleBudgetExhausted,
  InvalidProfile,
  OutOfRange,
  LevelStarvation,
  MalformedFile,
  UnknownCharacter,
  WindowTooLong,
  NonFiniteGradient,
  VersionMismatch,
  CorruptFile,
  UnknownKind,
  EmptyComposition,
  InvalidConfig,
  Io,
};

const char* to_string(ErrorKind kind);

/// Base exception for everything the library throws. The kind is the stable,
/// testable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure with a 1-based source position.
class SourceError : public Error {
 public:
  SourceError(ErrorKind kind, int line, int column, const std::string& message)
      : Error(kind, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                        message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Failure tied to a byte offset in a file or a position in a character stream.
class OffsetError : public Error {
 public:
  OffsetError(ErrorKind kind, std::size_t offset, const std::string& message)
      : Error(kind, "at offset " + std::to_string(offset) + ": " + message), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace tpc
