// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tpc/complexity.hpp"

namespace tpc {

/// A program with its executed output and difficulty. `level` always equals
/// classify(score.om).
struct AnnotatedSnippet {
  std::string source;
  std::vector<std::string> output_lines;
  DifficultyScore score;
  DifficultyLevel level = DifficultyLevel::Easy;

  std::string render() const;
  /// Bytes of the code region, including its final newline.
  std::size_t code_size() const { return source.size(); }

  friend bool operator==(const AnnotatedSnippet&, const AnnotatedSnippet&) = default;
};

/// Parses, executes and scores `source`. Propagates parse and runtime errors.
AnnotatedSnippet annotate(std::string_view source);

/// Rebuilds a snippet from its rendered text, re-deriving the score. Throws
/// MalformedFile when the recorded output disagrees with execution.
AnnotatedSnippet from_annotated_text(std::string_view text);

}  // namespace tpc
