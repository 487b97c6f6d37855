// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/snippet.hpp"

#include "tpc/error.hpp"
#include "tpc/interp.hpp"
#include "tpc/parser.hpp"

namespace tpc {

std::string AnnotatedSnippet::render() const { return render_annotated(source, output_lines); }

AnnotatedSnippet annotate(std::string_view source) {
  const Program program = parse(source);
  AnnotatedSnippet s;
  s.source = std::string(source);
  s.output_lines = execute(program).lines;
  s.score = score(program);
  s.level = classify(s.score.om);
  return s;
}

AnnotatedSnippet from_annotated_text(std::string_view text) {
  AnnotatedText parts = split_annotated(text);
  AnnotatedSnippet s;
  try {
    s = annotate(parts.source);
  } catch (const Error& e) {
    throw OffsetError(ErrorKind::MalformedFile, 0, std::string("code region invalid: ") + e.what());
  }
  if (s.output_lines != parts.output_lines) {
    throw OffsetError(ErrorKind::MalformedFile, parts.source.size(),
                      "recorded output disagrees with execution");
  }
  return s;
}

}  // namespace tpc
