// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Alphabet, parser, interpreter and annotated-format tests.

#include <gtest/gtest.h>

#include "tpc/alphabet.hpp"
#include "tpc/error.hpp"
#include "tpc/grammar.hpp"
#include "tpc/interp.hpp"
#include "tpc/parser.hpp"
#include "tpc/snippet.hpp"

using namespace tpc;

namespace {

template <typename Fn>
ErrorKind kind_of(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

std::vector<std::string> run(std::string_view src) { return execute(parse(src)).lines; }

}  // namespace

TEST(Alphabet, SizeAndOrder) {
  EXPECT_EQ(kVocabSize, 41);
  EXPECT_EQ(token_of('\n'), 0);
  for (int i = 0; i < kVocabSize; ++i) EXPECT_EQ(token_of(char_of(i)), i);
  // every character of the output marker is representable
  for (char c : kOutputMarker) EXPECT_TRUE(in_alphabet(c)) << c;
}

TEST(Alphabet, RoundTrip) {
  const std::string s = "a=1\n";
  const auto ids = tokenize(s);
  EXPECT_EQ(ids.size(), 4u);
  EXPECT_EQ(detokenize(ids), s);
  const auto corpus = generate_corpus(GrammarProfile::standard(), 50, 3);
  for (const auto& sn : corpus) EXPECT_EQ(detokenize(tokenize(sn.render())), sn.render());
}

TEST(Alphabet, UnknownCharacterHasPosition) {
  try {
    tokenize("ab A");
    FAIL();
  } catch (const OffsetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownCharacter);
    EXPECT_EQ(e.offset(), 3u);
  }
}

TEST(Alphabet, Checksum) {
  EXPECT_EQ(alphabet_checksum(), crc32_of(kAlphabet));
  EXPECT_EQ(crc32_of("123456789"), 0xCBF43926u);  // standard CRC-32 check value
}

TEST(Parser, SmallestProgram) {
  const Program p = parse("a = 1\nprint(a)\n");
  Program want;
  want.body.push_back(make_stmt(Assign{"a", Expr::lit(1)}));
  want.body.push_back(make_stmt(Print{Expr::var("a")}));
  EXPECT_EQ(p, want);
}

TEST(Parser, UnboundNameStillParses) {
  EXPECT_NO_THROW(parse("if a > 1 :\n    print(a)\n"));
}

TEST(Parser, UnclosedParen) {
  try {
    parse("a = (1 +\n");
    FAIL();
  } catch (const SourceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SyntaxError);
    EXPECT_EQ(e.line(), 1);
  }
}

TEST(Parser, Errors) {
  EXPECT_EQ(kind_of([] { parse("a = 1\n  b = 2\n"); }), ErrorKind::IndentationError);
  EXPECT_EQ(kind_of([] { parse("if a > 1 :\nprint(a)\n"); }), ErrorKind::IndentationError);
  EXPECT_EQ(kind_of([] { parse("\tprint(1)\n"); }), ErrorKind::IndentationError);
  EXPECT_EQ(kind_of([] { parse("else :\n    print(1)\n"); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of([] { parse("a = = 1\n"); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of([] { parse("if = 1\n"); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of([] { parse("print(1\n"); }), ErrorKind::SyntaxError);
}

TEST(Parser, ColumnsAreOneBased) {
  try {
    parse("a = 1\nb = 2 $\n");
    FAIL();
  } catch (const SourceError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 7);
  }
}

TEST(Parser, UnparseCanonical) {
  const std::string src =
      "a = (1 + 2) * 3\n"
      "b = a - (a - 1)\n"
      "if a > 1 :\n"
      "    print(a)\n"
      "elif a == 2 :\n"
      "    print(b)\n"
      "else :\n"
      "    for c in range(2, 6) :\n"
      "        print(c % 4)\n";
  EXPECT_EQ(unparse(parse(src)), src);
  // redundant parentheses are dropped
  EXPECT_EQ(unparse(parse("a = (1 * 2) + (3)\n")), "a = 1 * 2 + 3\n");
}

TEST(Parser, RoundTripGenerated) {
  for (int level = 1; level <= 6; ++level) {
    for (const auto& s : generate_corpus(concept_profile(level), 200, 11)) {
      ASSERT_EQ(unparse(parse(s.source)), s.source);
    }
  }
  for (const auto& s : generate_corpus(GrammarProfile::standard(), 2000, 12)) {
    ASSERT_EQ(unparse(parse(s.source)), s.source);
  }
}

TEST(Interp, Examples) {
  EXPECT_EQ(run("a = 2 * 3 + 1\nprint(a)\n"), std::vector<std::string>{"7"});
  EXPECT_EQ(run("print(-7 % 3)\n"), std::vector<std::string>{"2"});  // CPython: 2
  EXPECT_EQ(run("for a in range(3) :\n    print(a)\n"),
            (std::vector<std::string>{"0", "1", "2"}));
}

TEST(Interp, FlooredModulo) {
  // values from CPython
  EXPECT_EQ(floor_mod(7, 3), 1);
  EXPECT_EQ(floor_mod(-7, 3), 2);
  EXPECT_EQ(floor_mod(7, -3), -2);
  EXPECT_EQ(floor_mod(-7, -3), -1);
  EXPECT_EQ(floor_mod(0, 5), 0);
  EXPECT_EQ(floor_mod(INT64_MIN, -1), 0);
}

TEST(Interp, RangeForms) {
  EXPECT_EQ(run("for a in range(2, 5) :\n    print(a)\n"),
            (std::vector<std::string>{"2", "3", "4"}));
  EXPECT_TRUE(run("for a in range(0) :\n    print(a)\n").empty());
  EXPECT_TRUE(run("for a in range(5, 2) :\n    print(a)\n").empty());
  EXPECT_TRUE(run("for a in range(0 - 3) :\n    print(a)\n").empty());
}

TEST(Interp, LoopVariableSurvives) {
  EXPECT_EQ(run("for a in range(3) :\n    b = a\nprint(a + b)\n"), std::vector<std::string>{"4"});
}

TEST(Interp, Errors) {
  EXPECT_EQ(kind_of([] { run("a = 0\nprint(1 % a)\n"); }), ErrorKind::ModuloByZero);
  EXPECT_EQ(kind_of([] { run("print(b)\n"); }), ErrorKind::UnboundVariable);
  EXPECT_EQ(kind_of([] {
              execute(parse("for a in range(9) :\n    for b in range(9) :\n        print(a)\n"),
                      20);
            }),
            ErrorKind::StepBudgetExceeded);
  std::string big = "a = 9\n";
  for (int i = 0; i < 25; ++i) big += "a = a * a\n";
  EXPECT_EQ(kind_of([&] { run(big); }), ErrorKind::IntegerOverflow);
}

TEST(Interp, StepCount) {
  // 1 assign + 1 for header + 3 body prints
  EXPECT_EQ(execute(parse("a = 3\nfor b in range(a) :\n    print(b)\n")).step_count, 5);
  EXPECT_EQ(execute(parse("a = 3\nfor b in range(a) :\n    print(b)\n")).max_trip_count, 3);
}

TEST(Annotated, Render) {
  EXPECT_EQ(render_annotated("a = 5\nprint(a)\n", {"5"}), "a = 5\nprint(a)\n# output\n# 5\n\n");
  EXPECT_EQ(render_annotated("a = 5\n", {}), "a = 5\n# output\n\n");
  EXPECT_EQ(expected_output_block({"0", "1", "2"}), "# 0\n# 1\n# 2\n\n");
}

TEST(Annotated, SplitInverse) {
  const auto t = split_annotated("a = 5\nprint(a)\n# output\n# 5\n\n");
  EXPECT_EQ(t.source, "a = 5\nprint(a)\n");
  EXPECT_EQ(t.output_lines, std::vector<std::string>{"5"});
  EXPECT_TRUE(split_annotated("a = 5\n# output\n\n").output_lines.empty());
}

TEST(Annotated, Malformed) {
  EXPECT_EQ(kind_of([] { split_annotated("a = 5\n# 5\n\n"); }), ErrorKind::MalformedFile);
  EXPECT_EQ(kind_of([] { split_annotated("a = 5\n# output\n# 5\n"); }), ErrorKind::MalformedFile);
  EXPECT_EQ(kind_of([] { split_annotated("a = 5\n# output\n# x\n\n"); }), ErrorKind::MalformedFile);
  EXPECT_EQ(kind_of([] { from_annotated_text("a = 5\nprint(a)\n# output\n# 6\n\n"); }),
            ErrorKind::MalformedFile);
}

TEST(Snippet, AnnotateScoresAndLevels) {
  const AnnotatedSnippet s = annotate("a = 1 + 2\nprint(a)\n");
  EXPECT_EQ(s.output_lines, std::vector<std::string>{"3"});
  EXPECT_EQ(s.level, classify(s.score.om));
  EXPECT_EQ(from_annotated_text(s.render()), s);
}
