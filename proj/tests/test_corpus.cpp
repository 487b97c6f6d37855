// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Generator profiles and the leveled dataset.

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "tpc/alphabet.hpp"
#include "tpc/corpus.hpp"
#include "tpc/error.hpp"
#include "tpc/grammar.hpp"
#include "tpc/interp.hpp"
#include "tpc/parser.hpp"

using namespace tpc;

namespace {

std::vector<std::string> sorted_texts(std::span<const AnnotatedSnippet> s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.render());
  std::sort(out.begin(), out.end());
  return out;
}

AnnotatedSnippet with_om(std::string src, double om) {
  AnnotatedSnippet s;
  s.source = std::move(src);
  s.score.om = om;
  return s;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("tpc_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Grammar, ConceptProfiles) {
  EXPECT_EQ(concept_profile(1).allowed_constructs,
            (std::set<Construct>{Construct::Assignment, Construct::Print}));
  EXPECT_EQ(concept_profile(1).max_nesting, 0);
  EXPECT_EQ(concept_profile(4).allowed_constructs,
            (std::set<Construct>{Construct::Assignment, Construct::ArithExpr, Construct::IfChain,
                                 Construct::Print}));
  EXPECT_THROW(concept_profile(7), Error);
  EXPECT_THROW(concept_profile(0), Error);
  for (int l = 1; l <= 6; ++l) EXPECT_NO_THROW(concept_profile(l).validate());
  EXPECT_EQ(profile_name(profile_by_name("level3")), "level3");
  EXPECT_EQ(profile_name(profile_by_name("standard")), "standard");
}

TEST(Grammar, InvalidProfile) {
  GrammarProfile p = GrammarProfile::standard();
  p.literal_max = 12;
  EXPECT_THROW(p.validate(), Error);
  p = GrammarProfile::standard();
  p.identifier_pool = "aXb";
  EXPECT_THROW(p.validate(), Error);
  p = concept_profile(2);
  p.allowed_constructs.insert(Construct::ForLoop);
  EXPECT_THROW(p.validate(), Error);
}

TEST(Grammar, LevelShapes) {
  for (const auto& s : generate_corpus(concept_profile(1), 200, 4)) {
    EXPECT_EQ(s.source.find("if"), std::string::npos);
    EXPECT_EQ(s.source.find("for"), std::string::npos);
    // simple arithmetic: at most one operator per line
    std::size_t line_start = 0;
    while (line_start < s.source.size()) {
      const std::size_t end = s.source.find('\n', line_start);
      const std::string line = s.source.substr(line_start, end - line_start);
      EXPECT_LE(std::count_if(line.begin(), line.end(),
                              [](char c) { return c == '+' || c == '-' || c == '*' || c == '%'; }),
                1)
          << line;
      line_start = end + 1;
    }
  }
  for (const auto& s : generate_corpus(concept_profile(3), 200, 4)) {
    std::size_t ifs = 0, pos = 0;
    while ((pos = s.source.find("if ", pos)) != std::string::npos) {
      if (pos == 0 || s.source[pos - 1] == '\n') ++ifs;
      ++pos;
    }
    EXPECT_EQ(ifs, 1u) << s.source;
    EXPECT_EQ(s.source.find("for"), std::string::npos);
  }
}

TEST(Grammar, Level5AlwaysRuns) {
  const auto corpus = generate_corpus(concept_profile(5), 10000, 17);
  ASSERT_EQ(corpus.size(), 10000u);
  for (const auto& s : corpus) ASSERT_EQ(execute(parse(s.source)).lines, s.output_lines);
}

TEST(Grammar, Deterministic) {
  const auto a = generate_corpus(concept_profile(1), 100, 7);
  const auto b = generate_corpus(concept_profile(1), 100, 7);
  EXPECT_EQ(render_stream(a), render_stream(b));
  EXPECT_NE(render_stream(a), render_stream(generate_corpus(concept_profile(1), 100, 8)));
}

TEST(Grammar, StandardPositiveOmAndAlphabet) {
  for (const auto& s : generate_corpus(GrammarProfile::standard(), 10000, 21)) {
    ASSERT_GT(s.score.om, 0.0);
    for (char c : s.render()) ASSERT_TRUE(in_alphabet(c)) << s.source;
    for (const auto& v : s.output_lines) ASSERT_LE(std::llabs(std::stoll(v)), kMaxAbsOutput);
  }
}

TEST(Grammar, ConceptLevelOmOrdering) {
  double om[7] = {};
  for (int l = 1; l <= 6; ++l) {
    const auto c = generate_corpus(concept_profile(l), 1000, 1);
    for (const auto& s : c) om[l] += s.score.om / static_cast<double>(c.size());
  }
  EXPECT_GT(om[4], om[3]);
  EXPECT_GT(om[3], om[6]);
  EXPECT_GT(om[6], om[1]);
}

TEST(Corpus, SplitCounts) {
  const SplitCounts a = split_counts(400000, {});
  EXPECT_EQ(a.train, 340000);
  EXPECT_EQ(a.val, 52000);
  EXPECT_EQ(a.test, 8000);
  const SplitCounts b = split_counts(1000, {});
  EXPECT_EQ(b.train, 850);
  EXPECT_EQ(b.val, 130);
  EXPECT_EQ(b.test, 20);
}

TEST(Corpus, BuildSmall) {
  const LeveledDataset ds = build_leveled(100, {}, 5);
  for (int l = 0; l < 3; ++l) {
    const auto level = static_cast<DifficultyLevel>(l);
    const SplitSet& s = ds.level(level);
    EXPECT_EQ(s.train.size(), 85u);
    EXPECT_EQ(s.val.size(), 13u);
    EXPECT_EQ(s.test.size(), 2u);
    for (Split sp : {Split::Train, Split::Val, Split::Test}) {
      for (const auto& x : s.get(sp)) EXPECT_EQ(x.level, level);
    }
  }
  for (Split sp : {Split::Train, Split::Val, Split::Test}) {
    std::vector<AnnotatedSnippet> u;
    for (const auto& lv : ds.levels) u.insert(u.end(), lv.get(sp).begin(), lv.get(sp).end());
    EXPECT_EQ(sorted_texts(u), sorted_texts(ds.all.get(sp)));
  }
  EXPECT_GE(ds.draws, 300);
  EXPECT_THROW(build_leveled(5, {}, 1), Error);
  EXPECT_THROW(build_leveled(100, {0.5, 0.5, 0.5}, 1), Error);
}

TEST(Corpus, TopFraction) {
  const std::vector<AnnotatedSnippet> v = {with_om("a = 1\n", 1.0), with_om("a = 2\n", 1.5),
                                           with_om("a = 3\n", 1.8), with_om("a = 4\n", 1.2)};
  const auto half = top_fraction_hardest(v, 0.5);
  ASSERT_EQ(half.size(), 2u);
  EXPECT_EQ(half[0].source, "a = 2\n");
  EXPECT_EQ(half[1].source, "a = 3\n");
  EXPECT_EQ(top_fraction_hardest(v, 1.0), v);

  const std::vector<AnnotatedSnippet> flat = {with_om("a = 1\n", 1.0), with_om("a = 2\n", 1.0),
                                              with_om("a = 3\n", 1.0), with_om("a = 4\n", 1.0)};
  const auto first = top_fraction_hardest(flat, 0.5);
  ASSERT_EQ(first.size(), 2u);
  EXPECT_EQ(first[0].source, "a = 1\n");
  EXPECT_EQ(first[1].source, "a = 2\n");
  EXPECT_THROW(top_fraction_hardest(v, 0.0), Error);
}

TEST(Corpus, DiskRoundTrip) {
  const LeveledDataset ds = build_leveled(334, {}, 9);  // about 1,000 snippets
  const auto dir = scratch("roundtrip");
  write_dataset(ds, dir);
  const LeveledDataset back = read_dataset(dir);
  const auto dir2 = scratch("roundtrip2");
  write_dataset(back, dir2);
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(e.path(), dir);
    EXPECT_EQ(read_file(e.path()), read_file(dir2 / rel)) << rel;
  }
  EXPECT_EQ(back.per_level_count, 334);
  EXPECT_EQ(back.seed, 9u);
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST(Corpus, MalformedStream) {
  EXPECT_THROW(parse_stream("a = 5\nprint(a)\n# output\n# 5\n"), Error);
  try {
    parse_stream("a = 5\n# output\n\nb = 1\n# output\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedFile);
  }
}

TEST(Corpus, Histogram) {
  const std::vector<AnnotatedSnippet> v = {with_om("", 0.75), with_om("", 1.0), with_om("", 1.1),
                                           with_om("", 1.75)};
  const auto h = om_histogram(v);
  ASSERT_EQ(h.size(), 5u);  // 0.75, 1.0, 1.25 (empty), 1.5 (empty), 1.75
  EXPECT_DOUBLE_EQ(h[0].lo, 0.75);
  EXPECT_EQ(h[0].count, 1);
  EXPECT_EQ(h[1].count, 2);
  EXPECT_EQ(h[2].count, 0);
  EXPECT_EQ(h[4].count, 1);
}
