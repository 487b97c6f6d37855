// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/grammar.hpp"

#include <algorithm>
#include <cstdlib>

#include "tpc/error.hpp"
#include "tpc/interp.hpp"
#include "tpc/parser.hpp"

namespace tpc {

namespace {

const std::set<Construct>& level_constructs(int level) {
  using C = Construct;
  static const std::set<Construct> sets[6] = {
      {C::Assignment, C::Print},
      {C::Assignment, C::ArithExpr, C::Print},
      {C::Assignment, C::IfChain, C::Print},
      {C::Assignment, C::ArithExpr, C::IfChain, C::Print},
      {C::Assignment, C::ForLoop, C::Print},
      {C::Assignment, C::ArithExpr, C::ForLoop, C::Print},
  };
  return sets[level - 1];
}

// Sorted set of bound single-letter names.
using Names = std::string;

void bind(Names& names, char id) {
  if (names.find(id) == Names::npos) {
    names.push_back(id);
    std::sort(names.begin(), names.end());
  }
}

Names intersect(const Names& a, const Names& b) {
  Names out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

class Generator {
 public:
  Generator(const GrammarProfile& profile, Rng& rng) : p_(profile), rng_(rng) {}

  Program program() {
    budget_ = p_.max_statements;
    Program prog;
    Names bound;
    if (p_.concept_level) {
      structured(*p_.concept_level, prog.body, bound);
    } else {
      free_form(prog.body, bound);
    }
    return prog;
  }

 private:
  // ---- expressions -------------------------------------------------------

  char any_name() { return p_.identifier_pool[rng_.below(p_.identifier_pool.size())]; }

  Expr literal() { return Expr::lit(rng_.uniform_int(p_.literal_min, p_.literal_max)); }

  Expr atom(const Names& bound, double name_prob = 0.5) {
    if (!bound.empty() && rng_.chance(name_prob)) {
      return Expr::var(std::string(1, bound[rng_.below(bound.size())]));
    }
    return literal();
  }

  BinOpKind binop() {
    static const std::vector<double> weights = {0.3, 0.3, 0.25, 0.15};
    return static_cast<BinOpKind>(rng_.weighted(weights));
  }

  Expr tree(const Names& bound, int ops) {
    if (ops == 0) return atom(bound);
    const BinOpKind op = binop();
    const int left = rng_.uniform_int(0, ops - 1);
    Expr lhs = tree(bound, left);
    // Keep modulo divisors simple so most candidates survive execution.
    Expr rhs = op == BinOpKind::Mod ? atom(bound, 0.3) : tree(bound, ops - 1 - left);
    return Expr::binop(op, std::move(lhs), std::move(rhs));
  }

  int operator_count() {
    if (!p_.allows(Construct::ArithExpr)) return rng_.chance(0.5) ? 1 : 0;
    if (p_.concept_level) return 1 + static_cast<int>(rng_.weighted({0.35, 0.45, 0.2}));
    return static_cast<int>(rng_.weighted({0.4, 0.35, 0.17, 0.08}));
  }

  Expr expr(const Names& bound) { return tree(bound, operator_count()); }

  Compare condition(const Names& bound) {
    static const std::vector<double> weights = {0.22, 0.22, 0.18, 0.18, 0.2};  // no !=
    Compare c;
    c.op = static_cast<CmpOp>(rng_.weighted(weights));
    const bool arith = p_.allows(Construct::ArithExpr);
    c.lhs = bound.empty() ? literal()
                          : (arith && rng_.chance(0.5) ? tree(bound, 1) : atom(bound, 1.0));
    c.rhs = arith && rng_.chance(0.3) ? tree(bound, 1) : literal();
    return c;
  }

  std::vector<Expr> range_args(const Names& bound) {
    const double name_prob = p_.allows(Construct::ArithExpr) ? 0.3 : 0.15;
    std::vector<Expr> args;
    if (rng_.chance(0.7)) {
      args.push_back(atom(bound, name_prob));
    } else {
      args.push_back(atom(bound, name_prob));
      args.push_back(atom(bound, name_prob));
    }
    return args;
  }

  // ---- statements --------------------------------------------------------

  Stmt assignment(Names& bound) {
    Assign a{std::string(1, any_name()), expr(bound)};
    bind(bound, a.target[0]);
    --budget_;
    return make_stmt(std::move(a));
  }

  Stmt print(const Names& bound) {
    --budget_;
    if (!bound.empty() && rng_.chance(0.8)) {
      return make_stmt(Print{Expr::var(std::string(1, bound[rng_.below(bound.size())]))});
    }
    return make_stmt(Print{expr(bound)});
  }

  Stmt simple(Names& bound, double print_prob) {
    const bool can_assign = p_.allows(Construct::Assignment);
    const bool can_print = p_.allows(Construct::Print);
    if (can_assign && (!can_print || bound.empty() || !rng_.chance(print_prob))) {
      return assignment(bound);
    }
    return print(bound);
  }

  // Callers guarantee budget_ >= 1 + elifs + 1 + with_else.
  Stmt if_chain(Names& bound, int depth, int elifs, bool with_else, int body_max) {
    budget_ -= 1 + elifs + 1 + (with_else ? 1 : 0);  // header plus one reserved slot per body
    If node;
    Names common;
    bool first = true;
    const auto branch_body = [&](Block& body) {
      ++budget_;
      Names inner = bound;
      block(body, inner, depth + 1, 1, body_max);
      common = first ? inner : intersect(common, inner);
      first = false;
    };
    for (int i = 0; i <= elifs; ++i) {
      node.branches.push_back(Branch{condition(bound), {}});
      branch_body(node.branches.back().body);
    }
    if (with_else) {
      branch_body(node.else_body);
      bound = common;  // names bound on every path
    }
    return make_stmt(std::move(node));
  }

  // Callers guarantee budget_ >= 2.
  Stmt for_loop(Names& bound, int depth, int body_max) {
    --budget_;
    For node;
    node.range_args = range_args(bound);
    node.var = std::string(1, any_name());
    Names inner = bound;
    bind(inner, node.var[0]);
    block(node.body, inner, depth + 1, 1, body_max);
    // The body may run zero times, so nothing it binds is guaranteed afterwards.
    return make_stmt(std::move(node));
  }

  void block(Block& out, Names& bound, int depth, int min_len, int max_len) {
    const int len = rng_.uniform_int(min_len, max_len);
    for (int i = 0; i < len && budget_ > 0; ++i) {
      const bool nest = depth < p_.max_nesting;
      const double if_w =
          nest && !bound.empty() && p_.allows(Construct::IfChain) && budget_ >= 2 ? 0.15 : 0.0;
      const double for_w = nest && p_.allows(Construct::ForLoop) && budget_ >= 2 ? 0.12 : 0.0;
      const std::size_t pick = rng_.weighted({1.0 - if_w - for_w, if_w, for_w});
      const int body_max = 2;
      if (pick == 1) {
        int elifs = p_.max_elif > 0 ? rng_.uniform_int(0, p_.max_elif) : 0;
        bool with_else = rng_.chance(0.6);
        while (1 + elifs + 1 + (with_else ? 1 : 0) > budget_) {
          if (elifs > 0) --elifs;
          else with_else = false;
        }
        out.push_back(if_chain(bound, depth, elifs, with_else, body_max));
      } else if (pick == 2) {
        out.push_back(for_loop(bound, depth, body_max));
      } else {
        out.push_back(simple(bound, depth == 0 ? 0.25 : 0.4));
      }
    }
  }

  void final_print(Block& out, const Names& bound) {
    if (!p_.allows(Construct::Print)) return;
    out.push_back(print(bound));
  }

  void free_form(Block& out, Names& bound) {
    --budget_;  // reserved for the final print
    const int top = 1 + static_cast<int>(rng_.weighted({0.3, 0.25, 0.2, 0.15, 0.1}));
    block(out, bound, 0, top, top);
    ++budget_;
    final_print(out, bound);
  }

  void structured(int level, Block& out, Names& bound) {
    switch (level) {
      case 1:
      case 2: {
        const int assigns = rng_.uniform_int(1, 3);
        for (int i = 0; i < assigns; ++i) {
          out.push_back(assignment(bound));
          if (i + 1 < assigns && rng_.chance(0.3)) out.push_back(print(bound));
        }
        final_print(out, bound);
        return;
      }
      case 3:
      case 4: {
        const int assigns = rng_.uniform_int(1, 2);
        for (int i = 0; i < assigns; ++i) out.push_back(assignment(bound));
        const int elifs = rng_.uniform_int(std::min(1, p_.max_elif), p_.max_elif);
        out.push_back(if_chain(bound, 0, elifs, true, 1));
        final_print(out, bound);
        return;
      }
      default: {
        const int assigns = rng_.uniform_int(1, 2);
        for (int i = 0; i < assigns; ++i) out.push_back(assignment(bound));
        out.push_back(for_loop(bound, 0, 2));
        final_print(out, bound);
        return;
      }
    }
  }

  const GrammarProfile& p_;
  Rng& rng_;
  int budget_ = 0;
};

bool acceptable(const Program& program) {
  try {
    const ExecutionOutput out = execute(program);
    if (out.max_trip_count > kMaxRangeTrips) return false;
    for (const std::string& v : out.lines) {
      if (std::llabs(std::stoll(v)) > kMaxAbsOutput) return false;
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

void GrammarProfile::validate() const {
  const auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidProfile, m); };
  if (allowed_constructs.empty()) fail("no constructs allowed");
  if (identifier_pool.empty()) fail("identifier pool is empty");
  std::string seen;
  for (char c : identifier_pool) {
    if (c < 'a' || c > 'h') fail(std::string("identifier '") + c + "' outside a..h");
    if (seen.find(c) != std::string::npos) fail("duplicate identifier in pool");
    seen.push_back(c);
  }
  if (literal_min < 0 || literal_max > 9 || literal_min > literal_max) {
    fail("literal range must lie within [0, 9]");
  }
  if (max_nesting < 0 || max_nesting > 2) fail("max_nesting must be in 0..2");
  if (max_elif < 0) fail("max_elif must be non-negative");
  if (max_statements < 1) fail("max_statements must be at least 1");
  if (concept_level) {
    if (*concept_level < 1 || *concept_level > 6) fail("concept level must be in 1..6");
    if (allowed_constructs != level_constructs(*concept_level)) {
      fail("constructs do not match concept level " + std::to_string(*concept_level));
    }
    if (max_statements < 4) fail("concept levels need max_statements >= 4");
  }
}

GrammarProfile GrammarProfile::standard() {
  GrammarProfile p;
  p.allowed_constructs = {Construct::Assignment, Construct::ArithExpr, Construct::IfChain,
                          Construct::ForLoop, Construct::Print};
  return p;
}

GrammarProfile concept_profile(int level) {
  if (level < 1 || level > 6) {
    throw Error(ErrorKind::OutOfRange, "concept level " + std::to_string(level) + " not in 1..6");
  }
  GrammarProfile p;
  p.allowed_constructs = level_constructs(level);
  p.concept_level = level;
  p.max_nesting = (level <= 2) ? 0 : 1;
  p.max_elif = (level == 3 || level == 4) ? 2 : 0;
  p.max_statements = 12;
  return p;
}

GrammarProfile profile_by_name(const std::string& name) {
  if (name == "standard") return GrammarProfile::standard();
  if (name.size() == 6 && name.rfind("level", 0) == 0 && name[5] >= '0' && name[5] <= '9') {
    return concept_profile(name[5] - '0');
  }
  throw Error(ErrorKind::InvalidProfile, "unknown profile '" + name + "'");
}

std::string profile_name(const GrammarProfile& profile) {
  if (profile.concept_level && profile == concept_profile(*profile.concept_level)) {
    return "level" + std::to_string(*profile.concept_level);
  }
  if (profile == GrammarProfile::standard()) return "standard";
  return "custom";
}

std::string generate_snippet(const GrammarProfile& profile, Rng& rng) {
  profile.validate();
  for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
    const Program program = Generator(profile, rng).program();
    if (acceptable(program)) return unparse(program);
  }
  throw Error(ErrorKind::ResampleBudgetExhausted,
              std::to_string(kResampleBudget) + " consecutive candidates failed to execute");
}

std::vector<AnnotatedSnippet> generate_corpus(const GrammarProfile& profile, std::int64_t count,
                                              std::uint64_t seed) {
  if (count < 1) throw Error(ErrorKind::OutOfRange, "count must be positive");
  profile.validate();
  std::vector<AnnotatedSnippet> corpus;
  corpus.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, 0x6e6e, static_cast<std::uint64_t>(i)));
    corpus.push_back(annotate(generate_snippet(profile, rng)));
  }
  return corpus;
}

}  // namespace tpc
