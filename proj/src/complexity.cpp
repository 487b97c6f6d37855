// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/complexity.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "tpc/error.hpp"

namespace tpc {

// ---------------------------------------------------------------------------
// Control flow

int ControlFlowGraph::components() const {
  std::vector<int> parent(static_cast<std::size_t>(num_nodes));
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& p = parent[static_cast<std::size_t>(x)];
      p = parent[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  };
  int count = num_nodes;
  for (const auto& [a, b] : edges) {
    const int ra = find(a);
    const int rb = find(b);
    if (ra != rb) {
      parent[static_cast<std::size_t>(ra)] = rb;
      --count;
    }
  }
  return count;
}

namespace {

class CfgBuilder {
 public:
  ControlFlowGraph build(const Program& program) {
    const int entry = add_node();
    const int exit = lower(program.body, entry);
    graph_.entry = entry;
    graph_.exit = exit;
    return std::move(graph_);
  }

 private:
  int add_node() { return graph_.num_nodes++; }
  void link(int from, int to) { graph_.edges.emplace_back(from, to); }

  // Appends `block` starting in node `current`; returns the node control
  // falls out of.
  int lower(const Block& block, int current) {
    for (const Stmt& s : block) {
      std::visit(overloaded{
                     [&](const Assign&) {},
                     [&](const Print&) {},
                     [&](const If& n) {
                       const int join = add_node();
                       int test = current;  // the `if` condition ends the current block
                       for (std::size_t i = 0; i < n.branches.size(); ++i) {
                         const int body = add_node();
                         link(test, body);
                         link(lower(n.branches[i].body, body), join);
                         const bool last = i + 1 == n.branches.size();
                         if (!last) {
                           const int next_test = add_node();  // elif condition
                           link(test, next_test);
                           test = next_test;
                         } else if (!n.else_body.empty()) {
                           const int other = add_node();
                           link(test, other);
                           link(lower(n.else_body, other), join);
                         } else {
                           link(test, join);
                         }
                       }
                       current = join;
                     },
                     [&](const For& n) {
                       const int header = add_node();
                       const int body = add_node();
                       const int after = add_node();
                       link(current, header);
                       link(header, body);
                       link(header, after);
                       link(lower(n.body, body), header);
                       current = after;
                     },
                 },
                 s.node);
    }
    return current;
  }

  ControlFlowGraph graph_;
};

int count_decisions(const Block& block) {
  int n = 0;
  for (const Stmt& s : block) {
    std::visit(overloaded{
                   [&](const If& node) {
                     n += static_cast<int>(node.branches.size());
                     for (const Branch& b : node.branches) n += count_decisions(b.body);
                     n += count_decisions(node.else_body);
                   },
                   [&](const For& node) { n += 1 + count_decisions(node.body); },
                   [](const auto&) {},
               },
               s.node);
  }
  return n;
}

// ---------------------------------------------------------------------------
// Halstead

class HalsteadCounter {
 public:
  HalsteadCounts count(const Program& program) {
    walk(program.body);
    return {static_cast<std::int64_t>(operators_.size()), static_cast<std::int64_t>(operands_.size()),
            n1_, n2_};
  }

 private:
  void op(const std::string& o) {
    operators_.insert(o);
    ++n1_;
  }
  void name(const std::string& id) {
    operands_.insert("v:" + id);
    ++n2_;
  }
  void literal(std::int64_t v) {
    operands_.insert("l:" + std::to_string(v));
    ++n2_;
  }

  void expr(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Lit: literal(e.value); return;
      case Expr::Kind::Var: name(e.name); return;
      case Expr::Kind::BinOp:
        expr(e.lhs());
        op(symbol(e.op));
        expr(e.rhs());
        return;
    }
  }

  void compare(const Compare& c) {
    expr(c.lhs);
    op(symbol(c.op));
    expr(c.rhs);
  }

  void walk(const Block& block) {
    for (const Stmt& s : block) {
      std::visit(overloaded{
                     [&](const Assign& n) {
                       name(n.target);
                       op("=");
                       expr(n.value);
                     },
                     [&](const Print& n) {
                       op("print");
                       expr(n.value);
                     },
                     [&](const If& n) {
                       for (std::size_t i = 0; i < n.branches.size(); ++i) {
                         op(i == 0 ? "if" : "elif");
                         compare(n.branches[i].cond);
                         walk(n.branches[i].body);
                       }
                       if (!n.else_body.empty()) {
                         op("else");
                         walk(n.else_body);
                       }
                     },
                     [&](const For& n) {
                       op("for");
                       name(n.var);
                       op("in");
                       op("range");
                       for (const Expr& a : n.range_args) expr(a);
                       walk(n.body);
                     },
                 },
                 s.node);
    }
  }

  std::set<std::string> operators_;
  std::set<std::string> operands_;
  std::int64_t n1_ = 0;
  std::int64_t n2_ = 0;
};

double xlog2x(double x) { return x > 0 ? x * std::log2(x) : 0.0; }

}  // namespace

ControlFlowGraph build_cfg(const Program& program) { return CfgBuilder().build(program); }

int decision_count(const Program& program) { return count_decisions(program.body); }

double cyclomatic_complexity(const Program& program) { return 1.0 + decision_count(program); }

HalsteadCounts halstead_counts(const Program& program) { return HalsteadCounter().count(program); }

HalsteadMeasures halstead_measures(const HalsteadCounts& c) {
  HalsteadMeasures m;
  const double eta1 = static_cast<double>(c.eta1);
  const double eta2 = static_cast<double>(c.eta2);
  m.vocabulary = eta1 + eta2;
  m.length = static_cast<double>(c.n1_total + c.n2_total);
  m.calculated_length = xlog2x(eta1) + xlog2x(eta2);
  m.volume = m.vocabulary >= 1 ? m.length * std::log2(m.vocabulary) : 0.0;
  m.difficulty = c.eta2 > 0 ? (eta1 / 2.0) * (static_cast<double>(c.n2_total) / eta2) : 0.0;
  m.effort = m.difficulty * m.volume;
  m.time = m.effort / 18.0;
  m.bugs = m.volume / 3000.0;
  return m;
}

double overall_metric(double cc, double hd) { return (cc + hd) / 2.0; }

DifficultyLevel classify(double om) {
  if (om < kEasyUpperBound) return DifficultyLevel::Easy;
  if (om < kHardLowerBound) return DifficultyLevel::Medium;
  return DifficultyLevel::Hard;
}

const char* to_string(DifficultyLevel level) {
  switch (level) {
    case DifficultyLevel::Easy: return "easy";
    case DifficultyLevel::Medium: return "medium";
    case DifficultyLevel::Hard: return "hard";
  }
  return "?";
}

DifficultyLevel parse_level(std::string_view name) {
  if (name == "easy") return DifficultyLevel::Easy;
  if (name == "medium") return DifficultyLevel::Medium;
  if (name == "hard") return DifficultyLevel::Hard;
  throw Error(ErrorKind::UnknownKind, "unknown difficulty level '" + std::string(name) + "'");
}

DifficultyScore score(const Program& program) {
  DifficultyScore s;
  s.cc = cyclomatic_complexity(program);
  s.hd = halstead_measures(halstead_counts(program)).difficulty;
  s.om = overall_metric(s.cc, s.hd);
  return s;
}

}  // namespace tpc
