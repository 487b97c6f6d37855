// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace tpc {

enum class BinOpKind { Add, Sub, Mul, Mod };
enum class CmpOp { Lt, Gt, Le, Ge, Eq, Ne };

const char* symbol(BinOpKind op);
const char* symbol(CmpOp op);

/// Integer expression. `args` holds the two operands of a BinOp and is empty otherwise.
struct Expr {
  enum class Kind { Lit, Var, BinOp };

  Kind kind = Kind::Lit;
  std::int64_t value = 0;
  std::string name;
  BinOpKind op = BinOpKind::Add;
  std::vector<Expr> args;

  static Expr lit(std::int64_t v) {
    Expr e;
    e.kind = Kind::Lit;
    e.value = v;
    return e;
  }
  static Expr var(std::string id) {
    Expr e;
    e.kind = Kind::Var;
    e.name = std::move(id);
    return e;
  }
  static Expr binop(BinOpKind op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Kind::BinOp;
    e.op = op;
    e.args.reserve(2);
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  const Expr& lhs() const { return args[0]; }
  const Expr& rhs() const { return args[1]; }

  friend bool operator==(const Expr&, const Expr&) = default;
};

struct Compare {
  CmpOp op = CmpOp::Lt;
  Expr lhs;
  Expr rhs;

  friend bool operator==(const Compare&, const Compare&) = default;
};

struct Stmt;
using Block = std::vector<Stmt>;

struct Assign {
  std::string target;
  Expr value;
  friend bool operator==(const Assign&, const Assign&) = default;
};

struct Print {
  Expr value;
  friend bool operator==(const Print&, const Print&) = default;
};

struct Branch {
  Compare cond;
  Block body;
  friend bool operator==(const Branch&, const Branch&) = default;
};

/// if / elif... / else. branches[0] is the `if`; an empty else_body means no else.
struct If {
  std::vector<Branch> branches;
  Block else_body;
  friend bool operator==(const If&, const If&) = default;
};

/// for <var> in range(args...) with one or two range arguments.
struct For {
  std::string var;
  std::vector<Expr> range_args;
  Block body;
  friend bool operator==(const For&, const For&) = default;
};

struct Stmt {
  std::variant<Assign, Print, If, For> node;
  int line = 0;  // 1-based source line, 0 when built programmatically

  // Position is not part of structural identity.
  friend bool operator==(const Stmt& a, const Stmt& b) { return a.node == b.node; }
};

struct Program {
  Block body;
  friend bool operator==(const Program&, const Program&) = default;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline Stmt make_stmt(auto node) { return Stmt{std::move(node), 0}; }

/// Maximum block nesting depth (0 for straight-line code).
int nesting_depth(const Program& program);

/// Total number of statements, counting compound headers and nested bodies.
int statement_count(const Program& program);

}  // namespace tpc
