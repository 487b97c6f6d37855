// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/interp.hpp"

#include <algorithm>
#include <utility>

#include "tpc/error.hpp"

namespace tpc {

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  if (b == -1) return 0;  // INT64_MIN % -1 traps
  std::int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return r;
}

namespace {

class Machine {
 public:
  explicit Machine(std::int64_t budget) : budget_(budget) {}

  void run(const Block& block) {
    for (const Stmt& s : block) step(s);
  }

  ExecutionOutput take() { return std::move(out_); }

 private:
  void step(const Stmt& s) {
    if (++out_.step_count > budget_) {
      throw Error(ErrorKind::StepBudgetExceeded,
                  "more than " + std::to_string(budget_) + " statements executed");
    }
    std::visit(overloaded{
                   [&](const Assign& n) { bind(n.target, eval(n.value)); },
                   [&](const Print& n) { out_.lines.push_back(std::to_string(eval(n.value))); },
                   [&](const If& n) {
                     for (const Branch& b : n.branches) {
                       if (test(b.cond)) {
                         run(b.body);
                         return;
                       }
                     }
                     run(n.else_body);
                   },
                   [&](const For& n) {
                     std::int64_t lo = 0;
                     std::int64_t hi = 0;
                     if (n.range_args.size() == 1) {
                       hi = eval(n.range_args[0]);
                     } else {
                       lo = eval(n.range_args[0]);
                       hi = eval(n.range_args[1]);
                     }
                     if (hi > lo) out_.max_trip_count = std::max(out_.max_trip_count, hi - lo);
                     for (std::int64_t i = lo; i < hi; ++i) {
                       bind(n.var, i);
                       run(n.body);
                     }
                   },
               },
               s.node);
  }

  bool test(const Compare& c) {
    const std::int64_t l = eval(c.lhs);
    const std::int64_t r = eval(c.rhs);
    switch (c.op) {
      case CmpOp::Lt: return l < r;
      case CmpOp::Gt: return l > r;
      case CmpOp::Le: return l <= r;
      case CmpOp::Ge: return l >= r;
      case CmpOp::Eq: return l == r;
      case CmpOp::Ne: return l != r;
    }
    return false;
  }

  std::int64_t eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Lit: return e.value;
      case Expr::Kind::Var: return lookup(e.name);
      case Expr::Kind::BinOp: break;
    }
    const std::int64_t l = eval(e.lhs());
    const std::int64_t r = eval(e.rhs());
    std::int64_t v = 0;
    bool overflow = false;
    switch (e.op) {
      case BinOpKind::Add: overflow = __builtin_add_overflow(l, r, &v); break;
      case BinOpKind::Sub: overflow = __builtin_sub_overflow(l, r, &v); break;
      case BinOpKind::Mul: overflow = __builtin_mul_overflow(l, r, &v); break;
      case BinOpKind::Mod:
        if (r == 0) throw Error(ErrorKind::ModuloByZero, "integer modulo by zero");
        // INT64_MIN % -1 is the only overflowing case; its result is 0.
        v = floor_mod(l, r);
        break;
    }
    if (overflow) throw Error(ErrorKind::IntegerOverflow, "64-bit overflow");
    return v;
  }

  std::int64_t lookup(const std::string& name) const {
    for (const auto& [k, v] : env_) {
      if (k == name) return v;
    }
    throw Error(ErrorKind::UnboundVariable, "name '" + name + "' is not defined");
  }

  void bind(const std::string& name, std::int64_t value) {
    for (auto& [k, v] : env_) {
      if (k == name) {
        v = value;
        return;
      }
    }
    env_.emplace_back(name, value);
  }

  std::int64_t budget_;
  std::vector<std::pair<std::string, std::int64_t>> env_;
  ExecutionOutput out_;
};

}  // namespace

ExecutionOutput execute(const Program& program, std::int64_t step_budget) {
  Machine m(step_budget);
  m.run(program.body);
  return m.take();
}

std::string expected_output_block(const std::vector<std::string>& output_lines) {
  std::string out;
  for (const std::string& v : output_lines) {
    out += "# ";
    out += v;
    out += '\n';
  }
  out += '\n';
  return out;
}

std::string render_annotated(std::string_view source, const std::vector<std::string>& output_lines) {
  std::string out(source);
  if (!out.empty() && out.back() != '\n') out += '\n';
  out += kOutputMarker;
  out += '\n';
  out += expected_output_block(output_lines);
  return out;
}

AnnotatedText split_annotated(std::string_view text) {
  AnnotatedText result;
  const std::string marker = std::string(kOutputMarker) + "\n";
  std::size_t marker_pos = std::string_view::npos;
  // The marker must start a line.
  for (std::size_t at = 0; at < text.size();) {
    if (text.substr(at, marker.size()) == marker) {
      marker_pos = at;
      break;
    }
    const std::size_t nl = text.find('\n', at);
    if (nl == std::string_view::npos) break;
    at = nl + 1;
  }
  if (marker_pos == std::string_view::npos) {
    throw OffsetError(ErrorKind::MalformedFile, 0, "missing '# output' marker");
  }
  result.source = std::string(text.substr(0, marker_pos));
  std::size_t at = marker_pos + marker.size();
  while (true) {
    if (at >= text.size()) {
      throw OffsetError(ErrorKind::MalformedFile, at, "missing blank terminator line");
    }
    if (text[at] == '\n') {
      ++at;
      break;
    }
    const std::size_t nl = text.find('\n', at);
    if (nl == std::string_view::npos) {
      throw OffsetError(ErrorKind::MalformedFile, at, "unterminated output line");
    }
    const std::string_view line = text.substr(at, nl - at);
    if (line.size() < 3 || line.substr(0, 2) != "# ") {
      throw OffsetError(ErrorKind::MalformedFile, at, "output line must start with '# '");
    }
    const std::string_view value = line.substr(2);
    const std::size_t digits_from = value.front() == '-' ? 1 : 0;
    if (digits_from >= value.size() ||
        !std::all_of(value.begin() + static_cast<std::ptrdiff_t>(digits_from), value.end(),
                     [](char c) { return c >= '0' && c <= '9'; })) {
      throw OffsetError(ErrorKind::MalformedFile, at + 2, "output value is not an integer");
    }
    result.output_lines.emplace_back(value);
    at = nl + 1;
  }
  if (at != text.size()) {
    throw OffsetError(ErrorKind::MalformedFile, at, "trailing bytes after snippet terminator");
  }
  return result;
}

}  // namespace tpc
