// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/parser.hpp"

#include <cctype>
#include <charconv>
#include <limits>

#include "tpc/error.hpp"

namespace tpc {

const char* symbol(BinOpKind op) {
  switch (op) {
    case BinOpKind::Add: return "+";
    case BinOpKind::Sub: return "-";
    case BinOpKind::Mul: return "*";
    case BinOpKind::Mod: return "%";
  }
  return "?";
}

const char* symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Gt: return ">";
    case CmpOp::Le: return "<=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

namespace {

int block_depth(const Block& block) {
  int depth = 0;
  for (const Stmt& s : block) {
    std::visit(overloaded{
                   [&](const If& n) {
                     for (const Branch& b : n.branches) depth = std::max(depth, 1 + block_depth(b.body));
                     if (!n.else_body.empty()) depth = std::max(depth, 1 + block_depth(n.else_body));
                   },
                   [&](const For& n) { depth = std::max(depth, 1 + block_depth(n.body)); },
                   [](const auto&) {},
               },
               s.node);
  }
  return depth;
}

int block_count(const Block& block) {
  int count = 0;
  for (const Stmt& s : block) {
    ++count;
    std::visit(overloaded{
                   [&](const If& n) {
                     for (const Branch& b : n.branches) count += block_count(b.body);
                     count += block_count(n.else_body);
                   },
                   [&](const For& n) { count += block_count(n.body); },
                   [](const auto&) {},
               },
               s.node);
  }
  return count;
}

// ---------------------------------------------------------------------------
// Line tokenizer

enum class Tok { Name, Int, Op, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int column = 0;  // 1-based
};

struct Line {
  int number = 0;  // 1-based
  int indent = 0;  // in spaces
  std::vector<Token> tokens;
};

bool is_name_start(char c) { return std::islower(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
         std::isupper(static_cast<unsigned char>(c));
}

std::vector<Token> lex_line(std::string_view text, int line_no, int offset) {
  std::vector<Token> out;
  std::size_t i = static_cast<std::size_t>(offset);
  while (i < text.size()) {
    const char c = text[i];
    const int col = static_cast<int>(i) + 1;
    if (c == ' ') {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({Tok::Int, std::string(text.substr(i, j - i)), col});
      i = j;
      continue;
    }
    if (is_name_start(c) || std::isupper(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && is_name_char(text[j])) ++j;
      out.push_back({Tok::Name, std::string(text.substr(i, j - i)), col});
      i = j;
      continue;
    }
    if (i + 1 < text.size()) {
      const std::string_view two = text.substr(i, 2);
      if (two == "<=" || two == ">=" || two == "==" || two == "!=") {
        out.push_back({Tok::Op, std::string(two), col});
        i += 2;
        continue;
      }
    }
    switch (c) {
      case '+': case '-': case '*': case '%': case '=': case '<': case '>':
      case '(': case ')': case ':': case ',':
        out.push_back({Tok::Op, std::string(1, c), col});
        ++i;
        continue;
      case '#':
        i = text.size();  // trailing comment
        continue;
      default:
        throw SourceError(ErrorKind::SyntaxError, line_no, col,
                          std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", static_cast<int>(text.size()) + 1});
  return out;
}

bool is_keyword(std::string_view s) {
  return s == "if" || s == "elif" || s == "else" || s == "for" || s == "in" || s == "range" ||
         s == "print";
}

// ---------------------------------------------------------------------------
// Statement-level parser over pre-lexed lines

class Parser {
 public:
  explicit Parser(std::vector<Line> lines) : lines_(std::move(lines)) {}

  Program run() {
    Program program;
    if (lines_.empty()) return program;
    if (lines_.front().indent != 0) {
      throw SourceError(ErrorKind::IndentationError, lines_.front().number, 1, "unexpected indent");
    }
    program.body = parse_block(0);
    if (pos_ < lines_.size()) {
      throw SourceError(ErrorKind::IndentationError, lines_[pos_].number, 1, "unexpected indent");
    }
    return program;
  }

 private:
  Block parse_block(int indent) {
    Block block;
    while (pos_ < lines_.size()) {
      const Line& line = lines_[pos_];
      if (line.indent < indent) break;
      if (line.indent > indent) {
        throw SourceError(ErrorKind::IndentationError, line.number, 1, "unexpected indent");
      }
      block.push_back(parse_statement(indent));
    }
    return block;
  }

  Block parse_body(int indent, const Line& header) {
    if (pos_ >= lines_.size() || lines_[pos_].indent <= indent) {
      const int at = pos_ < lines_.size() ? lines_[pos_].number : header.number + 1;
      throw SourceError(ErrorKind::IndentationError, at, 1, "expected an indented block");
    }
    if (lines_[pos_].indent != indent + 4) {
      throw SourceError(ErrorKind::IndentationError, lines_[pos_].number, 1,
                        "indentation must be 4 spaces per level");
    }
    return parse_block(indent + 4);
  }

  Stmt parse_statement(int indent) {
    const Line& line = lines_[pos_];
    cur_ = &line;
    tok_ = 0;
    const Token& first = peek();
    Stmt stmt;
    stmt.line = line.number;

    if (first.kind == Tok::Name && first.text == "if") {
      If node;
      advance();
      node.branches.push_back(Branch{parse_compare(), {}});
      expect_op(":");
      expect_end();
      ++pos_;
      node.branches.back().body = parse_body(indent, line);
      while (pos_ < lines_.size() && lines_[pos_].indent == indent) {
        const Line& next = lines_[pos_];
        cur_ = &next;
        tok_ = 0;
        if (peek().kind != Tok::Name) break;
        if (peek().text == "elif") {
          advance();
          node.branches.push_back(Branch{parse_compare(), {}});
          expect_op(":");
          expect_end();
          ++pos_;
          node.branches.back().body = parse_body(indent, next);
        } else if (peek().text == "else") {
          advance();
          expect_op(":");
          expect_end();
          ++pos_;
          node.else_body = parse_body(indent, next);
          break;
        } else {
          break;
        }
      }
      stmt.node = std::move(node);
      return stmt;
    }

    if (first.kind == Tok::Name && (first.text == "elif" || first.text == "else")) {
      fail(first, "'" + first.text + "' without matching 'if'");
    }

    if (first.kind == Tok::Name && first.text == "for") {
      For node;
      advance();
      node.var = expect_name();
      expect_keyword("in");
      expect_keyword("range");
      expect_op("(");
      node.range_args.push_back(parse_expr());
      if (peek().kind == Tok::Op && peek().text == ",") {
        advance();
        node.range_args.push_back(parse_expr());
      }
      expect_op(")");
      expect_op(":");
      expect_end();
      ++pos_;
      node.body = parse_body(indent, line);
      stmt.node = std::move(node);
      return stmt;
    }

    if (first.kind == Tok::Name && first.text == "print") {
      advance();
      expect_op("(");
      Print node{parse_expr()};
      expect_op(")");
      expect_end();
      ++pos_;
      stmt.node = std::move(node);
      return stmt;
    }

    Assign node;
    node.target = expect_name();
    expect_op("=");
    node.value = parse_expr();
    expect_end();
    ++pos_;
    stmt.node = std::move(node);
    return stmt;
  }

  Compare parse_compare() {
    Compare cmp;
    cmp.lhs = parse_expr();
    const Token& t = peek();
    if (t.kind != Tok::Op) fail(t, "expected comparison operator");
    if (t.text == "<") cmp.op = CmpOp::Lt;
    else if (t.text == ">") cmp.op = CmpOp::Gt;
    else if (t.text == "<=") cmp.op = CmpOp::Le;
    else if (t.text == ">=") cmp.op = CmpOp::Ge;
    else if (t.text == "==") cmp.op = CmpOp::Eq;
    else if (t.text == "!=") cmp.op = CmpOp::Ne;
    else fail(t, "expected comparison operator");
    advance();
    cmp.rhs = parse_expr();
    return cmp;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (peek().kind == Tok::Op && (peek().text == "+" || peek().text == "-")) {
      const BinOpKind op = peek().text == "+" ? BinOpKind::Add : BinOpKind::Sub;
      advance();
      lhs = Expr::binop(op, std::move(lhs), parse_term());
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    while (peek().kind == Tok::Op && (peek().text == "*" || peek().text == "%")) {
      const BinOpKind op = peek().text == "*" ? BinOpKind::Mul : BinOpKind::Mod;
      advance();
      lhs = Expr::binop(op, std::move(lhs), parse_unary());
    }
    return lhs;
  }

  // A minus sign directly in front of an integer is a negative literal.
  Expr parse_unary() {
    if (peek().kind == Tok::Op && peek().text == "-") {
      advance();
      if (peek().kind != Tok::Int) fail(peek(), "expected integer after unary '-'");
      return Expr::lit(-parse_int(take()));
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const Token& t = peek();
    if (t.kind == Tok::Int) return Expr::lit(parse_int(take()));
    if (t.kind == Tok::Name) {
      if (is_keyword(t.text)) fail(t, "unexpected keyword '" + t.text + "'");
      return Expr::var(take().text);
    }
    if (t.kind == Tok::Op && t.text == "(") {
      advance();
      Expr inner = parse_expr();
      expect_op(")");
      return inner;
    }
    if (t.kind == Tok::End) fail(t, "unexpected end of line");
    fail(t, "unexpected token '" + t.text + "'");
  }

  std::int64_t parse_int(const Token& t) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
      fail(t, "integer literal out of range");
    }
    return v;
  }

  std::string expect_name() {
    const Token& t = peek();
    if (t.kind != Tok::Name || is_keyword(t.text)) fail(t, "expected identifier");
    return take().text;
  }

  void expect_keyword(std::string_view kw) {
    const Token& t = peek();
    if (t.kind != Tok::Name || t.text != kw) fail(t, "expected '" + std::string(kw) + "'");
    advance();
  }

  void expect_op(std::string_view op) {
    const Token& t = peek();
    if (t.kind != Tok::Op || t.text != op) {
      if (t.kind == Tok::End) fail(t, "unexpected end of line, expected '" + std::string(op) + "'");
      fail(t, "expected '" + std::string(op) + "'");
    }
    advance();
  }

  void expect_end() {
    if (peek().kind != Tok::End) fail(peek(), "unexpected token '" + peek().text + "'");
  }

  const Token& peek() const { return cur_->tokens[tok_]; }
  void advance() {
    if (tok_ + 1 < cur_->tokens.size()) ++tok_;
  }
  Token take() {
    Token t = peek();
    advance();
    return t;
  }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw SourceError(ErrorKind::SyntaxError, cur_->number, t.column, msg);
  }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
  const Line* cur_ = nullptr;
  std::size_t tok_ = 0;
};

// ---------------------------------------------------------------------------
// Unparser

int precedence(BinOpKind op) { return (op == BinOpKind::Add || op == BinOpKind::Sub) ? 1 : 2; }

void emit_expr(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::Lit: out += std::to_string(e.value); return;
    case Expr::Kind::Var: out += e.name; return;
    case Expr::Kind::BinOp: break;
  }
  const int p = precedence(e.op);
  const auto child = [&](const Expr& c, bool right) {
    const bool parens =
        c.kind == Expr::Kind::BinOp && (right ? precedence(c.op) <= p : precedence(c.op) < p);
    if (parens) out += '(';
    emit_expr(c, out);
    if (parens) out += ')';
  };
  child(e.lhs(), false);
  out += ' ';
  out += symbol(e.op);
  out += ' ';
  child(e.rhs(), true);
}

void emit_compare(const Compare& c, std::string& out) {
  emit_expr(c.lhs, out);
  out += ' ';
  out += symbol(c.op);
  out += ' ';
  emit_expr(c.rhs, out);
}

void emit_block(const Block& block, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  for (const Stmt& s : block) {
    std::visit(overloaded{
                   [&](const Assign& n) {
                     out += pad + n.target + " = ";
                     emit_expr(n.value, out);
                     out += '\n';
                   },
                   [&](const Print& n) {
                     out += pad + "print(";
                     emit_expr(n.value, out);
                     out += ")\n";
                   },
                   [&](const If& n) {
                     for (std::size_t i = 0; i < n.branches.size(); ++i) {
                       out += pad + (i == 0 ? "if " : "elif ");
                       emit_compare(n.branches[i].cond, out);
                       out += " :\n";
                       emit_block(n.branches[i].body, indent + 4, out);
                     }
                     if (!n.else_body.empty()) {
                       out += pad + "else :\n";
                       emit_block(n.else_body, indent + 4, out);
                     }
                   },
                   [&](const For& n) {
                     out += pad + "for " + n.var + " in range(";
                     for (std::size_t i = 0; i < n.range_args.size(); ++i) {
                       if (i) out += ", ";
                       emit_expr(n.range_args[i], out);
                     }
                     out += ") :\n";
                     emit_block(n.body, indent + 4, out);
                   },
               },
               s.node);
  }
}

}  // namespace

int nesting_depth(const Program& program) { return block_depth(program.body); }

int statement_count(const Program& program) { return block_count(program.body); }

Program parse(std::string_view source) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t start = 0;
  while (start < source.size()) {
    std::size_t end = source.find('\n', start);
    if (end == std::string_view::npos) end = source.size();
    const std::string_view text = source.substr(start, end - start);
    ++number;
    start = end + 1;

    std::size_t indent = 0;
    while (indent < text.size() && text[indent] == ' ') ++indent;
    if (indent < text.size() && text[indent] == '\t') {
      throw SourceError(ErrorKind::IndentationError, number, static_cast<int>(indent) + 1,
                        "tabs are not allowed");
    }
    if (indent == text.size() || text[indent] == '#') continue;  // blank or comment
    if (indent % 4 != 0) {
      throw SourceError(ErrorKind::IndentationError, number, 1,
                        "indentation must be a multiple of 4 spaces");
    }
    Line line;
    line.number = number;
    line.indent = static_cast<int>(indent);
    line.tokens = lex_line(text, number, static_cast<int>(indent));
    lines.push_back(std::move(line));
  }
  return Parser(std::move(lines)).run();
}

std::string unparse(const Program& program) {
  std::string out;
  emit_block(program.body, 0, out);
  return out;
}

std::string unparse(const Expr& expr) {
  std::string out;
  emit_expr(expr, out);
  return out;
}

}  // namespace tpc
