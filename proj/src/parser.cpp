#include <cctype>
#include <charconv>
#include <map>

#include "pagai/ir.hpp"

namespace pagai {

ParseError::ParseError(const std::string& msg, int line, int column)
    : error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line), column_(column) {}

const Function& Program::function(std::string_view name) const {
  if (functions.empty()) throw error("program has no function");
  if (name.empty()) return functions.front();
  for (const auto& f : functions)
    if (f.name == name) return f;
  throw error("no function named '" + std::string(name) + "'");
}

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1, col = 1;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> toks;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      int l = line, cl = col;
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance(1);
      if (i + 1 >= src.size()) throw ParseError("unterminated comment", l, cl);
      advance(2);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      static const char* two[] = {"==", "!=", "<=", ">="};
      t.kind = Tok::Punct;
      bool matched = false;
      for (auto* p : two) {
        if (src.substr(i, 2) == p) {
          t.text = p;
          advance(2);
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view("(){};,=<>+-*").find(c) == std::string_view::npos)
          throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        t.text = std::string(1, c);
        advance(1);
      }
    }
    toks.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  toks.push_back(end);
  return toks;
}

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::End) p.functions.push_back(function());
    if (p.functions.empty()) fail("expected 'fn'");
    return p;
  }

private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  Function* fn_ = nullptr;
  std::map<std::string, int> scope_;
  int loop_depth_ = 0;

  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().col); }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const { throw ParseError(msg, t.line, t.col); }

  bool is_punct(const char* p, size_t k = 0) const { return peek(k).kind == Tok::Punct && peek(k).text == p; }
  bool is_keyword(const char* kw, size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == kw; }

  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  void expect_punct(const char* p) {
    if (!is_punct(p)) fail(std::string("expected '") + p + "'");
    next();
  }
  void expect_keyword(const char* kw) {
    if (!is_keyword(kw)) fail(std::string("expected '") + kw + "'");
    next();
  }
  std::string ident() {
    if (peek().kind != Tok::Ident) fail("expected identifier");
    return next().text;
  }

  static bool reserved(const std::string& s) {
    return s == "fn" || s == "int" || s == "if" || s == "else" || s == "while" || s == "break" || s == "true" ||
           s == "input";
  }

  Integer number() {
    bool neg = false;
    if (is_punct("-")) {
      next();
      neg = true;
    }
    if (peek().kind != Tok::Number) fail("expected integer");
    Token t = next();
    Integer v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) fail_at(t, "integer literal out of range");
    return neg ? -v : v;
  }

  int variable(const Token& t) {
    auto it = scope_.find(t.text);
    if (it == scope_.end()) fail_at(t, "use of undeclared variable '" + t.text + "'");
    return it->second;
  }

  Function function() {
    expect_keyword("fn");
    Function f;
    f.name = ident();
    expect_punct("(");
    expect_punct(")");
    expect_punct("{");
    fn_ = &f;
    scope_.clear();
    while (is_keyword("int")) declaration(f);
    while (!is_punct("}")) {
      if (peek().kind == Tok::End) fail("expected '}'");
      f.body.push_back(statement());
    }
    next();
    fn_ = nullptr;
    return f;
  }

  void declaration(Function& f) {
    expect_keyword("int");
    Token name = peek();
    std::string n = ident();
    if (reserved(n)) fail_at(name, "reserved word '" + n + "' used as a variable");
    if (scope_.count(n)) fail_at(name, "variable '" + n + "' declared twice");
    std::optional<LinExpr> init;
    if (is_punct("=")) {
      next();
      init = linexpr();
    }
    expect_punct(";");
    scope_[n] = static_cast<int>(f.vars.size());
    f.vars.push_back(n);
    f.initializers.push_back(std::move(init));
  }

  std::vector<Stmt> block() {
    expect_punct("{");
    std::vector<Stmt> out;
    while (!is_punct("}")) {
      if (peek().kind == Tok::End) fail("expected '}'");
      out.push_back(statement());
    }
    next();
    return out;
  }

  Stmt statement() {
    Stmt s;
    s.line = peek().line;
    if (is_keyword("int")) fail("declarations must precede statements");
    if (is_keyword("if")) {
      next();
      s.kind = Stmt::Kind::If;
      expect_punct("(");
      s.cond = condition();
      expect_punct(")");
      s.body = block();
      if (is_keyword("else")) {
        next();
        s.orelse = block();
      }
      return s;
    }
    if (is_keyword("while")) {
      next();
      s.kind = Stmt::Kind::While;
      expect_punct("(");
      s.cond = condition();
      expect_punct(")");
      ++loop_depth_;
      s.body = block();
      --loop_depth_;
      return s;
    }
    if (is_keyword("break")) {
      Token t = next();
      if (loop_depth_ == 0) fail_at(t, "'break' outside of a loop");
      expect_punct(";");
      s.kind = Stmt::Kind::Break;
      return s;
    }
    Token name = peek();
    if (name.kind != Tok::Ident || reserved(name.text)) fail("expected statement");
    next();
    s.var = variable(name);
    expect_punct("=");
    if (is_keyword("input") && is_punct("(", 1)) {
      next();
      next();
      s.kind = Stmt::Kind::Input;
      s.lo = number();
      expect_punct(",");
      s.hi = number();
      expect_punct(")");
      if (s.lo > s.hi) fail_at(name, "empty input range");
    } else {
      s.kind = Stmt::Kind::Assign;
      s.rhs = linexpr();
    }
    expect_punct(";");
    return s;
  }

  Condition condition() {
    Condition c;
    if (is_keyword("true")) {
      next();
      c.always_true = true;
      return c;
    }
    LinExpr lhs = linexpr();
    if (peek().kind != Tok::Punct) fail("expected comparison operator");
    std::string op = peek().text;
    CmpOp cmp;
    if (op == "==")
      cmp = CmpOp::Eq;
    else if (op == "!=")
      cmp = CmpOp::Ne;
    else if (op == "<")
      cmp = CmpOp::Lt;
    else if (op == "<=")
      cmp = CmpOp::Le;
    else if (op == ">")
      cmp = CmpOp::Gt;
    else if (op == ">=")
      cmp = CmpOp::Ge;
    else
      fail("expected comparison operator");
    next();
    LinExpr rhs = linexpr();
    c.cons = LinCons::make(lhs, cmp, rhs);
    return c;
  }

  LinExpr linexpr() {
    LinExpr e = term();
    while (is_punct("+") || is_punct("-")) {
      bool minus = next().text == "-";
      LinExpr t = term();
      e = minus ? e - t : e + t;
    }
    return e;
  }

  // INT | NAME | INT "*" NAME | NAME "*" INT | "-" term
  LinExpr term() {
    if (is_punct("-")) {
      next();
      return -term();
    }
    if (peek().kind == Tok::Number) {
      Integer k = number();
      if (is_punct("*")) {
        next();
        if (peek().kind == Tok::Number) return LinExpr::constant_expr(checked_mul(k, number()));
        Token v = peek();
        if (v.kind != Tok::Ident || reserved(v.text)) fail("expected variable after '*'");
        next();
        return LinExpr::var(variable(v), k);
      }
      return LinExpr::constant_expr(k);
    }
    Token v = peek();
    if (v.kind != Tok::Ident || reserved(v.text)) fail("expected expression");
    next();
    int idx = variable(v);
    if (is_punct("*")) {
      Token star = next();
      if (peek().kind == Tok::Ident) fail_at(star, "nonlinear expression");
      if (peek().kind != Tok::Number) fail("expected integer after '*'");
      return LinExpr::var(idx, number());
    }
    if (is_punct("(")) fail_at(v, "function calls are not supported");
    return LinExpr::var(idx);
  }
};

}  // namespace

Program parse_program(std::string_view source) { return Parser(lex(source)).program(); }

}  // namespace pagai
