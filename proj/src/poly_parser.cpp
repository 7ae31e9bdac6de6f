#include <cctype>
#include <string>
#include <vector>

#include "phvs/multipoly.hpp"

namespace phvs {

namespace {

struct Token {
  enum Kind { Number, Variable, Op, End } kind;
  std::int64_t number = 0;  // value, or variable index (0-based)
  char op = 0;
  std::size_t pos = 0;
};

[[noreturn]] void fail(std::string_view text, std::size_t pos, const std::string& msg) {
  throw Error(Errc::Parse, msg + " at offset " + std::to_string(pos) + " in \"" + std::string(text) + "\"");
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::int64_t v = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        if (__builtin_mul_overflow(v, 10, &v) || __builtin_add_overflow(v, text[i] - '0', &v)) {
          fail(text, start, "integer literal too large");
        }
        ++i;
      }
      out.push_back({Token::Number, v, 0, start});
    } else if (c == 'x' || c == 'y') {
      ++i;
      std::int64_t idx = 0;
      bool has_digits = false;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        idx = idx * 10 + (text[i] - '0');
        has_digits = true;
        if (idx > 4096) fail(text, start, "variable index too large");
        ++i;
      }
      if (!has_digits) idx = 1;
      if (idx < 1) fail(text, start, "variable indices start at 1");
      out.push_back({Token::Variable, idx - 1, 0, start});
    } else if (c == '+' || c == '-' || c == '*' || c == '^' || c == '(' || c == ')') {
      out.push_back({Token::Op, 0, c, start});
      ++i;
    } else {
      fail(text, start, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Token::End, 0, 0, text.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, std::vector<Token> tokens, std::size_t nvars)
      : text_(text), tokens_(std::move(tokens)), nvars_(nvars) {}

  MultiPoly parse() {
    MultiPoly r = expr();
    if (peek().kind != Token::End) fail(text_, peek().pos, "trailing input");
    return r;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  bool is_op(char c) const { return peek().kind == Token::Op && peek().op == c; }

  MultiPoly expr() {
    MultiPoly acc = term();
    while (is_op('+') || is_op('-')) {
      const char op = peek().op;
      ++pos_;
      MultiPoly rhs = term();
      if (op == '+') acc += rhs;
      else acc -= rhs;
    }
    return acc;
  }

  MultiPoly term() {
    MultiPoly acc = unary();
    while (is_op('*')) {
      ++pos_;
      acc = acc * unary();
    }
    return acc;
  }

  MultiPoly unary() {
    if (is_op('-')) {
      ++pos_;
      return -unary();
    }
    if (is_op('+')) {
      ++pos_;
      return unary();
    }
    return power();
  }

  MultiPoly power() {
    MultiPoly base = primary();
    if (is_op('^')) {
      ++pos_;
      if (peek().kind != Token::Number) fail(text_, peek().pos, "exponent must be a non-negative integer");
      const std::int64_t e = peek().number;
      if (e > 64) fail(text_, peek().pos, "exponent too large");
      ++pos_;
      return base.pow(static_cast<unsigned>(e));
    }
    return base;
  }

  MultiPoly primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Number:
        ++pos_;
        return MultiPoly::constant(nvars_, t.number);
      case Token::Variable:
        ++pos_;
        return MultiPoly::variable(nvars_, static_cast<std::size_t>(t.number));
      case Token::Op:
        if (t.op == '(') {
          ++pos_;
          MultiPoly inner = expr();
          if (!is_op(')')) fail(text_, peek().pos, "expected ')'");
          ++pos_;
          return inner;
        }
        break;
      case Token::End:
        fail(text_, t.pos, "unexpected end of input");
    }
    fail(text_, t.pos, std::string("unexpected '") + t.op + "'");
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::size_t nvars_;
  std::size_t pos_ = 0;
};

}  // namespace

MultiPoly parse_poly(std::string_view text, std::size_t min_nvars) {
  std::vector<Token> tokens = tokenize(text);
  std::size_t nvars = min_nvars;
  for (const auto& t : tokens)
    if (t.kind == Token::Variable) nvars = std::max(nvars, static_cast<std::size_t>(t.number) + 1);
  return Parser(text, std::move(tokens), nvars).parse();
}

}  // namespace phvs
