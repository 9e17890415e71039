#pragma once

// Shared recursive-descent parser for ring elements and polynomials.
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := '-' unary | '+' unary | power
//   power := atom ('^' INT)?
//   atom  := INT | IDENT | '(' expr ')'

#include <gmpxx.h>

#include <cctype>
#include <string>

#include "tameforge/errors.hpp"

namespace tameforge::detail {

template <class T, class Ops>
class ExprParser {
 public:
  ExprParser(const std::string& text, Ops& ops) : s_(text), ops_(ops) {}

  T parse() {
    T v = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected trailing input");
    return v;
  }

 private:
  const std::string& s_;
  Ops& ops_;
  std::size_t pos_ = 0;

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::ParseError, msg + " at offset " + std::to_string(pos_) + " in '" + s_ + "'");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  T expr() {
    T v = term();
    for (;;) {
      if (accept('+')) {
        v = ops_.add(v, term());
      } else if (accept('-')) {
        v = ops_.sub(v, term());
      } else {
        return v;
      }
    }
  }

  T term() {
    T v = unary();
    for (;;) {
      if (accept('*')) {
        v = ops_.mul(v, unary());
      } else if (accept('/')) {
        v = ops_.div(v, unary());
      } else {
        return v;
      }
    }
  }

  T unary() {
    if (accept('-')) return ops_.neg(unary());
    if (accept('+')) return unary();
    return power();
  }

  T power() {
    T base = atom();
    if (accept('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) error("expected exponent");
      unsigned long e = std::stoul(s_.substr(start, pos_ - start));
      return ops_.pow(base, static_cast<unsigned>(e));
    }
    return base;
  }

  T atom() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      T v = expr();
      if (!accept(')')) error("expected ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return ops_.integer(mpz_class(s_.substr(start, pos_ - start)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      return ops_.ident(s_.substr(start, pos_ - start));
    }
    error(std::string("unexpected character '") + c + "'");
  }
};

/// True when a printed value can be used as a factor without parentheses.
inline bool is_atomic_text(const std::string& s) { return s.find(' ') == std::string::npos; }

}  // namespace tameforge::detail
