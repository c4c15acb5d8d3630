#include "diffred/parser.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "diffred/errors.hpp"

namespace diffred {

namespace {

constexpr long kMaxExponent = 10000;

class Parser {
 public:
  Parser(std::string_view src, const VarSet& vars) : src_(src), vars_(vars) {}

  Expr parse() {
    Expr e = expr();
    skip_space();
    if (pos_ != src_.size()) {
      throw SyntaxError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs += term();
      } else if (accept('-')) {
        lhs -= term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs *= unary();
      } else if (accept('/')) {
        const std::size_t at = pos_ - 1;
        Expr rhs = unary();
        if (rhs.is_zero()) {
          throw DivisionByZeroError("division by zero at position " + std::to_string(at + 1));
        }
        lhs /= rhs;
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    skip_space();
    if (!accept('^')) return base;
    const std::size_t at = pos_;
    Expr exponent = unary();
    if (!exponent.is_constant()) throw SyntaxError("exponent must be an integer constant", at);
    const mpq_class e = exponent.constant_value();
    if (e.get_den() != 1) throw SyntaxError("exponent must be an integer", at);
    if (abs(e.get_num()) > kMaxExponent) throw SyntaxError("exponent too large", at);
    const long k = e.get_num().get_si();
    if (k < 0 && base.is_zero()) {
      throw DivisionByZeroError("zero raised to a negative power at position " +
                                std::to_string(at + 1));
    }
    return base.pow(k);
  }

  Expr primary() {
    skip_space();
    if (pos_ >= src_.size()) throw SyntaxError("unexpected end of expression", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) throw SyntaxError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return Expr::constant(vars_.size(), mpq_class(mpz_class(std::string(src_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view name = src_.substr(start, pos_ - start);
      auto idx = vars_.index_of(name);
      if (!idx) throw UnknownVariableError(std::string(name), start);
      return Expr::variable(vars_.size(), *idx);
    }
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string_view src_;
  const VarSet& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view src, const VarSet& vars) { return Parser(src, vars).parse(); }

mpq_class parse_rational(std::string_view src) {
  std::string s;
  for (char c : src) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw InputError("empty number");
  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  const std::string body = s.substr(i);
  auto all_digits = [](const std::string& t) {
    return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) {
      return std::isdigit(static_cast<unsigned char>(c));
    });
  };
  mpq_class q;
  if (auto slash = body.find('/'); slash != std::string::npos) {
    const std::string a = body.substr(0, slash);
    const std::string b = body.substr(slash + 1);
    if (!all_digits(a) || !all_digits(b)) throw InputError("malformed rational '" + std::string(src) + "'");
    if (mpz_class(b) == 0) throw InputError("zero denominator in '" + std::string(src) + "'");
    q = mpq_class(mpz_class(a), mpz_class(b));
  } else if (auto dot = body.find('.'); dot != std::string::npos) {
    const std::string a = body.substr(0, dot);
    const std::string b = body.substr(dot + 1);
    if ((!a.empty() && !all_digits(a)) || (!b.empty() && !all_digits(b)) || (a.empty() && b.empty())) {
      throw InputError("malformed decimal '" + std::string(src) + "'");
    }
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, b.size());
    q = mpq_class(mpz_class(a.empty() ? "0" : a) * scale + mpz_class(b.empty() ? "0" : b), scale);
  } else {
    if (!all_digits(body)) throw InputError("malformed rational '" + std::string(src) + "'");
    q = mpq_class(mpz_class(body));
  }
  q.canonicalize();
  return neg ? mpq_class(-q) : q;
}

}  // namespace diffred
