#pragma once

// Exact rational functions p/q over Z[y1..yn].
//
// Every Expr is stored in canonical form: gcd(p, q) = 1 in Z[y] (integer
// content included) and the grlex-leading coefficient of q is positive.
// Two Exprs denote the same function iff their canonical forms are equal,
// so equality and zero testing are structural.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diffred/poly.hpp"

namespace diffred {

/// Ordered, duplicate-free list of variable names. The first `n` entries
/// of a problem's VarSet are the coordinates y^1..y^n.
class VarSet {
 public:
  VarSet() = default;
  explicit VarSet(std::vector<std::string> names);

  /// prefix1, prefix2, ..., prefix<n>
  static VarSet numbered(std::string_view prefix, std::size_t n);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  VarSet extended(const std::vector<std::string>& extra) const;

  friend bool operator==(const VarSet&, const VarSet&) = default;

 private:
  std::vector<std::string> names_;
};

class Expr {
 public:
  Expr() : Expr(0) {}
  explicit Expr(std::size_t nvars);

  static Expr constant(std::size_t nvars, const mpq_class& c);
  static Expr variable(std::size_t nvars, std::size_t index);
  static Expr polynomial(Poly p);
  /// num/den brought to canonical form; throws DivisionByZeroError if den = 0.
  static Expr fraction(Poly num, Poly den);

  std::size_t nvars() const { return num_.nvars(); }
  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  bool is_polynomial() const { return den_.is_one(); }
  /// Value of a constant expression.
  mpq_class constant_value() const;
  bool depends_on(std::size_t var) const;

  Expr operator-() const;
  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr& operator*=(const Expr& o);
  Expr& operator/=(const Expr& o);
  friend Expr operator+(Expr a, const Expr& b) { return a += b; }
  friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
  friend Expr operator*(Expr a, const Expr& b) { return a *= b; }
  friend Expr operator/(Expr a, const Expr& b) { return a /= b; }

  Expr scaled(const mpq_class& c) const;
  Expr reciprocal() const;
  Expr pow(long e) const;

  /// Exact partial derivative with respect to variable `var`.
  Expr derivative(std::size_t var) const;

  /// Exact value at a rational point; throws PoleError if the canonical
  /// denominator vanishes there.
  mpq_class eval(std::span<const mpq_class> point) const;
  double eval(std::span<const double> point) const;

  /// Replace variable i by values[i]. All values share one ring, which
  /// becomes the ring of the result.
  Expr substitute(std::span<const Expr> values) const;

  Expr with_nvars(std::size_t n) const;

  std::string to_string(std::span<const std::string> names) const;
  std::string to_string(const VarSet& vars) const { return to_string(vars.names()); }

  friend bool operator==(const Expr& a, const Expr& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

 private:
  Expr(Poly num, Poly den, int);  // trusted canonical input

  Poly num_;
  Poly den_;
};

/// Optional randomized pre-check for zero testing: evaluate at a few
/// pseudo-random rational points from a fixed seed and report nonzero as
/// soon as one probe is nonzero.
struct ProbeOptions {
  std::uint64_t seed = 20240601;
  int points = 3;
};

bool is_zero(const Expr& e);
bool is_zero(const Expr& e, const ProbeOptions& probe);

/// Pseudo-random rational points from a generator seeded with `seed`.
std::vector<std::vector<mpq_class>> random_points(std::size_t nvars, std::size_t count,
                                                  std::uint64_t seed);

}  // namespace diffred
