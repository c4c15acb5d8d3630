#pragma once

// Dense matrices and univariate polynomials with Expr entries.

#include <cstddef>
#include <span>
#include <vector>

#include "diffred/expr.hpp"

namespace diffred {

class ExprMatrix {
 public:
  ExprMatrix() = default;
  ExprMatrix(std::size_t rows, std::size_t cols, std::size_t nvars);

  static ExprMatrix identity(std::size_t n, std::size_t nvars);
  /// Rows of equal length; the ring is taken from the entries.
  static ExprMatrix from_rows(const std::vector<std::vector<Expr>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nvars() const { return nvars_; }
  bool is_square() const { return rows_ == cols_; }

  Expr& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Expr& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  ExprMatrix& operator+=(const ExprMatrix& o);
  ExprMatrix& operator-=(const ExprMatrix& o);
  friend ExprMatrix operator+(ExprMatrix a, const ExprMatrix& b) { return a += b; }
  friend ExprMatrix operator-(ExprMatrix a, const ExprMatrix& b) { return a -= b; }
  friend ExprMatrix operator*(const ExprMatrix& a, const ExprMatrix& b);
  ExprMatrix scaled(const Expr& c) const;
  ExprMatrix transposed() const;

  /// Entry-wise substitution (see Expr::substitute).
  ExprMatrix substitute(std::span<const Expr> values) const;
  /// Entries evaluated at a rational point, kept as constant Exprs.
  ExprMatrix at_point(std::span<const mpq_class> point) const;
  bool is_zero() const;

  friend bool operator==(const ExprMatrix&, const ExprMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t nvars_ = 0;
  std::vector<Expr> data_;
};

Expr trace(const ExprMatrix& m);
/// Fraction-free (Bareiss) elimination after clearing row denominators.
Expr det(const ExprMatrix& m);
/// Fraction-free Gauss-Jordan; throws SingularMatrixError when det = 0.
ExprMatrix inverse(const ExprMatrix& m);
/// X with m X = rhs, by the same elimination run on [m | rhs].
ExprMatrix solve(const ExprMatrix& m, const ExprMatrix& rhs);

/// Polynomial c0 + c1 t + ... + cd t^d in a formal indeterminate t with
/// Expr coefficients. Zero high coefficients are trimmed.
class UniPoly {
 public:
  explicit UniPoly(std::size_t nvars = 0) : nvars_(nvars) {}
  explicit UniPoly(std::vector<Expr> coeffs);

  std::size_t nvars() const { return nvars_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  Expr coeff(std::size_t i) const;
  const Expr& leading() const { return coeffs_.back(); }
  const std::vector<Expr>& coeffs() const { return coeffs_; }

  Expr eval(const Expr& t) const;
  /// p(a t + b).
  UniPoly compose_linear(const Expr& a, const Expr& b) const;

  UniPoly& operator+=(const UniPoly& o);
  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b);

  friend bool operator==(const UniPoly&, const UniPoly&) = default;

 private:
  void trim();

  std::size_t nvars_;
  std::vector<Expr> coeffs_;
};

/// f(t) = det(M - t I), computed by Faddeev-LeVerrier.
UniPoly char_poly(const ExprMatrix& m);

/// sigma_1..sigma_n with f(t) = (-t)^n + sum_s sigma_s (-t)^(n-s).
std::vector<Expr> symmetric_functions(const UniPoly& f);

/// Rows 0..deg g-1 carry f's coefficients (highest first), the remaining
/// rows carry g's. det of this matrix is Res(f, g) = lc(f)^deg g *
/// lc(g)^deg f * prod (alpha_i - beta_j), so Res(t - a, t - b) = a - b.
ExprMatrix sylvester_matrix(const UniPoly& f, const UniPoly& g);
Expr sylvester_resultant(const UniPoly& f, const UniPoly& g);

/// eps(mu) = 2^(-n^2) f(mu) Res_t[f(mu - t), f(t + mu)], the square of the
/// characteristic polynomial of the symmetric-form operator built from the
/// matrix whose characteristic polynomial is f.
UniPoly epsilon_poly(const UniPoly& f, std::size_t n);

/// Horner evaluation of p at a square matrix.
ExprMatrix poly_of_operator(const UniPoly& p, const ExprMatrix& m);

}  // namespace diffred
