#pragma once

// Sparse multivariate polynomials with arbitrary-precision integer
// coefficients. Terms are kept sorted in descending graded-lexicographic
// order with no zero coefficients, so structural equality is equality of
// polynomials.

#include <gmpxx.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace diffred {

inline constexpr std::size_t kMaxVars = 10;

struct Monomial {
  std::array<std::uint16_t, kMaxVars> exp{};
  std::uint32_t degree = 0;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Graded lexicographic order; variable 0 is the most significant.
inline bool grlex_greater(const Monomial& a, const Monomial& b) {
  if (a.degree != b.degree) return a.degree > b.degree;
  return a.exp > b.exp;
}

Monomial operator*(const Monomial& a, const Monomial& b);
bool divides(const Monomial& d, const Monomial& m);
/// m / d; requires divides(d, m).
Monomial quotient(const Monomial& m, const Monomial& d);

struct Term {
  Monomial mono;
  mpz_class coeff;
};

class Poly {
 public:
  explicit Poly(std::size_t nvars = 0);

  static Poly constant(std::size_t nvars, const mpz_class& c);
  static Poly variable(std::size_t nvars, std::size_t index);
  /// Sorts, merges equal monomials and drops zeros.
  static Poly from_terms(std::size_t nvars, std::vector<Term> terms);

  std::size_t nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_one() const;
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& leading() const { return terms_.front(); }
  /// Value of a constant polynomial.
  mpz_class constant_value() const;

  unsigned degree(std::size_t var) const;
  unsigned total_degree() const;
  bool depends_on(std::size_t var) const;
  /// Positive gcd of the coefficients (0 for the zero polynomial).
  mpz_class content() const;
  mpz_class max_norm() const;
  /// Sign of the leading coefficient.
  int sign() const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);

  Poly scaled(const mpz_class& c) const;
  Poly times_monomial(const Monomial& m, const mpz_class& c) const;
  /// Coefficient-wise exact division; throws if some coefficient is not divisible.
  Poly divided_by(const mpz_class& c) const;
  /// Quotient when `d` divides this polynomial exactly in Z[vars], else nullopt.
  std::optional<Poly> divide_exact(const Poly& d) const;
  Poly pow(unsigned e) const;

  Poly derivative(std::size_t var) const;
  /// Coefficients with respect to `var`, indexed by power; `var` removed.
  std::vector<Poly> coefficients_in(std::size_t var) const;
  /// Leading coefficient with respect to `var`.
  Poly lead_coeff_in(std::size_t var) const;
  /// Substitute an integer for one variable.
  Poly evaluate_var(std::size_t var, const mpz_class& value) const;
  /// Substitute polynomials for every variable; all values share one variable count.
  Poly substitute(std::span<const Poly> values) const;

  mpq_class evaluate(std::span<const mpq_class> point) const;
  double evaluate(std::span<const double> point) const;

  /// Same polynomial viewed in a ring with `n` variables. Shrinking requires
  /// the dropped variables to be unused.
  Poly with_nvars(std::size_t n) const;

  std::string to_string(std::span<const std::string> names) const;

  friend bool operator==(const Poly& a, const Poly& b);

 private:
  std::size_t nvars_;
  std::vector<Term> terms_;
};

/// Greatest common divisor in Z[vars], including the integer content, with a
/// positive leading coefficient. gcd(0, 0) = 0.
Poly gcd(const Poly& a, const Poly& b);

namespace detail {
// Exposed for tests: the two gcd strategies behind `gcd`.
std::optional<Poly> gcd_heuristic(const Poly& a, const Poly& b);
Poly gcd_prs(const Poly& a, const Poly& b);
}  // namespace detail

}  // namespace diffred
