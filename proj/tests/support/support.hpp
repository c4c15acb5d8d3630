#pragma once

// Helpers shared by the unit tests and the acceptance binary: seeded random
// generators, oracles that avoid the library's own algorithms, and the
// round-trip fixture generator.

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "diffred/expr.hpp"
#include "diffred/geometry.hpp"
#include "diffred/polyalg.hpp"

namespace testsupport {

using Rng = std::mt19937_64;
using QMatrix = std::vector<std::vector<mpq_class>>;

long uniform_int(Rng& rng, long lo, long hi);
/// num / den with num in [-num_max, num_max], den in [1, den_max].
mpq_class small_rational(Rng& rng, long num_max, long den_max);
mpq_class nonzero_rational(Rng& rng, long num_max, long den_max);

/// Random polynomial with `terms` monomials of total degree <= max_deg.
diffred::Expr random_poly(Rng& rng, std::size_t nvars, unsigned max_deg, int terms,
                          long coeff_max);

/// Sum over permutations; independent of elimination.
mpq_class leibniz_det(const QMatrix& m);
diffred::Expr leibniz_det(const diffred::ExprMatrix& m);

QMatrix q_identity(std::size_t n);
QMatrix q_mul(const QMatrix& a, const QMatrix& b);
diffred::ExprMatrix to_expr_matrix(const QMatrix& m, std::size_t nvars);

/// Product of random integer shears and a rational diagonal, with its exact
/// inverse assembled from the inverted factors.
struct RandomInvertible {
  QMatrix m, inv;
};
RandomInvertible random_invertible(Rng& rng, std::size_t n, bool unit_diagonal = false);

/// A = P diag(eigenvalues) P^-1 with distinct rational eigenvalues.
struct SpectrumFixture {
  diffred::ExprMatrix a;
  std::vector<mpq_class> eigenvalues;
};
SpectrumFixture simple_spectrum_matrix(Rng& rng, std::size_t n, std::size_t nvars);

/// Coefficients (low to high) of prod_i (root_i - mu).
std::vector<mpq_class> poly_from_roots(const std::vector<mpq_class>& roots);

/// A diffusion-form system in variables u, pushed through
/// u = phi(y) = L Q(y - y0) + u0 with Q a quadratic triangular shear, so the
/// base point y0 maps to u0. The diffusion operator stays close to a diagonal
/// with distinct positive entries, so the gate passes near the base point.
struct RoundTrip {
  std::size_t n = 0;
  diffred::VarSet u_vars, y_vars;
  diffred::ExprMatrix a_diffusion;   // over u
  std::vector<mpq_class> base_u;
  std::vector<mpq_class> base_y;
  std::vector<diffred::Expr> phi;    // u^i as functions of y
  std::vector<diffred::Expr> phi_inv;  // y^m as functions of u
  std::string problem_text;          // the system in u
  std::string transform_text;        // new variables y
};
RoundTrip make_round_trip(Rng& rng, std::size_t n);

/// theta of the change y -> u, i.e. S d^2u/dy dy expressed in y.
diffred::Connection expected_theta(const RoundTrip& rt);

/// Writes `text` under a per-process scratch directory and returns the path.
std::string write_temp(const std::string& name, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace testsupport
