#include "support.hpp"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "diffred/criterion.hpp"
#include "diffred/problem.hpp"

namespace testsupport {

using diffred::Expr;
using diffred::ExprMatrix;

long uniform_int(Rng& rng, long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(rng);
}

mpq_class frac(long num, long den) {
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

mpq_class small_rational(Rng& rng, long num_max, long den_max) {
  return frac(uniform_int(rng, -num_max, num_max), uniform_int(rng, 1, den_max));
}

mpq_class nonzero_rational(Rng& rng, long num_max, long den_max) {
  for (;;) {
    mpq_class q = small_rational(rng, num_max, den_max);
    if (q != 0) return q;
  }
}

Expr random_poly(Rng& rng, std::size_t nvars, unsigned max_deg, int terms, long coeff_max) {
  Expr sum(nvars);
  for (int t = 0; t < terms; ++t) {
    Expr term = Expr::constant(nvars, mpq_class(uniform_int(rng, -coeff_max, coeff_max)));
    const auto deg = static_cast<unsigned>(uniform_int(rng, 0, max_deg));
    for (unsigned d = 0; d < deg && nvars > 0; ++d) {
      term *= Expr::variable(nvars, static_cast<std::size_t>(uniform_int(rng, 0, nvars - 1)));
    }
    sum += term;
  }
  return sum;
}

namespace {

int permutation_sign(const std::vector<std::size_t>& p) {
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

}  // namespace

mpq_class leibniz_det(const QMatrix& m) {
  std::vector<std::size_t> p(m.size());
  std::iota(p.begin(), p.end(), 0);
  mpq_class total = 0;
  do {
    mpq_class prod = permutation_sign(p);
    for (std::size_t i = 0; i < p.size(); ++i) prod *= m[i][p[i]];
    total += prod;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

Expr leibniz_det(const ExprMatrix& m) {
  std::vector<std::size_t> p(m.rows());
  std::iota(p.begin(), p.end(), 0);
  Expr total(m.nvars());
  do {
    Expr prod = Expr::constant(m.nvars(), permutation_sign(p));
    for (std::size_t i = 0; i < p.size(); ++i) prod *= m(i, p[i]);
    total += prod;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

QMatrix q_identity(std::size_t n) {
  QMatrix m(n, std::vector<mpq_class>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

QMatrix q_mul(const QMatrix& a, const QMatrix& b) {
  QMatrix c(a.size(), std::vector<mpq_class>(b[0].size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

ExprMatrix to_expr_matrix(const QMatrix& m, std::size_t nvars) {
  ExprMatrix e(m.size(), m[0].size(), nvars);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[0].size(); ++j) e(i, j) = Expr::constant(nvars, m[i][j]);
  return e;
}

RandomInvertible random_invertible(Rng& rng, std::size_t n, bool unit_diagonal) {
  RandomInvertible r{q_identity(n), q_identity(n)};
  if (!unit_diagonal) {
    static const mpq_class choices[] = {1, -1, 2, -2, mpq_class(1, 2), 3};
    QMatrix d = q_identity(n), dinv = q_identity(n);
    for (std::size_t i = 0; i < n; ++i) {
      d[i][i] = choices[uniform_int(rng, 0, 5)];
      dinv[i][i] = 1 / d[i][i];
    }
    r.m = d;
    r.inv = dinv;
  }
  const int shears = n > 1 ? static_cast<int>(2 * n) : 0;
  for (int s = 0; s < shears; ++s) {
    const auto i = static_cast<std::size_t>(uniform_int(rng, 0, n - 1));
    auto j = static_cast<std::size_t>(uniform_int(rng, 0, n - 2));
    if (j >= i) ++j;
    const long k = uniform_int(rng, -2, 2);
    QMatrix e = q_identity(n), einv = q_identity(n);
    e[i][j] = k;
    einv[i][j] = -k;
    r.m = q_mul(r.m, e);
    r.inv = q_mul(einv, r.inv);
  }
  return r;
}

SpectrumFixture simple_spectrum_matrix(Rng& rng, std::size_t n, std::size_t nvars) {
  std::vector<mpq_class> lambda;
  while (lambda.size() < n) {
    mpq_class x = nonzero_rational(rng, 6, 3);
    if (std::find(lambda.begin(), lambda.end(), x) == lambda.end()) lambda.push_back(x);
  }
  const RandomInvertible p = random_invertible(rng, n);
  QMatrix d(n, std::vector<mpq_class>(n, 0));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = lambda[i];
  return {to_expr_matrix(q_mul(q_mul(p.m, d), p.inv), nvars), lambda};
}

std::vector<mpq_class> poly_from_roots(const std::vector<mpq_class>& roots) {
  std::vector<mpq_class> c{1};
  for (const auto& r : roots) {
    // multiply by (r - mu)
    std::vector<mpq_class> next(c.size() + 1, 0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += r * c[i];
      next[i + 1] -= c[i];
    }
    c = std::move(next);
  }
  return c;
}

RoundTrip make_round_trip(Rng& rng, std::size_t n) {
  RoundTrip rt;
  rt.n = n;
  rt.u_vars = diffred::VarSet::numbered("u", n);
  rt.y_vars = diffred::VarSet::numbered("y", n);

  // Diffusion operator: distinct positive diagonal plus small polynomial terms.
  std::vector<long> diag{1, 2, 3, 4};
  std::shuffle(diag.begin(), diag.end(), rng);
  for (;;) {
    rt.a_diffusion = ExprMatrix(n, n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        Expr e = Expr::constant(n, i == j ? mpq_class(diag[i]) : mpq_class(0));
        for (std::size_t v = 0; v < n; ++v) {
          e += Expr::variable(n, v).scaled(frac(uniform_int(rng, -1, 1), 16));
        }
        if (n == 2 && uniform_int(rng, 0, 2) == 0) {
          e += (Expr::variable(n, 0) * Expr::variable(n, 1)).scaled(frac(uniform_int(rng, -1, 1), 32));
        }
        rt.a_diffusion(i, j) = e;
      }
    }
    rt.base_u.clear();
    for (std::size_t i = 0; i < n; ++i) rt.base_u.push_back(small_rational(rng, 2, 2));
    const diffred::OperatorField a(rt.a_diffusion);
    if (diffred::nondegeneracy_gate(a, rt.base_u).passed) break;
  }

  // Quadratic shear coefficients c[k][i][j] for k < i <= j.
  std::vector<std::vector<std::vector<mpq_class>>> c(
      n, std::vector<std::vector<mpq_class>>(n, std::vector<mpq_class>(n, 0)));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) c[k][i][j] = frac(uniform_int(rng, -2, 2), 2);
  if (n > 1 && c[0][n - 1][n - 1] == 0) c[0][n - 1][n - 1] = 1;
  const RandomInvertible l = random_invertible(rng, n);
  for (std::size_t i = 0; i < n; ++i) rt.base_y.push_back(small_rational(rng, 2, 2));

  // u = L Q(y - y0) + u0, over y, so that y0 maps to the base point u0.
  std::vector<Expr> centred;
  for (std::size_t k = 0; k < n; ++k)
    centred.push_back(Expr::variable(n, k) - Expr::constant(n, rt.base_y[k]));
  std::vector<Expr> q;
  for (std::size_t k = 0; k < n; ++k) {
    Expr e = centred[k];
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) e += (centred[i] * centred[j]).scaled(c[k][i][j]);
    q.push_back(e);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Expr e = Expr::constant(n, rt.base_u[i]);
    for (std::size_t k = 0; k < n; ++k) e += q[k].scaled(l.m[i][k]);
    rt.phi.push_back(e);
  }

  // y = y0 + Q^-1(L^-1 (u - u0)), over u, solved from the last component up.
  std::vector<Expr> z;
  for (std::size_t k = 0; k < n; ++k) {
    Expr e(n);
    for (std::size_t i = 0; i < n; ++i)
      e += (Expr::variable(n, i) - Expr::constant(n, rt.base_u[i])).scaled(l.inv[k][i]);
    z.push_back(e);
  }
  std::vector<Expr> w(n, Expr(n));
  for (std::size_t k = n; k-- > 0;) {
    w[k] = z[k];
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) w[k] -= (w[i] * w[j]).scaled(c[k][i][j]);
  }
  for (std::size_t k = 0; k < n; ++k) rt.phi_inv.push_back(w[k] + Expr::constant(n, rt.base_y[k]));

  const diffred::OperatorField a(rt.a_diffusion);
  rt.problem_text = diffred::write_problem_text(diffred::to_problem_file(
      rt.u_vars, a, diffred::diffusion_connection(a), rt.base_u));

  std::ostringstream t;
  t << "[variables]\nnames = ";
  for (std::size_t i = 0; i < n; ++i) t << (i ? ", " : "") << rt.y_vars.name(i);
  t << "\n\n[forward]\n";
  for (std::size_t m = 0; m < n; ++m) t << m + 1 << " = \"" << rt.phi_inv[m].to_string(rt.u_vars) << "\"\n";
  t << "\n[inverse]\n";
  for (std::size_t i = 0; i < n; ++i) t << i + 1 << " = \"" << rt.phi[i].to_string(rt.y_vars) << "\"\n";
  rt.transform_text = t.str();
  return rt;
}

diffred::Connection expected_theta(const RoundTrip& rt) {
  return diffred::theta_from_transform(diffred::PointTransform(rt.phi));
}

std::string write_temp(const std::string& name, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("diffred-test-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream f(p, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace testsupport
