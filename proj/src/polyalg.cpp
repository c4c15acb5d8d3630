#include "diffred/polyalg.hpp"

#include <algorithm>
#include <utility>

#include "diffred/errors.hpp"

namespace diffred {

namespace {

void require_square(const ExprMatrix& m, const char* what) {
  if (!m.is_square()) {
    throw DimensionError(std::string(what) + " needs a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

Poly exact(const Poly& a, const Poly& b) {
  auto q = a.divide_exact(b);
  if (!q) throw Error("internal: fraction-free elimination lost exactness");
  return std::move(*q);
}

Poly lcm(const Poly& a, const Poly& b) {
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  return exact(a, gcd(a, b)) * b;
}

using PolyMatrix = std::vector<std::vector<Poly>>;

// Scale every row by the lcm of its denominators. Returns the polynomial
// matrix and the per-row multipliers.
std::pair<PolyMatrix, std::vector<Poly>> clear_denominators(const ExprMatrix& m) {
  PolyMatrix out(m.rows());
  std::vector<Poly> scale(m.rows(), Poly::constant(m.nvars(), 1));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) scale[i] = lcm(scale[i], m(i, j).denominator());
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Expr& e = m(i, j);
      out[i].push_back(e.denominator().is_one() && scale[i].is_one()
                           ? e.numerator()
                           : e.numerator() * exact(scale[i], e.denominator()));
    }
  }
  return {std::move(out), std::move(scale)};
}

// Smallest nonzero candidate in column k at or below row k.
std::optional<std::size_t> choose_pivot(const PolyMatrix& a, std::size_t k) {
  std::optional<std::size_t> best;
  for (std::size_t i = k; i < a.size(); ++i) {
    if (a[i][k].is_zero()) continue;
    if (!best || a[i][k].size() < a[*best][k].size()) best = i;
  }
  return best;
}

}  // namespace

ExprMatrix::ExprMatrix(std::size_t rows, std::size_t cols, std::size_t nvars)
    : rows_(rows), cols_(cols), nvars_(nvars), data_(rows * cols, Expr(nvars)) {}

ExprMatrix ExprMatrix::identity(std::size_t n, std::size_t nvars) {
  ExprMatrix m(n, n, nvars);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Expr::constant(nvars, 1);
  return m;
}

ExprMatrix ExprMatrix::from_rows(const std::vector<std::vector<Expr>>& rows) {
  if (rows.empty() || rows[0].empty()) throw DimensionError("empty matrix");
  ExprMatrix m(rows.size(), rows[0].size(), rows[0][0].nvars());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_) throw DimensionError("ragged matrix rows");
    for (std::size_t j = 0; j < m.cols_; ++j) {
      if (rows[i][j].nvars() != m.nvars_) throw DimensionError("matrix entries from different rings");
      m(i, j) = rows[i][j];
    }
  }
  return m;
}

ExprMatrix& ExprMatrix::operator+=(const ExprMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix sum shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

ExprMatrix& ExprMatrix::operator-=(const ExprMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix difference shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

ExprMatrix operator*(const ExprMatrix& a, const ExprMatrix& b) {
  if (a.cols_ != b.rows_) throw DimensionError("matrix product shape mismatch");
  ExprMatrix r(a.rows_, b.cols_, a.nvars_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t j = 0; j < b.cols_; ++j) {
      Expr acc(a.nvars_);
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero() || b(k, j).is_zero()) continue;
        acc += a(i, k) * b(k, j);
      }
      r(i, j) = std::move(acc);
    }
  }
  return r;
}

ExprMatrix ExprMatrix::scaled(const Expr& c) const {
  ExprMatrix r = *this;
  for (auto& e : r.data_) e *= c;
  return r;
}

ExprMatrix ExprMatrix::transposed() const {
  ExprMatrix r(cols_, rows_, nvars_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  }
  return r;
}

ExprMatrix ExprMatrix::substitute(std::span<const Expr> values) const {
  const std::size_t target = values.empty() ? nvars_ : values[0].nvars();
  ExprMatrix r(rows_, cols_, target);
  for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k].substitute(values);
  return r;
}

ExprMatrix ExprMatrix::at_point(std::span<const mpq_class> point) const {
  ExprMatrix r(rows_, cols_, nvars_);
  for (std::size_t k = 0; k < data_.size(); ++k) {
    r.data_[k] = Expr::constant(nvars_, data_[k].eval(point));
  }
  return r;
}

bool ExprMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Expr& e) { return e.is_zero(); });
}

Expr trace(const ExprMatrix& m) {
  require_square(m, "trace");
  Expr t(m.nvars());
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

Expr det(const ExprMatrix& m) {
  require_square(m, "det");
  const std::size_t n = m.rows();
  if (n == 0) return Expr::constant(m.nvars(), 1);
  auto [a, scale] = clear_denominators(m);
  Poly prev = Poly::constant(m.nvars(), 1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    auto p = choose_pivot(a, k);
    if (!p) return Expr(m.nvars());
    if (*p != k) {
      std::swap(a[*p], a[k]);
      std::swap(scale[*p], scale[k]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Poly v = a[k][k] * a[i][j] - a[i][k] * a[k][j];
        a[i][j] = prev.is_one() ? std::move(v) : exact(v, prev);
      }
      a[i][k] = Poly(m.nvars());
    }
    prev = a[k][k];
  }
  Poly d = a[n - 1][n - 1];
  if (negate) d = -d;
  Poly s = Poly::constant(m.nvars(), 1);
  for (const auto& f : scale) s *= f;
  return Expr::fraction(std::move(d), std::move(s));
}

ExprMatrix solve(const ExprMatrix& m, const ExprMatrix& rhs) {
  require_square(m, "solve");
  if (rhs.rows() != m.rows()) throw DimensionError("right-hand side has the wrong number of rows");
  const std::size_t n = m.rows();
  const std::size_t k_rhs = rhs.cols();
  const std::size_t nv = m.nvars();
  auto [a, scale] = clear_denominators(m);
  // Column c of the right-hand side is cleared by col_den[c]; row i of the
  // system was multiplied by scale[i], so the right block gets it too.
  std::vector<Poly> col_den(k_rhs, Poly::constant(nv, 1));
  for (std::size_t c = 0; c < k_rhs; ++c) {
    for (std::size_t i = 0; i < n; ++i) col_den[c] = lcm(col_den[c], rhs(i, c).denominator());
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k_rhs; ++c) {
      const Expr& e = rhs(i, c);
      if (e.is_zero()) {
        a[i].push_back(Poly(nv));
        continue;
      }
      Poly v = e.numerator() * exact(col_den[c], e.denominator());
      a[i].push_back(scale[i].is_one() ? std::move(v) : v * scale[i]);
    }
  }
  const std::size_t width = n + k_rhs;
  Poly prev = Poly::constant(nv, 1);
  for (std::size_t k = 0; k < n; ++k) {
    auto p = choose_pivot(a, k);
    if (!p) throw SingularMatrixError("matrix is singular");
    if (*p != k) std::swap(a[*p], a[k]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      for (std::size_t j = 0; j < width; ++j) {
        if (j == k) continue;
        Poly v = a[k][k] * a[i][j];
        if (!a[i][k].is_zero() && !a[k][j].is_zero()) v -= a[i][k] * a[k][j];
        a[i][j] = prev.is_one() ? std::move(v) : exact(v, prev);
      }
      a[i][k] = Poly(nv);
    }
    prev = a[k][k];
  }
  // Left block is now d*I; the right block is d times the solution of the
  // scaled system.
  ExprMatrix r(n, k_rhs, nv);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k_rhs; ++c) {
      r(i, c) = Expr::fraction(a[i][n + c], a[i][i] * col_den[c]);
    }
  }
  return r;
}

ExprMatrix inverse(const ExprMatrix& m) {
  require_square(m, "inverse");
  return solve(m, ExprMatrix::identity(m.rows(), m.nvars()));
}

UniPoly::UniPoly(std::vector<Expr> coeffs) : nvars_(coeffs.empty() ? 0 : coeffs[0].nvars()),
                                             coeffs_(std::move(coeffs)) {
  for (const auto& c : coeffs_) {
    if (c.nvars() != nvars_) throw DimensionError("polynomial coefficients from different rings");
  }
  trim();
}

void UniPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

Expr UniPoly::coeff(std::size_t i) const {
  return i < coeffs_.size() ? coeffs_[i] : Expr(nvars_);
}

Expr UniPoly::eval(const Expr& t) const {
  Expr acc(t.nvars());
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

UniPoly UniPoly::compose_linear(const Expr& a, const Expr& b) const {
  const UniPoly lin(std::vector<Expr>{b, a});
  UniPoly acc(a.nvars());
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * lin + UniPoly(std::vector<Expr>{*it});
  }
  return acc;
}

UniPoly& UniPoly::operator+=(const UniPoly& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size(), Expr(nvars_));
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  trim();
  return *this;
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero() || b.is_zero()) return UniPoly(a.is_zero() ? a.nvars_ : b.nvars_);
  std::vector<Expr> c(a.coeffs_.size() + b.coeffs_.size() - 1, Expr(a.nvars_));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return UniPoly(std::move(c));
}

UniPoly char_poly(const ExprMatrix& m) {
  require_square(m, "char_poly");
  const std::size_t n = m.rows();
  const std::size_t nv = m.nvars();
  // p(t) = det(t I - M) = sum c_k t^k, with c_n = 1.
  std::vector<Expr> c(n + 1, Expr(nv));
  c[n] = Expr::constant(nv, 1);
  ExprMatrix acc(n, n, nv);
  for (std::size_t k = 1; k <= n; ++k) {
    acc = m * acc;
    for (std::size_t i = 0; i < n; ++i) acc(i, i) += c[n - k + 1];
    c[n - k] = -trace(m * acc).scaled(mpq_class(1, static_cast<long>(k)));
  }
  if (n % 2 == 1) {
    for (auto& e : c) e = -e;
  }
  return UniPoly(std::move(c));
}

std::vector<Expr> symmetric_functions(const UniPoly& f) {
  const int n = f.degree();
  if (n < 1) throw DegreeError("characteristic polynomial must have positive degree");
  std::vector<Expr> sigma;
  for (int s = 1; s <= n; ++s) {
    Expr c = f.coeff(static_cast<std::size_t>(n - s));
    sigma.push_back((n - s) % 2 == 0 ? c : -c);
  }
  return sigma;
}

ExprMatrix sylvester_matrix(const UniPoly& f, const UniPoly& g) {
  if (f.degree() < 1 || g.degree() < 1) {
    throw DegreeError("resultant needs polynomials of positive degree");
  }
  const auto m = static_cast<std::size_t>(f.degree());
  const auto k = static_cast<std::size_t>(g.degree());
  ExprMatrix s(m + k, m + k, f.nvars());
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t i = 0; i <= m; ++i) s(r, r + i) = f.coeff(m - i);
  }
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t i = 0; i <= k; ++i) s(k + r, r + i) = g.coeff(k - i);
  }
  return s;
}

Expr sylvester_resultant(const UniPoly& f, const UniPoly& g) {
  return det(sylvester_matrix(f, g));
}

UniPoly epsilon_poly(const UniPoly& f, std::size_t n) {
  if (f.degree() != static_cast<int>(n)) {
    throw DegreeError("epsilon_poly expects a characteristic polynomial of degree " +
                      std::to_string(n));
  }
  const std::size_t nv = f.nvars();
  const std::size_t mu_index = nv;
  std::vector<Expr> lifted;
  for (const auto& c : f.coeffs()) lifted.push_back(c.with_nvars(nv + 1));
  const UniPoly F(std::move(lifted));
  const Expr mu = Expr::variable(nv + 1, mu_index);
  const Expr one = Expr::constant(nv + 1, 1);

  const Expr res = sylvester_resultant(F.compose_linear(-one, mu), F.compose_linear(one, mu));
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 2, n * n);
  const Expr eps = (F.eval(mu) * res).scaled(mpq_class(1, scale));
  if (eps.denominator().depends_on(mu_index)) {
    throw Error("internal: epsilon polynomial has a denominator in mu");
  }
  const Expr den = Expr::fraction(eps.denominator().with_nvars(nv),
                                  Poly::constant(nv, 1));
  std::vector<Expr> coeffs;
  for (const auto& c : eps.numerator().coefficients_in(mu_index)) {
    coeffs.push_back(Expr::polynomial(c.with_nvars(nv)) / den);
  }
  return UniPoly(std::move(coeffs));
}

ExprMatrix poly_of_operator(const UniPoly& p, const ExprMatrix& m) {
  require_square(m, "poly_of_operator");
  const std::size_t n = m.rows();
  ExprMatrix acc(n, n, m.nvars());
  for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) {
    acc = acc * m;
    for (std::size_t i = 0; i < n; ++i) acc(i, i) += *it;
  }
  return acc;
}

}  // namespace diffred
