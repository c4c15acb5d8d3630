#include "diffred/geometry.hpp"

#include <algorithm>

#include "diffred/errors.hpp"

namespace diffred {

namespace {

constexpr std::uint64_t kDetProbeSeed = 0x6a09e667f3bcc908ULL;

// det(m) not identically zero: a nonzero value at a random point decides
// quickly; otherwise fall back to the exact determinant.
bool determinant_vanishes(const ExprMatrix& m) {
  for (const auto& pt : random_points(m.nvars(), 3, kDetProbeSeed)) {
    try {
      if (!det(m.at_point(pt)).is_zero()) return false;
    } catch (const PoleError&) {
    }
  }
  return det(m).is_zero();
}

std::vector<Expr> target_substitution(const PointTransform& phi) {
  std::vector<Expr> values;
  for (std::size_t v = 0; v < phi.nvars(); ++v) {
    values.push_back(v < phi.dim() ? (*phi.inverse())[v] : Expr::variable(phi.nvars(), v));
  }
  return values;
}

}  // namespace

OperatorField::OperatorField(ExprMatrix components) : m_(std::move(components)) {
  if (!m_.is_square() || m_.rows() == 0) throw DimensionError("operator field must be square");
  if (m_.rows() > m_.nvars()) throw DimensionError("fewer variables than the dimension");
  if (determinant_vanishes(m_)) throw SingularMatrixError("det A is identically zero");
}

Connection::Connection(std::size_t n, std::size_t nvars)
    : n_(n), nvars_(nvars), c_(n * n * n, Expr(nvars)) {}

Connection Connection::from_components(std::size_t n, std::vector<Expr> components,
                                       Asymmetry mode) {
  if (components.size() != n * n * n) throw DimensionError("connection needs n^3 components");
  const std::size_t nv = components.empty() ? 0 : components[0].nvars();
  Connection c(n, nv);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const Expr& a = components[(k * n + i) * n + j];
        const Expr& b = components[(k * n + j) * n + i];
        if (a == b) {
          c.set(k, i, j, a);
        } else if (mode == Asymmetry::kSymmetrize) {
          c.set(k, i, j, (a + b).scaled(mpq_class(1, 2)));
        } else {
          throw InputError("connection component (" + std::to_string(k + 1) + "," +
                           std::to_string(i + 1) + "," + std::to_string(j + 1) +
                           ") is not symmetric in its lower indices");
        }
      }
    }
  }
  return c;
}

void Connection::set(std::size_t k, std::size_t i, std::size_t j, const Expr& value) {
  if (value.nvars() != nvars_) throw DimensionError("connection component from another ring");
  c_[(k * n_ + i) * n_ + j] = value;
  c_[(k * n_ + j) * n_ + i] = value;
}

bool Connection::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Expr& e) { return e.is_zero(); });
}

PointTransform::PointTransform(std::vector<Expr> forward, std::optional<std::vector<Expr>> inverse)
    : forward_(std::move(forward)), inverse_(std::move(inverse)) {
  const std::size_t n = forward_.size();
  if (n == 0) throw DimensionError("empty point transform");
  const std::size_t nv = forward_[0].nvars();
  if (n > nv) throw DimensionError("fewer variables than the dimension");
  if (inverse_ && inverse_->size() != n) throw DimensionError("inverse map has the wrong length");
  t_ = ExprMatrix(n, n, nv);
  for (std::size_t m = 0; m < n; ++m) {
    if (forward_[m].nvars() != nv) throw DimensionError("transform components from different rings");
    for (std::size_t p = 0; p < n; ++p) t_(m, p) = forward_[m].derivative(p);
  }
  try {
    s_ = diffred::inverse(t_);
  } catch (const SingularMatrixError&) {
    throw SingularMatrixError("Jacobian of the point transform is singular");
  }
}

Expr PointTransform::to_target(const Expr& e) const {
  if (!inverse_) return e;
  const auto values = target_substitution(*this);
  return e.substitute(values);
}

PointTransform PointTransform::inverted() const {
  if (!inverse_) throw Error("point transform has no inverse");
  return PointTransform(*inverse_, forward_);
}

SymPairIndex::SymPairIndex(std::size_t n) : n_(n) {
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) pairs_.emplace_back(i, j);
  }
}

std::size_t SymPairIndex::index(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return j * (j + 1) / 2 + i;
}

LambdaTensor build_lambda(const OperatorField& a) {
  const std::size_t n = a.dim();
  const std::size_t nv = a.nvars();
  const mpq_class quarter(1, 4);
  std::vector<Expr> data(n * n * n * n, Expr(nv));
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          Expr s(nv);
          if (q == j) s += a(p, i);
          if (q == i) s += a(p, j);
          if (p == j) s += a(q, i);
          if (p == i) s += a(q, j);
          data[((p * n + q) * n + i) * n + j] = s.scaled(quarter);
        }
      }
    }
  }
  return LambdaTensor(n, std::move(data));
}

SymOperator lambda_sym_matrix(const LambdaTensor& lambda, const SymPairIndex& idx) {
  const std::size_t big = idx.size();
  const std::size_t nv = lambda(0, 0, 0, 0).nvars();
  ExprMatrix m(big, big, nv);
  for (std::size_t row = 0; row < big; ++row) {
    const auto [i, j] = idx.pair(row);
    for (std::size_t col = 0; col < big; ++col) {
      const auto [p, q] = idx.pair(col);
      const Expr& l = lambda(p, q, i, j);
      m(row, col) = p < q ? l.scaled(2) : l;
    }
  }
  return SymOperator{idx, std::move(m)};
}

SymOperator lambda_sym_matrix(const OperatorField& a) {
  return lambda_sym_matrix(build_lambda(a), SymPairIndex(a.dim()));
}

OperatorField transform_operator(const OperatorField& a, const PointTransform& phi) {
  if (a.dim() != phi.dim() || a.nvars() != phi.nvars()) {
    throw DimensionError("operator field and transform disagree on dimension");
  }
  ExprMatrix out = phi.jacobian() * a.matrix() * phi.inverse_jacobian();
  if (phi.inverse()) out = out.substitute(target_substitution(phi));
  return OperatorField(std::move(out));
}

Connection transform_connection(const Connection& gamma, const PointTransform& phi) {
  const std::size_t n = gamma.dim();
  if (n != phi.dim() || gamma.nvars() != phi.nvars()) {
    throw DimensionError("connection and transform disagree on dimension");
  }
  const std::size_t nv = gamma.nvars();
  const ExprMatrix& t = phi.jacobian();
  const ExprMatrix& s = phi.inverse_jacobian();
  // u^m_ij = T^m_k G^k_ij - dT^m_i/dy^j
  std::vector<Expr> u(n * n * n, Expr(nv));
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        Expr acc = -t(m, i).derivative(j);
        for (std::size_t k = 0; k < n; ++k) {
          if (!gamma(k, i, j).is_zero()) acc += t(m, k) * gamma(k, i, j);
        }
        u[(m * n + i) * n + j] = acc;
        u[(m * n + j) * n + i] = acc;
      }
    }
  }
  Connection out(n, nv);
  const bool to_target = phi.inverse().has_value();
  const auto values = to_target ? target_substitution(phi) : std::vector<Expr>{};
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p; q < n; ++q) {
        Expr acc(nv);
        for (std::size_t i = 0; i < n; ++i) {
          if (s(i, p).is_zero()) continue;
          for (std::size_t j = 0; j < n; ++j) {
            const Expr& uij = u[(m * n + i) * n + j];
            if (uij.is_zero() || s(j, q).is_zero()) continue;
            acc += s(i, p) * s(j, q) * uij;
          }
        }
        out.set(m, p, q, to_target ? acc.substitute(values) : acc);
      }
    }
  }
  return out;
}

Connection theta_from_transform(const PointTransform& phi) {
  const std::size_t n = phi.dim();
  const std::size_t nv = phi.nvars();
  const ExprMatrix& t = phi.jacobian();
  const ExprMatrix& s = phi.inverse_jacobian();
  Connection theta(n, nv);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p; q < n; ++q) {
        Expr acc(nv);
        for (std::size_t m = 0; m < n; ++m) {
          if (s(r, m).is_zero()) continue;
          const Expr second = t(m, p).derivative(q);
          if (!second.is_zero()) acc += s(r, m) * second;
        }
        theta.set(r, p, q, acc);
      }
    }
  }
  return theta;
}

Connection diffusion_connection(const OperatorField& a) {
  const std::size_t n = a.dim();
  const std::size_t nv = a.nvars();
  const ExprMatrix b = inverse(a.matrix());
  Connection g(n, nv);
  const mpq_class half(1, 2);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p; q < n; ++q) {
        Expr acc(nv);
        for (std::size_t s = 0; s < n; ++s) {
          if (b(m, s).is_zero()) continue;
          const Expr sym = a(s, p).derivative(q) + a(s, q).derivative(p);
          if (!sym.is_zero()) acc += b(m, s) * sym;
        }
        g.set(m, p, q, acc.scaled(half));
      }
    }
  }
  return g;
}

}  // namespace diffred
