#include "diffred/criterion.hpp"

#include "diffred/errors.hpp"

namespace diffred {

const char* to_string(Status s) {
  switch (s) {
    case Status::kReducible: return "Reducible";
    case Status::kNotReducible: return "NotReducible";
    case Status::kDegenerate: return "Degenerate";
  }
  return "?";
}

const char* to_string(DRoute r) {
  switch (r) {
    case DRoute::kSolve: return "solve";
    case DRoute::kCayley: return "cayley";
    case DRoute::kBoth: return "both";
  }
  return "?";
}

namespace {

void require_compatible(const OperatorField& a, const Connection& gamma) {
  if (a.dim() != gamma.dim() || a.nvars() != gamma.nvars()) {
    throw DimensionError("operator field and connection have different shapes");
  }
}

Expr resultant_of(const UniPoly& f) {
  const std::size_t nv = f.nvars();
  return sylvester_resultant(f, f.compose_linear(Expr::constant(nv, -1), Expr(nv)));
}

}  // namespace

Connection rhs_w(const OperatorField& a, const Connection& gamma) {
  require_compatible(a, gamma);
  const std::size_t n = a.dim();
  Connection w(n, a.nvars());
  const mpq_class half(1, 2);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        Expr acc = (a(r, i).derivative(j) + a(r, j).derivative(i)).scaled(-half);
        for (std::size_t k = 0; k < n; ++k) {
          if (!gamma(k, i, j).is_zero()) acc += a(r, k) * gamma(k, i, j);
        }
        w.set(r, i, j, acc);
      }
    }
  }
  return w;
}

Expr gate_resultant(const ExprMatrix& a) { return resultant_of(char_poly(a)); }

GateReport nondegeneracy_gate(const OperatorField& a, std::span<const mpq_class> base,
                              const ProbeOptions& probe) {
  if (base.size() != a.nvars()) throw DimensionError("base point has the wrong length");
  const std::size_t n = a.dim();
  GateReport g;

  const UniPoly f = char_poly(a.matrix());
  g.sigma = symmetric_functions(f);
  g.det_a = g.sigma[n - 1];
  if (n == 2) g.trace = g.sigma[0];

  // Everything below is polynomial in the entries of A, so it can be
  // evaluated on the constant matrix A(base).
  const UniPoly f0 = char_poly(a.matrix().at_point(base));
  for (const auto& s : symmetric_functions(f0)) g.sigma_values.push_back(s.constant_value());
  g.det_value = g.sigma_values[n - 1];
  g.resultant_value = resultant_of(f0).constant_value();
  if (n == 2) g.trace_value = g.sigma_values[0];

  g.det_test = g.det_value != 0;
  g.resultant_test = g.det_test && g.resultant_value != 0;
  if (n == 2) g.trace_test = g.det_test && *g.trace_value != 0;
  if (g.trace_test && *g.trace_test != g.resultant_test) {
    throw Error("internal: trace test and resultant test disagree");
  }
  g.passed = g.resultant_test;
  if (g.passed) return g;

  if (!g.det_test) {
    g.witness = "det";
    g.witness_expr = g.det_a;
    g.witness_value = g.det_value;
  } else if (n == 2) {
    g.witness = "trace";
    g.witness_expr = *g.trace;
    g.witness_value = *g.trace_value;
  } else {
    g.witness = "resultant";
    g.witness_expr = resultant_of(f);
    g.witness_value = g.resultant_value;
  }
  g.witness_identically_zero = is_zero(*g.witness_expr, probe);
  return g;
}

SymOperator d_tensor_solve(const OperatorField& a) {
  SymOperator l = lambda_sym_matrix(a);
  try {
    l.matrix = inverse(l.matrix);
  } catch (const SingularMatrixError&) {
    throw SingularMatrixError("Lambda_sym is singular identically; the system is degenerate");
  }
  return l;
}

SymOperator d_tensor_cayley(const OperatorField& a) {
  SymOperator l = lambda_sym_matrix(a);
  const UniPoly eps = epsilon_poly(char_poly(a.matrix()), a.dim());
  const Expr e0 = eps.coeff(0);
  if (e0.is_zero()) throw SingularMatrixError("eps_0 vanishes identically; the system is degenerate");
  const Expr inv0 = e0.reciprocal();
  std::vector<Expr> q;
  for (int i = 1; i <= eps.degree(); ++i) q.push_back(-(eps.coeff(i) * inv0));
  l.matrix = poly_of_operator(UniPoly(std::move(q)), l.matrix);
  return l;
}

SymOperator d_tensor_cayley_n2(const OperatorField& a) {
  if (a.dim() != 2) throw DimensionError("closed-form inverse is for n = 2 only");
  const std::size_t nv = a.nvars();
  SymOperator l = lambda_sym_matrix(a);
  const Expr s1 = trace(a.matrix());
  const Expr s2 = det(a.matrix());
  const Expr denom = s1 * s2;
  if (denom.is_zero()) throw SingularMatrixError("s1 s2 vanishes identically; the system is degenerate");
  const ExprMatrix& m = l.matrix;
  ExprMatrix r = (m * m).scaled(Expr::constant(nv, 2));
  r -= m.scaled(s1.scaled(3));
  r += ExprMatrix::identity(m.rows(), nv).scaled(s1 * s1 + s2.scaled(2));
  l.matrix = r.scaled(denom.reciprocal());
  return l;
}

Expr d_component(const SymOperator& d, std::size_t i, std::size_t j, std::size_t p,
                 std::size_t q) {
  const Expr& e = d.matrix(d.index.index(p, q), d.index.index(i, j));
  return i == j ? e : e.scaled(mpq_class(1, 2));
}

Connection apply_d(const SymOperator& d, const Connection& w) {
  const std::size_t n = w.dim();
  const std::size_t big = d.index.size();
  Connection theta(n, w.nvars());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t row = 0; row < big; ++row) {
      Expr acc(w.nvars());
      for (std::size_t col = 0; col < big; ++col) {
        const auto [i, j] = d.index.pair(col);
        if (!w(r, i, j).is_zero() && !d.matrix(row, col).is_zero()) {
          acc += d.matrix(row, col) * w(r, i, j);
        }
      }
      const auto [p, q] = d.index.pair(row);
      theta.set(r, p, q, acc);
    }
  }
  return theta;
}

Connection solve_theta(const OperatorField& a, const Connection& gamma, DRoute route) {
  const Connection w = rhs_w(a, gamma);
  const std::size_t n = a.dim();
  auto by_solve = [&] {
    const SymOperator l = lambda_sym_matrix(a);
    ExprMatrix rhs(l.index.size(), n, a.nvars());
    for (std::size_t row = 0; row < l.index.size(); ++row) {
      const auto [i, j] = l.index.pair(row);
      for (std::size_t r = 0; r < n; ++r) rhs(row, r) = w(r, i, j);
    }
    ExprMatrix x;
    try {
      x = solve(l.matrix, rhs);
    } catch (const SingularMatrixError&) {
      throw SingularMatrixError("Lambda_sym is singular identically; the system is degenerate");
    }
    Connection theta(n, a.nvars());
    for (std::size_t row = 0; row < l.index.size(); ++row) {
      const auto [p, q] = l.index.pair(row);
      for (std::size_t r = 0; r < n; ++r) theta.set(r, p, q, x(row, r));
    }
    return theta;
  };
  switch (route) {
    case DRoute::kSolve:
      return by_solve();
    case DRoute::kCayley:
      return apply_d(d_tensor_cayley(a), w);
    case DRoute::kBoth: {
      Connection t1 = by_solve();
      if (!(apply_d(d_tensor_cayley(a), w) == t1)) {
        throw Error("internal: solve and Cayley-Hamilton routes disagree");
      }
      return t1;
    }
  }
  throw Error("unknown route");
}

Connection theta_residual(const OperatorField& a, const Connection& gamma,
                          const Connection& theta) {
  require_compatible(a, gamma);
  const std::size_t n = a.dim();
  const std::size_t nv = a.nvars();
  const ExprMatrix b = inverse(a.matrix());
  const mpq_class half(1, 2);
  // v^r_ij = 1/2 (dA^r_i/dy^j + dA^r_j/dy^i)
  //        + 1/2 sum_p (theta^r_pj A^p_i + theta^r_pi A^p_j)
  std::vector<Expr> v(n * n * n, Expr(nv));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        Expr acc = a(r, i).derivative(j) + a(r, j).derivative(i);
        for (std::size_t p = 0; p < n; ++p) {
          acc += theta(r, p, j) * a(p, i) + theta(r, p, i) * a(p, j);
        }
        v[(r * n + i) * n + j] = acc.scaled(half);
      }
    }
  }
  Connection res(n, nv);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        Expr acc = gamma(k, i, j);
        for (std::size_t r = 0; r < n; ++r) {
          const Expr& vr = v[(r * n + i) * n + j];
          if (!vr.is_zero() && !b(k, r).is_zero()) acc -= b(k, r) * vr;
        }
        res.set(k, i, j, acc);
      }
    }
  }
  return res;
}

bool CurvatureResidual::is_flat() const {
  for (const auto& c : components) {
    if (!c.value.is_zero()) return false;
  }
  return true;
}

std::vector<CurvatureComponent> CurvatureResidual::nonzero() const {
  std::vector<CurvatureComponent> out;
  for (const auto& c : components) {
    if (!c.value.is_zero()) out.push_back(c);
  }
  return out;
}

CurvatureResidual zero_curvature(const Connection& theta) {
  const std::size_t n = theta.dim();
  CurvatureResidual res;
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t q = k + 1; q < n; ++q) {
        for (std::size_t p = 0; p < n; ++p) {
          Expr acc = theta(m, k, p).derivative(q) - theta(m, q, p).derivative(k);
          for (std::size_t r = 0; r < n; ++r) {
            acc += theta(m, q, r) * theta(r, k, p) - theta(m, k, r) * theta(r, q, p);
          }
          res.components.push_back({m, k, q, p, std::move(acc)});
        }
      }
    }
  }
  return res;
}

Verdict decide(const OperatorField& a, const Connection& gamma, std::span<const mpq_class> base,
               const DecideOptions& options) {
  require_compatible(a, gamma);
  if (base.size() != a.nvars()) throw DimensionError("base point has the wrong length");
  const std::size_t n = a.dim();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        try {
          (void)gamma(k, i, j).eval(base);
        } catch (const PoleError&) {
          throw PoleError("Gamma " + std::to_string(k + 1) + " " + std::to_string(i + 1) + " " +
                          std::to_string(j + 1) + " has a pole at the base point");
        }
      }
    }
  }

  Verdict v;
  v.base_point.assign(base.begin(), base.end());
  v.route = options.route;
  try {
    v.gate = nondegeneracy_gate(a, base, options.probe);
  } catch (const PoleError&) {
    throw PoleError("A has a pole at the base point");
  }
  if (!v.gate.passed) {
    v.status = Status::kDegenerate;
    return v;
  }
  v.theta = solve_theta(a, gamma, options.route);
  const CurvatureResidual curv = zero_curvature(*v.theta);
  for (const auto& c : curv.nonzero()) {
    CurvatureWitness w{c.m, c.k, c.q, c.p, c.value, std::nullopt};
    try {
      w.at_base = c.value.eval(base);
    } catch (const PoleError&) {
    }
    v.curvature_witness.push_back(std::move(w));
  }
  v.status = v.curvature_witness.empty() ? Status::kReducible : Status::kNotReducible;
  return v;
}

}  // namespace diffred
