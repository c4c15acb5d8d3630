#include "diffred/pfaff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>

#include "diffred/errors.hpp"

namespace diffred {

std::size_t GridSpec::total() const {
  std::size_t t = 1;
  for (auto c : count) t *= c;
  return t;
}

double GridSpec::coord(std::size_t axis, std::size_t i) const {
  if (count[axis] == 1) return lo[axis];
  return lo[axis] + (hi[axis] - lo[axis]) * static_cast<double>(i) /
                        static_cast<double>(count[axis] - 1);
}

double GridSpec::max_extent() const {
  double e = 0;
  for (std::size_t a = 0; a < dim(); ++a) e = std::max(e, std::abs(hi[a] - lo[a]));
  return e;
}

GridSpec GridSpec::around(std::span<const double> base, double half_width, std::size_t count) {
  GridSpec g;
  for (double b : base) {
    g.lo.push_back(b - half_width);
    g.hi.push_back(b + half_width);
    g.count.push_back(count);
  }
  return g;
}

NumericTheta::NumericTheta(const Connection& theta) : n_(theta.dim()) {
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t p = 0; p < n_; ++p) {
      for (std::size_t q = 0; q < n_; ++q) comps_.push_back(theta(r, p, q));
    }
  }
}

bool NumericTheta::eval(std::span<const double> y, std::span<double> out) const {
  for (std::size_t k = 0; k < comps_.size(); ++k) {
    const double v = comps_[k].is_zero() ? 0.0 : comps_[k].eval(y);
    if (!std::isfinite(v)) return false;
    out[k] = v;
  }
  return true;
}

namespace {

using Vec = std::vector<double>;

// det of a row-major n x n matrix by partial-pivot elimination.
double det_numeric(std::span<const double> m, std::size_t n) {
  Vec a(m.begin(), m.end());
  double d = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    }
    if (a[piv * n + k] == 0) return 0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      d = -d;
    }
    d *= a[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  return d;
}

// Inverse of a row-major n x n matrix by Gauss-Jordan with partial pivoting.
std::optional<Vec> inverse_numeric(std::span<const double> m, std::size_t n) {
  Vec a(m.begin(), m.end());
  Vec inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    }
    if (a[piv * n + k] == 0) return std::nullopt;
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(inv[k * n + j], inv[piv * n + j]);
    }
    const double d = a[k * n + k];
    for (std::size_t j = 0; j < n; ++j) {
      a[k * n + j] /= d;
      inv[k * n + j] /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = a[i * n + k];
      if (f == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[i * n + j] -= f * a[k * n + j];
        inv[i * n + j] -= f * inv[k * n + j];
      }
    }
  }
  return inv;
}

Vec matmul(const Vec& a, const Vec& b, std::size_t n) {
  Vec c(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a[i * n + k];
      if (aik == 0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
    }
  }
  return c;
}

std::string format_point(std::span<const double> y, std::size_t n) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < n; ++i) {
    if (i) os << ", ";
    os << y[i];
  }
  os << ")";
  return os.str();
}

// State layout: T (n*n, row-major) followed by ytilde (n).
class Integrator {
 public:
  Integrator(const NumericTheta& theta, double step, double det_threshold)
      : theta_(theta), n_(theta.dim()), h_(step), thr_(det_threshold),
        buf_(n_ * n_ * n_) {}

  // Advances (y, state) along `axis` until y[axis] == to. On failure returns
  // the reason and leaves the arguments unspecified.
  std::optional<std::string> segment(Vec& y, Vec& state, std::size_t axis, double to) {
    const double len = to - y[axis];
    const auto steps = static_cast<std::size_t>(
        std::max(1.0, std::ceil(std::abs(len) / h_ - 1e-9)));
    const double ds = len / static_cast<double>(steps);
    const double start = y[axis];
    const double det0 = det_numeric(std::span(state).first(n_ * n_), n_);
    Vec k1, k2, k3, k4, tmp(state.size());
    for (std::size_t s = 0; s < steps; ++s) {
      const double y0 = start + ds * static_cast<double>(s);
      auto stage = [&](double at, const Vec& st, Vec& out) {
        y[axis] = at;
        return rhs(y, st, axis, out);
      };
      if (!stage(y0, state, k1)) return pole(y);
      for (std::size_t i = 0; i < state.size(); ++i) tmp[i] = state[i] + 0.5 * ds * k1[i];
      if (!stage(y0 + 0.5 * ds, tmp, k2)) return pole(y);
      for (std::size_t i = 0; i < state.size(); ++i) tmp[i] = state[i] + 0.5 * ds * k2[i];
      if (!stage(y0 + 0.5 * ds, tmp, k3)) return pole(y);
      for (std::size_t i = 0; i < state.size(); ++i) tmp[i] = state[i] + ds * k3[i];
      if (!stage(s + 1 == steps ? to : y0 + ds, tmp, k4)) return pole(y);
      for (std::size_t i = 0; i < state.size(); ++i) {
        state[i] += ds / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
      const double d = det_numeric(std::span(state).first(n_ * n_), n_);
      if (!std::isfinite(d) || std::abs(d) < thr_) {
        return "|det T| below threshold near y = " + format_point(y, n_);
      }
      if ((d > 0) != (det0 > 0)) return "det T changed sign near y = " + format_point(y, n_);
    }
    y[axis] = to;
    return std::nullopt;
  }

  bool usable(std::span<const double> y) { return theta_.eval(y, buf_); }

 private:
  std::string pole(const Vec& y) const {
    return "theta has a pole or non-finite value near y = " + format_point(y, n_);
  }

  bool rhs(const Vec& y, const Vec& st, std::size_t q, Vec& out) {
    if (!theta_.eval(y, buf_)) return false;
    out.assign(st.size(), 0.0);
    const std::size_t n = n_;
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t p = 0; p < n; ++p) {
        double acc = 0;
        for (std::size_t r = 0; r < n; ++r) acc += st[m * n + r] * buf_[(r * n + p) * n + q];
        out[m * n + p] = acc;
      }
      out[n * n + m] = st[m * n + q];
    }
    return true;
  }

  const NumericTheta& theta_;
  std::size_t n_;
  double h_;
  double thr_;
  Vec buf_;
};

struct Node {
  Vec y;
  Vec state;
  std::optional<std::string> failure;
  std::vector<std::size_t> idx;
};

// Sweeps the grid from the base point, one axis at a time in `order`.
// Returns one node per grid point in row-major order of grid indices.
std::vector<Node> sweep(const NumericTheta& theta, std::span<const double> base,
                        const Vec& init, const GridSpec& grid, double step, double thr,
                        const std::vector<std::size_t>& order) {
  const std::size_t n = theta.dim();
  Integrator integ(theta, step, thr);
  std::vector<Node> nodes{{Vec(base.begin(), base.end()), init, std::nullopt,
                           std::vector<std::size_t>(n, 0)}};
  for (std::size_t a : order) {
    std::vector<Node> next;
    next.reserve(nodes.size() * grid.count[a]);
    for (const Node& node : nodes) {
      std::vector<std::size_t> up, down;
      for (std::size_t i = 0; i < grid.count[a]; ++i) {
        (grid.coord(a, i) >= base[a] ? up : down).push_back(i);
      }
      std::reverse(down.begin(), down.end());
      for (const auto* dir : {&up, &down}) {
        Node cur = node;
        for (std::size_t i : *dir) {
          if (!cur.failure) cur.failure = integ.segment(cur.y, cur.state, a, grid.coord(a, i));
          cur.y[a] = grid.coord(a, i);
          cur.idx[a] = i;
          next.push_back(cur);
        }
      }
    }
    nodes = std::move(next);
  }
  std::vector<Node> flat(nodes.size());
  for (auto& node : nodes) {
    std::size_t k = 0;
    for (std::size_t a = 0; a < n; ++a) k = k * grid.count[a] + node.idx[a];
    flat[k] = std::move(node);
  }
  return flat;
}

std::vector<std::size_t> forward_order(std::size_t n) {
  std::vector<std::size_t> o(n);
  for (std::size_t i = 0; i < n; ++i) o[i] = i;
  return o;
}

Vec initial_state(std::span<const double> t0, std::span<const double> ytilde0) {
  Vec s(t0.begin(), t0.end());
  s.insert(s.end(), ytilde0.begin(), ytilde0.end());
  return s;
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

GridSolution integrate_T(const Connection& theta, std::span<const double> base,
                         std::span<const double> t0, const GridSpec& grid,
                         const IntegrateOptions& options) {
  const std::size_t n = theta.dim();
  if (base.size() != theta.nvars()) throw DimensionError("base point has the wrong length");
  if (t0.size() != n * n) throw DimensionError("T0 must be n x n");
  if (grid.dim() != n) throw DimensionError("grid dimension differs from n");
  for (std::size_t a = 0; a < n; ++a) {
    if (grid.count[a] == 0) throw InputError("grid needs at least one point per axis");
  }

  GridSolution sol;
  sol.theta = std::make_shared<NumericTheta>(theta);
  sol.base.assign(base.begin(), base.end());
  sol.grid = grid;
  const double extent = grid.max_extent();
  sol.step = options.step > 0 ? options.step : (extent > 0 ? extent / 64 : 1.0 / 64);
  sol.t0.assign(t0.begin(), t0.end());
  sol.ytilde0.assign(n, 0.0);

  Integrator probe(*sol.theta, sol.step, options.det_threshold);
  if (!probe.usable(base)) throw IntegrationError("theta has a pole at the base point");
  const double d0 = det_numeric(t0, n);
  if (!(std::abs(d0) >= options.det_threshold)) throw IntegrationError("T0 is singular");

  const Vec init = initial_state(t0, sol.ytilde0);
  const auto order = forward_order(n);
  const auto nodes = sweep(*sol.theta, base, init, grid, sol.step, options.det_threshold, order);
  for (const auto& node : nodes) {
    if (node.failure) {
      sol.dropped.push_back({node.y, *node.failure});
      continue;
    }
    sol.points.push_back(node.y);
    sol.t_values.emplace_back(node.state.begin(), node.state.begin() + n * n);
  }
  if (sol.points.empty()) throw IntegrationError("no grid point could be reached from the base point");

  if (options.estimate_error) {
    const auto fine = sweep(*sol.theta, base, init, grid, sol.step / 2, options.det_threshold, order);
    double m = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (nodes[k].failure || fine[k].failure) continue;
      m = std::max(m, max_diff(nodes[k].state, fine[k].state));
    }
    // Leading error term of the coarse run for a fourth-order method.
    sol.estimated_error = m * 16.0 / 15.0;
  }
  return sol;
}

void integrate_coordinates(GridSolution& sol, std::span<const double> ytilde0) {
  const std::size_t n = sol.dim();
  if (ytilde0.size() != n) throw DimensionError("ytilde(base) has the wrong length");
  sol.ytilde0.assign(ytilde0.begin(), ytilde0.end());
  const Vec init = initial_state(sol.t0, sol.ytilde0);
  // The threshold only decides which points survive; reuse the default so
  // the retained set matches integrate_T.
  const double thr = IntegrateOptions{}.det_threshold;
  auto order = forward_order(n);
  const auto nodes = sweep(*sol.theta, sol.base, init, sol.grid, sol.step, thr, order);
  std::reverse(order.begin(), order.end());
  const auto other = sweep(*sol.theta, sol.base, init, sol.grid, sol.step, thr, order);

  sol.ytilde_values.clear();
  double sym = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k].failure) continue;
    sol.ytilde_values.emplace_back(nodes[k].state.begin() + n * n, nodes[k].state.end());
    if (!other[k].failure) {
      sym = std::max(sym, max_diff(std::span(nodes[k].state).subspan(n * n),
                                   std::span(other[k].state).subspan(n * n)));
    }
  }
  if (sol.ytilde_values.size() != sol.points.size()) {
    throw IntegrationError("internal: coordinate sweep retained a different point set");
  }
  sol.symmetry_residual = sym;
}

double path_independence_check(const Connection& theta, std::span<const double> base,
                               std::span<const double> target, std::span<const double> t0,
                               double step) {
  const std::size_t n = theta.dim();
  if (base.size() != theta.nvars() || target.size() != theta.nvars()) {
    throw DimensionError("points have the wrong length");
  }
  if (t0.size() != n * n) throw DimensionError("T0 must be n x n");
  const NumericTheta nt(theta);
  Integrator integ(nt, step, 0.0);
  auto run = [&](std::vector<std::size_t> order) {
    Vec y(base.begin(), base.end());
    Vec state = initial_state(t0, Vec(n, 0.0));
    for (std::size_t a : order) {
      if (auto err = integ.segment(y, state, a, target[a])) throw IntegrationError(*err);
    }
    return Vec(state.begin(), state.begin() + n * n);
  };
  auto order = forward_order(n);
  const Vec t1 = run(order);
  std::reverse(order.begin(), order.end());
  const Vec t2 = run(order);
  return max_diff(t1, t2);
}

DiffusionResidual verify_diffusion_form(const OperatorField& a, const Connection& gamma,
                                        const GridSolution& sol,
                                        std::span<const std::size_t> sample) {
  const std::size_t n = a.dim();
  if (gamma.dim() != n || sol.dim() != n) throw DimensionError("dimension mismatch");
  std::vector<Expr> da(n * n * n);  // dA^r_i/dy^j at (r*n + i)*n + j
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) da[(r * n + i) * n + j] = a(r, i).derivative(j);
    }
  }
  std::vector<std::size_t> all;
  if (sample.empty()) {
    for (std::size_t k = 0; k < sol.points.size(); ++k) all.push_back(k);
    sample = all;
  }

  DiffusionResidual out;
  Vec th(n * n * n);
  for (std::size_t idx : sample) {
    const Vec& y = sol.points.at(idx);
    const Vec& t = sol.t_values.at(idx);
    auto s = inverse_numeric(t, n);
    if (!s) throw SingularMatrixError("T is singular at y = " + format_point(y, n));
    if (!sol.theta->eval(y, th)) throw PoleError("theta has a pole at y = " + format_point(y, n));

    Vec av(n * n), g(n * n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) av[i * n + j] = a(i, j).eval(y);
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) g[(k * n + i) * n + j] = gamma(k, i, j).eval(y);
      }
    }
    // dT_j = T Theta_j, dS_j = -S dT_j S.
    std::vector<Vec> dt(n), ds(n), da_j(n), dat(n);
    for (std::size_t j = 0; j < n; ++j) {
      Vec theta_j(n * n);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t p = 0; p < n; ++p) theta_j[r * n + p] = th[(r * n + p) * n + j];
      }
      dt[j] = matmul(t, theta_j, n);
      ds[j] = matmul(matmul(*s, dt[j], n), *s, n);
      for (auto& v : ds[j]) v = -v;
      da_j[j].resize(n * n);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < n; ++i) da_j[j][r * n + i] = da[(r * n + i) * n + j].eval(y);
      }
    }
    const Vec as = matmul(av, *s, n);
    const Vec at = matmul(t, as, n);
    const auto bt = inverse_numeric(at, n);
    if (!bt) throw SingularMatrixError("transformed A is singular at y = " + format_point(y, n));
    // d Atilde / dy^j, then d Atilde / d ytilde^q = sum_j S^j_q d Atilde / dy^j.
    std::vector<Vec> dat_y(n);
    for (std::size_t j = 0; j < n; ++j) {
      Vec term = matmul(dt[j], as, n);
      const Vec t2 = matmul(t, matmul(da_j[j], *s, n), n);
      const Vec t3 = matmul(t, matmul(av, ds[j], n), n);
      for (std::size_t k = 0; k < n * n; ++k) term[k] += t2[k] + t3[k];
      dat_y[j] = std::move(term);
    }
    for (std::size_t q = 0; q < n; ++q) {
      dat[q].assign(n * n, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const double sjq = (*s)[j * n + q];
        for (std::size_t k = 0; k < n * n; ++k) dat[q][k] += sjq * dat_y[j][k];
      }
    }
    // u^m_ij = T^m_k G^k_ij - dT^m_i/dy^j
    Vec u(n * n * n);
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          double acc = -dt[j][m * n + i];
          for (std::size_t k = 0; k < n; ++k) acc += t[m * n + k] * g[(k * n + i) * n + j];
          u[(m * n + i) * n + j] = acc;
        }
      }
    }
    double worst = 0;
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
          double gt = 0;
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
              gt += (*s)[i * n + p] * (*s)[j * n + q] * u[(m * n + i) * n + j];
            }
          }
          double rhs = 0;
          for (std::size_t sidx = 0; sidx < n; ++sidx) {
            rhs += (*bt)[m * n + sidx] * (dat[q][sidx * n + p] + dat[p][sidx * n + q]);
          }
          worst = std::max(worst, std::abs(gt - 0.5 * rhs));
        }
      }
    }
    ++out.points_checked;
    if (out.worst_point.empty() || worst > out.max_residual) {
      out.max_residual = worst;
      out.worst_point = y;
    }
  }
  return out;
}

std::string grid_table(const GridSolution& sol, std::span<const std::string> names) {
  const std::size_t n = sol.dim();
  if (names.size() < n) throw DimensionError("need a name per coordinate");
  if (sol.ytilde_values.size() != sol.points.size()) {
    throw Error("coordinates have not been integrated");
  }
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += names[i] + ",";
  for (std::size_t i = 0; i < n; ++i) out += "ytilde" + std::to_string(i + 1) + ",";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out += "T_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
      out += (i + 1 == n && j + 1 == n) ? "\n" : ",";
    }
  }
  char buf[40];
  auto put = [&](double v, bool last) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
    out += last ? "\n" : ",";
  };
  for (std::size_t k = 0; k < sol.points.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) put(sol.points[k][i], false);
    for (std::size_t i = 0; i < n; ++i) put(sol.ytilde_values[k][i], false);
    for (std::size_t i = 0; i < n * n; ++i) put(sol.t_values[k][i], i + 1 == n * n);
  }
  return out;
}

}  // namespace diffred
