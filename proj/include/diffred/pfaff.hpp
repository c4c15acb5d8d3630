#pragma once

// Numeric construction of the reducing change of variables. The Pfaff
// system dT/dy^q = T Theta_q, (Theta_q)_rp = theta^r_pq, is integrated with
// classical RK4 along axis-parallel sweeps from the base point, together
// with dytilde/dy^q = T e_q.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "diffred/geometry.hpp"

namespace diffred {

/// Axis-aligned lattice: count[a] points from lo[a] to hi[a] inclusive.
struct GridSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::size_t> count;

  std::size_t dim() const { return lo.size(); }
  std::size_t total() const;
  double coord(std::size_t axis, std::size_t i) const;
  double max_extent() const;
  /// Square box base +- half_width with `count` points per axis.
  static GridSpec around(std::span<const double> base, double half_width, std::size_t count);
};

/// theta prepared for repeated double evaluation.
class NumericTheta {
 public:
  explicit NumericTheta(const Connection& theta);
  std::size_t dim() const { return n_; }
  /// Writes theta^r_pq at (r*n + p)*n + q. Returns false on a pole or a
  /// non-finite value.
  bool eval(std::span<const double> y, std::span<double> out) const;

 private:
  std::size_t n_;
  std::vector<Expr> comps_;
};

struct DroppedPoint {
  std::vector<double> y;
  std::string reason;
};

struct GridSolution {
  std::vector<double> base;          // all ring variables, coordinates first
  GridSpec grid;
  double step = 0;
  int order = 4;
  std::vector<double> t0;            // n*n, row-major
  std::vector<double> ytilde0;       // n
  std::vector<std::vector<double>> points;  // retained grid points
  std::vector<std::vector<double>> t_values;
  std::vector<std::vector<double>> ytilde_values;  // empty until integrate_coordinates
  std::vector<DroppedPoint> dropped;
  double estimated_error = -1;       // T and ytilde, h vs h/2 comparison
  double symmetry_residual = -1;     // ytilde along two sweep orders
  std::shared_ptr<const NumericTheta> theta;

  std::size_t dim() const { return ytilde0.size(); }
};

struct IntegrateOptions {
  double step = 0;             // 0 selects grid extent / 64
  double det_threshold = 1e-9;
  bool estimate_error = true;
};

/// Integrates T over the grid. Points with a pole, |det T| below the
/// threshold, or a sign change of det T on the way are dropped and listed.
/// Throws IntegrationError if the base point itself is unusable.
GridSolution integrate_T(const Connection& theta, std::span<const double> base,
                         std::span<const double> t0, const GridSpec& grid,
                         const IntegrateOptions& options = {});

/// Fills ytilde with ytilde(base) = ytilde0, and the two-order discrepancy
/// of ytilde as the symmetry residual.
void integrate_coordinates(GridSolution& sol, std::span<const double> ytilde0);

/// Max entrywise difference of T at `target` reached along axis orders
/// 0,1,..,n-1 and n-1,..,0.
double path_independence_check(const Connection& theta, std::span<const double> base,
                               std::span<const double> target, std::span<const double> t0,
                               double step);

struct DiffusionResidual {
  double max_residual = 0;
  std::size_t points_checked = 0;
  std::vector<double> worst_point;
};

/// At each retained point, rebuilds Atilde and Gtilde from the numeric T
/// and measures max |Gtilde - 1/2 Btilde (dAtilde + dAtilde^t)| over all
/// components. `sample` lists indices into sol.points; empty means all.
DiffusionResidual verify_diffusion_form(const OperatorField& a, const Connection& gamma,
                                        const GridSolution& sol,
                                        std::span<const std::size_t> sample = {});

/// CSV: y names, ytilde1..n, T_i_j; values printed with 17 significant digits.
std::string grid_table(const GridSolution& sol, std::span<const std::string> names);

}  // namespace diffred
