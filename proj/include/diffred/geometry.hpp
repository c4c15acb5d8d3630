#pragma once

// Tensor fields of a quasilinear parabolic system in a chart y^1..y^n:
// the operator field A^i_j, the connection Gamma^k_ij, point transforms
// with their transition matrices, and the operator Lambda acting on
// bilinear forms. Indices are 0-based in code and 1-based in any text the
// user sees. Coordinates are the first n variables of the ring; further
// variables are treated as constant parameters.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "diffred/expr.hpp"
#include "diffred/polyalg.hpp"

namespace diffred {

/// Tensor field of type (1,1); row index is the upper index.
class OperatorField {
 public:
  /// Throws SingularMatrixError if det is identically zero.
  explicit OperatorField(ExprMatrix components);

  std::size_t dim() const { return m_.rows(); }
  std::size_t nvars() const { return m_.nvars(); }
  const Expr& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const ExprMatrix& matrix() const { return m_; }

  friend bool operator==(const OperatorField&, const OperatorField&) = default;

 private:
  ExprMatrix m_;
};

/// Three-index array c^k_ij symmetric in the lower pair. Houses affine
/// connections and the theta quantities.
class Connection {
 public:
  enum class Asymmetry { kReject, kSymmetrize };

  Connection(std::size_t n, std::size_t nvars);
  /// `components` in (k, i, j) row-major order.
  static Connection from_components(std::size_t n, std::vector<Expr> components,
                                    Asymmetry mode = Asymmetry::kReject);

  std::size_t dim() const { return n_; }
  std::size_t nvars() const { return nvars_; }
  const Expr& operator()(std::size_t k, std::size_t i, std::size_t j) const {
    return c_[(k * n_ + i) * n_ + j];
  }
  /// Sets both (k,i,j) and (k,j,i).
  void set(std::size_t k, std::size_t i, std::size_t j, const Expr& value);
  bool is_zero() const;

  friend bool operator==(const Connection&, const Connection&) = default;

 private:
  std::size_t n_;
  std::size_t nvars_;
  std::vector<Expr> c_;
};

/// Change of variables ytilde^m = forward[m](y). The optional inverse gives
/// y^i as functions of ytilde (in a ring of the same size, with the same
/// parameter variables after the first n).
class PointTransform {
 public:
  explicit PointTransform(std::vector<Expr> forward,
                          std::optional<std::vector<Expr>> inverse = std::nullopt);

  std::size_t dim() const { return forward_.size(); }
  std::size_t nvars() const { return forward_.front().nvars(); }
  const std::vector<Expr>& forward() const { return forward_; }
  const std::optional<std::vector<Expr>>& inverse() const { return inverse_; }

  /// T^m_p = d ytilde^m / d y^p, in source coordinates.
  const ExprMatrix& jacobian() const { return t_; }
  /// S = T^-1, in source coordinates.
  const ExprMatrix& inverse_jacobian() const { return s_; }

  /// Re-express a source-chart function in target coordinates; identity
  /// when no inverse was supplied.
  Expr to_target(const Expr& e) const;
  /// The transform with forward and inverse swapped; requires an inverse.
  PointTransform inverted() const;

 private:
  std::vector<Expr> forward_;
  std::optional<std::vector<Expr>> inverse_;
  ExprMatrix t_;
  ExprMatrix s_;
};

/// Bijection between pairs i <= j and 0..N-1, N = n(n+1)/2, ordered by
/// (i1,j1) < (i2,j2) iff j1 < j2, or j1 == j2 and i1 < i2.
class SymPairIndex {
 public:
  explicit SymPairIndex(std::size_t n);

  std::size_t dim() const { return n_; }
  std::size_t size() const { return pairs_.size(); }
  /// Accepts either order of i, j.
  std::size_t index(std::size_t i, std::size_t j) const;
  std::pair<std::size_t, std::size_t> pair(std::size_t k) const { return pairs_[k]; }

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

/// An operator on symmetric bilinear forms in coordinates c_(p<=q) = theta_pq.
struct SymOperator {
  SymPairIndex index;
  ExprMatrix matrix;
};

/// Lambda^{pq}_{ij}, symmetric in (p,q) and in (i,j).
class LambdaTensor {
 public:
  LambdaTensor(std::size_t n, std::vector<Expr> data) : n_(n), data_(std::move(data)) {}
  std::size_t dim() const { return n_; }
  const Expr& operator()(std::size_t p, std::size_t q, std::size_t i, std::size_t j) const {
    return data_[((p * n_ + q) * n_ + i) * n_ + j];
  }

 private:
  std::size_t n_;
  std::vector<Expr> data_;
};

LambdaTensor build_lambda(const OperatorField& a);

/// M[(i,j),(p,q)] = Lambda^{pq}_{ij} * (p < q ? 2 : 1).
SymOperator lambda_sym_matrix(const LambdaTensor& lambda, const SymPairIndex& idx);
SymOperator lambda_sym_matrix(const OperatorField& a);

/// Operator field in the target chart: Atilde = T A S.
OperatorField transform_operator(const OperatorField& a, const PointTransform& phi);

/// Connection in the target chart:
/// Gtilde^m_pq = S^i_p S^j_q (T^m_k G^k_ij - dT^m_i/dy^j).
Connection transform_connection(const Connection& gamma, const PointTransform& phi);

/// theta^r_pq = S^r_m d^2 ytilde^m / dy^p dy^q.
Connection theta_from_transform(const PointTransform& phi);

/// The connection of a system already in diffusion form:
/// G^m_pq = 1/2 B^m_s (dA^s_p/dy^q + dA^s_q/dy^p), B = A^-1.
Connection diffusion_connection(const OperatorField& a);

}  // namespace diffred
