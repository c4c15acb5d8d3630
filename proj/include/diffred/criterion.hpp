#pragma once

// Decision pipeline: non-degeneracy gate, inversion of Lambda_sym,
// reconstruction of theta from (A, Gamma), zero-curvature test.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diffred/expr.hpp"
#include "diffred/geometry.hpp"
#include "diffred/polyalg.hpp"

namespace diffred {

enum class Status { kReducible, kNotReducible, kDegenerate };
enum class DRoute { kSolve, kCayley, kBoth };

const char* to_string(Status s);
const char* to_string(DRoute r);

/// w^r_ij = A^r_k G^k_ij - 1/2 (dA^r_i/dy^j + dA^r_j/dy^i); same shape as a
/// connection.
Connection rhs_w(const OperatorField& a, const Connection& gamma);

struct GateReport {
  bool passed = false;
  Expr det_a;                     // symbolic det A
  std::vector<Expr> sigma;        // symbolic sigma_1..sigma_n
  std::optional<Expr> trace;      // n == 2 only
  mpq_class det_value;
  std::vector<mpq_class> sigma_values;
  mpq_class resultant_value;      // Res[f(t), f(-t)] at the base point
  std::optional<mpq_class> trace_value;
  bool det_test = false;          // det A != 0 at the base point
  bool resultant_test = false;    // det A != 0 and resultant != 0
  std::optional<bool> trace_test; // n == 2: det A != 0 and trace != 0

  // Filled when the gate fails.
  std::string witness;            // "det", "trace" or "resultant"
  std::optional<Expr> witness_expr;
  mpq_class witness_value;
  bool witness_identically_zero = false;
};

/// Evaluates the gate at `base`. Throws PoleError if A has a pole there and
/// Error if the n = 2 trace test disagrees with the resultant test.
GateReport nondegeneracy_gate(const OperatorField& a, std::span<const mpq_class> base,
                              const ProbeOptions& probe = {});

/// Res[f(t), f(-t)] for the characteristic polynomial f of A.
Expr gate_resultant(const ExprMatrix& a);

/// D = Lambda_sym^-1 by exact elimination.
SymOperator d_tensor_solve(const OperatorField& a);
/// D = -sum_{i=1..M} (eps_i / eps_0) Lambda_sym^(i-1) from eps(mu) = phi(mu)^2.
SymOperator d_tensor_cayley(const OperatorField& a);
/// n = 2 only: D = (2L^2 - 3 s1 L + (s1^2 + 2 s2) I) / (s1 s2).
SymOperator d_tensor_cayley_n2(const OperatorField& a);

/// Tensor component D^{ij}_{pq} (0-based indices, any order within pairs).
Expr d_component(const SymOperator& d, std::size_t i, std::size_t j, std::size_t p,
                 std::size_t q);

/// theta^r_pq = sum_{i<=j} D[(pq),(ij)] w^r_ij.
Connection apply_d(const SymOperator& d, const Connection& w);

/// theta from (A, Gamma). kSolve solves Lambda_sym theta = w directly, kCayley
/// goes through d_tensor_cayley, kBoth does both and throws Error on mismatch.
Connection solve_theta(const OperatorField& a, const Connection& gamma,
                       DRoute route = DRoute::kSolve);

/// G^k_ij minus the connection rebuilt from (A, theta); zero in every
/// component exactly when theta solves the linear system.
Connection theta_residual(const OperatorField& a, const Connection& gamma,
                          const Connection& theta);

struct CurvatureComponent {
  std::size_t m, k, q, p;  // 0-based, k < q
  Expr value;
};

/// R^m_kqp = d theta^m_kp/dy^q - d theta^m_qp/dy^k
///         + theta^m_qr theta^r_kp - theta^m_kr theta^r_qp,
/// stored for k < q in lexicographic (m, k, q, p) order.
struct CurvatureResidual {
  std::vector<CurvatureComponent> components;
  bool is_flat() const;
  /// Nonzero components in storage order.
  std::vector<CurvatureComponent> nonzero() const;
};

CurvatureResidual zero_curvature(const Connection& theta);

struct CurvatureWitness {
  std::size_t m, k, q, p;  // 0-based
  Expr value;
  std::optional<mpq_class> at_base;  // absent on a pole
};

struct Verdict {
  Status status = Status::kDegenerate;
  GateReport gate;
  std::optional<Connection> theta;
  std::vector<CurvatureWitness> curvature_witness;  // first entry is the witness
  std::vector<mpq_class> base_point;
  DRoute route = DRoute::kSolve;
};

struct DecideOptions {
  DRoute route = DRoute::kSolve;
  ProbeOptions probe;
};

Verdict decide(const OperatorField& a, const Connection& gamma, std::span<const mpq_class> base,
               const DecideOptions& options = {});

}  // namespace diffred
