#pragma once

// Reports: a plain-text rendering for people and a JSON rendering that
// scripts can read back with parse_machine_report.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diffred/criterion.hpp"
#include "diffred/pfaff.hpp"

namespace diffred {

struct Report {
  struct Gate {
    bool passed = false;
    std::string det_a, det_value;
    std::vector<std::string> sigma, sigma_values;
    std::optional<std::string> trace, trace_value;
    std::string resultant_value;
    bool det_test = false;
    bool resultant_test = false;
    std::optional<bool> trace_test;
    std::optional<std::string> witness, witness_expr, witness_value;
    std::optional<bool> witness_identically_zero;
    friend bool operator==(const Gate&, const Gate&) = default;
  };
  struct ThetaEntry {
    std::size_t r, p, q;  // 1-based, p <= q
    std::string expr;
    friend bool operator==(const ThetaEntry&, const ThetaEntry&) = default;
  };
  struct Witness {
    std::size_t m, k, q, p;  // 1-based
    std::string expr;
    std::optional<std::string> at_base;
    friend bool operator==(const Witness&, const Witness&) = default;
  };
  struct Dropped {
    std::vector<double> y;
    std::string reason;
    friend bool operator==(const Dropped&, const Dropped&) = default;
  };
  struct Reduction {
    double step = 0;
    std::size_t points = 0;
    std::vector<Dropped> dropped;
    double diffusion_residual = 0;
    double estimated_error = 0;
    double symmetry_residual = 0;
    std::string table;  // path, or "-" for standard output
    friend bool operator==(const Reduction&, const Reduction&) = default;
  };

  std::string status;
  std::size_t n = 0;
  std::vector<std::string> variables;
  std::vector<std::string> base_point;
  std::string route;
  Gate gate;
  std::vector<ThetaEntry> theta;
  std::vector<Witness> curvature_witness;
  std::optional<Reduction> reduction;
  // Wall-clock seconds of the decision; kept out of both renderings so that
  // reports are reproducible byte for byte.
  double seconds = 0;

  friend bool operator==(const Report& a, const Report& b) {
    return a.status == b.status && a.n == b.n && a.variables == b.variables &&
           a.base_point == b.base_point && a.route == b.route && a.gate == b.gate &&
           a.theta == b.theta && a.curvature_witness == b.curvature_witness &&
           a.reduction == b.reduction;
  }
};

Report make_report(const Verdict& v, const VarSet& vars, double seconds = 0);
void add_reduction(Report& r, const GridSolution& sol, const DiffusionResidual& res,
                   const std::string& table);

std::string to_human(const Report& r);
std::string to_machine(const Report& r);
/// Throws InputError on malformed input.
Report parse_machine_report(std::string_view text);

}  // namespace diffred
