#pragma once

// Problem and transform files. Both are line-oriented: `[section]` headers,
// `key = value` lines, `#` comments. Expressions are double-quoted strings.
//
//   [dimensions]   n = 2
//   [variables]    names = y1, y2
//   [A]            1 1 = "y1"          (all n^2 entries)
//   [Gamma]        k i j = "expr"      (i <= j; omitted entries are 0)
//   [point]        base = 1, 1/2
//   [options]      d_route, grid, step, output, format
//
// Transform files carry [variables] (the new names), [forward] with
// `m = "new m in old variables"` and optionally [inverse] with
// `i = "old i in new variables"`.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "diffred/criterion.hpp"
#include "diffred/expr.hpp"
#include "diffred/geometry.hpp"
#include "diffred/pfaff.hpp"

namespace diffred {

struct ProblemOptions {
  std::optional<std::string> d_route;
  std::optional<std::string> grid;
  std::optional<std::string> step;
  std::optional<std::string> output;
  std::optional<std::string> format;
};

struct GammaEntry {
  std::string src;
  std::size_t line = 0;
};

struct ProblemFile {
  std::size_t n = 0;
  std::vector<std::string> names;
  std::vector<std::string> a_src;  // row-major, n*n
  std::vector<std::size_t> a_line;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, GammaEntry> gamma_src;  // 1-based, i <= j
  std::optional<std::vector<mpq_class>> base;
  ProblemOptions options;
  std::string origin = "<input>";
};

/// Syntax-level parse; throws InputError with "origin:line: message".
ProblemFile parse_problem_text(std::string_view text, const std::string& origin = "<input>");
ProblemFile load_problem_file(const std::string& path);
std::string write_problem_text(const ProblemFile& p);

/// The validated, parsed problem.
struct Problem {
  VarSet vars;
  OperatorField a;
  Connection gamma;
  std::optional<std::vector<mpq_class>> base;
};

/// Parses every expression; rejects asymmetric Gamma and singular A.
Problem build_problem(const ProblemFile& p);

/// The file form of an in-memory problem; expressions in canonical text.
ProblemFile to_problem_file(const VarSet& vars, const OperatorField& a, const Connection& gamma,
                            const std::optional<std::vector<mpq_class>>& base,
                            const ProblemOptions& options = {});

struct TransformFile {
  std::vector<std::string> names;  // new variable names
  std::vector<std::string> forward_src;
  std::optional<std::vector<std::string>> inverse_src;
  std::string origin = "<transform>";
};

TransformFile parse_transform_text(std::string_view text, const std::string& origin = "<transform>");
TransformFile load_transform_file(const std::string& path);

/// Parses the forward map over `old_vars` and the inverse over the new names;
/// checks that the inverse undoes the forward map.
PointTransform build_transform(const TransformFile& t, const VarSet& old_vars);

/// "r1, r2, ..." -> rationals.
std::vector<mpq_class> parse_point(std::string_view text);
/// "lo:hi:k, ..." with rational bounds.
GridSpec parse_grid_text(std::string_view text);

}  // namespace diffred
