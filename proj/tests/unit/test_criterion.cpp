#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "diffred/criterion.hpp"
#include "diffred/errors.hpp"
#include "diffred/parser.hpp"
#include "diffred/problem.hpp"
#include "support.hpp"

using namespace diffred;
using testsupport::Rng;

namespace {

const VarSet& v2() {
  static const VarSet v({"y1", "y2"});
  return v;
}

Expr P(const std::string& s, const VarSet& v = v2()) { return parse_expr(s, v); }

OperatorField A2(const char* a11, const char* a12, const char* a21, const char* a22) {
  return OperatorField(ExprMatrix::from_rows({{P(a11), P(a12)}, {P(a21), P(a22)}}));
}

const VarSet& v1() {
  static const VarSet v({"y"});
  return v;
}

Expr S(const std::string& s) { return parse_expr(s, v1()); }

Connection scalar_connection(const char* g) {
  Connection c(1, 1);
  c.set(0, 0, 0, S(g));
  return c;
}

Connection random_connection(Rng& rng, std::size_t n, unsigned deg) {
  Connection c(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) c.set(k, i, j, testsupport::random_poly(rng, n, deg, 2, 2));
  return c;
}

// Curvature written out term by term, with its own loop structure; returns
// true when every component vanishes.
bool brute_force_flat(const Connection& t) {
  const std::size_t n = t.dim();
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < n; ++p) {
          Expr r = t(m, k, p).derivative(q) - t(m, q, p).derivative(k);
          for (std::size_t s = 0; s < n; ++s) r += t(m, q, s) * t(s, k, p) - t(m, k, s) * t(s, q, p);
          if (!r.is_zero()) return false;
        }
  return true;
}

std::vector<mpq_class> pt(std::initializer_list<long> xs) {
  std::vector<mpq_class> v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

}  // namespace

TEST_CASE("rhs_w: examples") {
  Rng rng(31);
  const Connection g = random_connection(rng, 2, 2);
  CHECK(rhs_w(A2("1", "0", "0", "1"), g) == g);

  // A = diag(y1, 1), Gamma = 0: w^1_11 = -dA^1_1/dy^1.
  const Connection w = rhs_w(A2("y1", "0", "0", "1"), Connection(2, 2));
  CHECK(w(0, 0, 0) == P("-1"));
  CHECK(w(0, 0, 1).is_zero());
  CHECK(w(1, 1, 1).is_zero());
  // The derivative term is symmetrised: A^1_2 = y1 gives w^1_12 = -1/2.
  CHECK(rhs_w(A2("1", "y1", "0", "1"), Connection(2, 2))(0, 0, 1) == P("-1/2"));
  CHECK(rhs_w(A2("1", "y2", "0", "1"), Connection(2, 2))(0, 1, 1) == P("-1"));

  const OperatorField a1(ExprMatrix::from_rows({{S("y^2 + 1")}}));
  CHECK(rhs_w(a1, scalar_connection("y"))(0, 0, 0) == S("(y^2 + 1)*y - 2*y"));
}

TEST_CASE("gate: examples") {
  const GateReport opposite = nondegeneracy_gate(A2("1", "0", "0", "-1"), pt({0, 0}));
  CHECK_FALSE(opposite.passed);
  CHECK(opposite.det_test);
  CHECK_FALSE(opposite.resultant_test);
  CHECK(opposite.trace_test == std::optional<bool>(false));
  CHECK(opposite.witness_identically_zero);

  const GateReport good = nondegeneracy_gate(A2("2", "0", "0", "3"), pt({0, 0}));
  CHECK(good.passed);
  CHECK(good.trace_value == std::optional<mpq_class>(5));
  CHECK(good.det_value == 6);
  CHECK(good.resultant_value != 0);

  // Singular only at the base point: the det test names it.
  const OperatorField a1(ExprMatrix::from_rows({{S("y")}}));
  const GateReport at_zero = nondegeneracy_gate(a1, pt({0}));
  CHECK_FALSE(at_zero.passed);
  CHECK(at_zero.witness == "det");
  CHECK_FALSE(at_zero.witness_identically_zero);
  CHECK(nondegeneracy_gate(a1, pt({1})).passed);
  CHECK_FALSE(nondegeneracy_gate(a1, pt({1})).trace_test.has_value());

  // Opposite eigenvalues only along the line y1 = -y2.
  const OperatorField a = A2("y1", "0", "0", "y2");
  CHECK(nondegeneracy_gate(a, pt({1, 2})).passed);
  const GateReport line = nondegeneracy_gate(a, pt({1, -1}));
  CHECK_FALSE(line.passed);
  CHECK_FALSE(line.witness_identically_zero);

  CHECK_THROWS_AS(nondegeneracy_gate(A2("1/y1", "0", "0", "1"), pt({0, 1})), PoleError);
}

TEST_CASE("gate: resultant and trace tests agree for n = 2 symbolic fields") {
  Rng rng(32);
  for (int k = 0; k < 30; ++k) {
    ExprMatrix m(2, 2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) m(i, j) = testsupport::random_poly(rng, 2, 1, 2, 2);
    if (det(m).is_zero()) continue;
    const std::vector<mpq_class> base{testsupport::small_rational(rng, 2, 1),
                                      testsupport::small_rational(rng, 2, 1)};
    // nondegeneracy_gate throws if the two tests disagree.
    const GateReport g = nondegeneracy_gate(OperatorField(m), base);
    CHECK(g.trace_test.has_value());
    CHECK(*g.trace_test == g.resultant_test);
  }
}

TEST_CASE("D tensor: examples") {
  const SymOperator id = d_tensor_solve(A2("1", "0", "0", "1"));
  CHECK(id.matrix == ExprMatrix::identity(3, 2));
  const SymOperator d = d_tensor_solve(A2("2", "0", "0", "3"));
  CHECK(d.matrix == ExprMatrix::from_rows({{P("1/2"), P("0"), P("0")}, {P("0"), P("2/5"), P("0")}, {P("0"), P("0"), P("1/3")}}));
  CHECK(d_component(d, 0, 1, 0, 1) == d_component(d, 1, 0, 1, 0));

  const OperatorField a = A2("y1", "1", "y2", "2");
  CHECK(d_tensor_solve(a).matrix * lambda_sym_matrix(a).matrix == ExprMatrix::identity(3, 2));
}

TEST_CASE("D tensor: Cayley route matches elimination") {
  Rng rng(33);
  for (int k = 0; k < 4; ++k) {
    ExprMatrix m(2, 2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) m(i, j) = testsupport::random_poly(rng, 2, 1, 2, 3);
    if (det(m).is_zero() || trace(m).is_zero()) continue;
    const OperatorField a(m);
    const SymOperator ref = d_tensor_solve(a);
    CHECK(d_tensor_cayley_n2(a).matrix == ref.matrix);
    CHECK(d_tensor_cayley(a).matrix == ref.matrix);
  }
  for (int checked = 0; checked < 5;) {
    const auto f = testsupport::simple_spectrum_matrix(rng, 3, 3);
    const OperatorField a(f.a);
    if (!nondegeneracy_gate(a, pt({0, 0, 0})).passed) continue;  // lambda_i = -lambda_j
    CHECK(d_tensor_cayley(a).matrix == d_tensor_solve(a).matrix);
    ++checked;
  }
}

TEST_CASE("solve_theta: examples") {
  Rng rng(34);
  const Connection g = random_connection(rng, 2, 1);
  CHECK(solve_theta(A2("1", "0", "0", "1"), g) == g);

  const OperatorField a1(ExprMatrix::from_rows({{S("y^2 + 1")}}));
  const Connection th = solve_theta(a1, scalar_connection("1/y"));
  CHECK(th(0, 0, 0) == S("1/y - 2*y/(y^2 + 1)"));

  // Diffusion form gives theta = 0 on every route.
  const OperatorField a = A2("y1 + 2", "1", "0", "y2 + 3");
  const Connection gd = diffusion_connection(a);
  for (DRoute r : {DRoute::kSolve, DRoute::kCayley, DRoute::kBoth}) CHECK(solve_theta(a, gd, r).is_zero());
}

TEST_CASE("solve_theta: residual vanishes on random systems") {
  Rng rng(35);
  for (int k = 0; k < 6; ++k) {
    ExprMatrix m(2, 2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        m(i, j) = testsupport::random_poly(rng, 2, 1, 2, 2) + Expr::constant(2, i == j ? 3 + i : 0);
    const OperatorField a(m);
    const Connection g = random_connection(rng, 2, 1);
    const Connection th = solve_theta(a, g, DRoute::kBoth);
    CHECK(theta_residual(a, g, th).is_zero());
    // The residual is a real test: a perturbed theta fails it.
    Connection bad = th;
    bad.set(0, 0, 1, th(0, 0, 1) + Expr::constant(2, 1));
    CHECK_FALSE(theta_residual(a, g, bad).is_zero());
  }
  for (int k = 0; k < 2; ++k) {
    const auto f = testsupport::simple_spectrum_matrix(rng, 3, 3);
    ExprMatrix m = f.a;
    m(0, 0) += Expr::variable(3, 1);
    const OperatorField a(m);
    const Connection g = random_connection(rng, 3, 1);
    CHECK(theta_residual(a, g, solve_theta(a, g)).is_zero());
  }
}

TEST_CASE("zero_curvature: examples and agreement with a direct expansion") {
  CHECK(zero_curvature(Connection(2, 2)).is_flat());
  CHECK(zero_curvature(scalar_connection("1/y")).is_flat());
  CHECK(zero_curvature(scalar_connection("1/y")).components.empty());

  // Constant theta: R is the commutator of the theta matrices.
  Connection c(2, 2);
  c.set(0, 0, 1, P("1"));
  c.set(1, 0, 0, P("1"));
  const CurvatureResidual r = zero_curvature(c);
  CHECK_FALSE(r.is_flat());
  CHECK_FALSE(brute_force_flat(c));
  const auto nz = r.nonzero();
  REQUIRE_FALSE(nz.empty());
  for (const auto& comp : r.components) CHECK(comp.k < comp.q);
  for (std::size_t i = 1; i < r.components.size(); ++i) {
    const auto& a = r.components[i - 1];
    const auto& b = r.components[i];
    CHECK(std::tie(a.m, a.k, a.q, a.p) < std::tie(b.m, b.k, b.q, b.p));
  }

  Rng rng(36);
  int flat = 0, curved = 0;
  for (int k = 0; k < 12; ++k) {
    Connection t = random_connection(rng, 2, 1);
    if (k % 3 == 0) t = theta_from_transform(PointTransform(testsupport::make_round_trip(rng, 2).phi));
    const bool lib = zero_curvature(t).is_flat();
    CHECK(lib == brute_force_flat(t));
    (lib ? flat : curved)++;
  }
  CHECK(flat >= 4);
  CHECK(curved >= 4);
}

TEST_CASE("decide: verdicts and witness") {
  const OperatorField id = A2("1", "0", "0", "1");
  const Verdict flat = decide(id, Connection(2, 2), pt({0, 0}));
  CHECK(flat.status == Status::kReducible);
  REQUIRE(flat.theta);
  CHECK(flat.theta->is_zero());
  CHECK(flat.curvature_witness.empty());

  Connection g(2, 2);
  g.set(0, 0, 1, P("1"));
  g.set(1, 0, 0, P("1"));
  const Verdict nr = decide(id, g, pt({0, 0}));
  CHECK(nr.status == Status::kNotReducible);
  REQUIRE_FALSE(nr.curvature_witness.empty());
  // The first nonzero component in (m, k, q, p) order.
  const auto& w = nr.curvature_witness.front();
  const auto first = zero_curvature(*nr.theta).nonzero().front();
  CHECK(std::tie(w.m, w.k, w.q, w.p) == std::tie(first.m, first.k, first.q, first.p));
  CHECK(w.value == first.value);
  CHECK(w.at_base == std::optional<mpq_class>(w.value.constant_value()));

  const Verdict deg = decide(A2("1", "0", "0", "-1"), g, pt({0, 0}));
  CHECK(deg.status == Status::kDegenerate);
  CHECK_FALSE(deg.theta);

  CHECK_THROWS_AS(decide(A2("1", "0", "0", "1"), g, pt({0})), DimensionError);
}

TEST_CASE("decide: round trips are reducible and theta matches the construction") {
  Rng rng(37);
  for (int k = 0; k < 3; ++k) {
    const auto rt = testsupport::make_round_trip(rng, 2);
    const Problem p = build_problem(parse_problem_text(
        [&] {
          // Push the diffusion system through the map by hand via the CLI format.
          const PointTransform to_y(rt.phi_inv, rt.phi);
          const OperatorField a(rt.a_diffusion);
          return write_problem_text(to_problem_file(rt.y_vars, transform_operator(a, to_y),
                                                    transform_connection(diffusion_connection(a), to_y),
                                                    rt.base_y));
        }()));
    const Verdict v = decide(p.a, p.gamma, *p.base);
    CHECK(v.status == Status::kReducible);
    REQUIRE(v.theta);
    CHECK(*v.theta == testsupport::expected_theta(rt));
  }
}

TEST_CASE("decide: repeated eigenvalues are not rejected by the gate") {
  // A = 2I + N with N nilpotent: not diagonalisable, but lambda_i + lambda_j != 0.
  const OperatorField a = A2("2", "y1", "0", "2");
  Rng rng(38);
  const Connection g = random_connection(rng, 2, 1);
  const Verdict v = decide(a, g, pt({1, 1}));
  CHECK(v.gate.passed);
  REQUIRE(v.theta);
  CHECK(theta_residual(a, g, *v.theta).is_zero());
}

TEST_CASE("decide: pole at the base point") {
  Connection g(2, 2);
  g.set(0, 0, 0, P("1/(y1 - 1)"));
  CHECK_THROWS_AS(decide(A2("1", "0", "0", "1"), g, pt({1, 0})), PoleError);
}
