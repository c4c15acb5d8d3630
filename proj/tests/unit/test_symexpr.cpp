#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <memory>
#include <optional>

#include "diffred/errors.hpp"
#include "diffred/expr.hpp"
#include "diffred/parser.hpp"
#include "support.hpp"

using namespace diffred;
using testsupport::Rng;

namespace {

const VarSet& yy() {
  static const VarSet v({"y1", "y2"});
  return v;
}

Expr P(const char* s) { return parse_expr(s, yy()); }

mpq_class at(const Expr& e, std::initializer_list<mpq_class> pt) {
  std::vector<mpq_class> p(pt);
  return e.eval(p);
}

// Expression tree evaluated directly in rationals, without any
// canonicalization. Serves as the oracle for the canonical form.
struct Node {
  enum Kind { kVar, kConst, kAdd, kSub, kMul, kDiv, kPow } kind;
  std::size_t var = 0;
  mpq_class value;
  long exponent = 0;
  std::shared_ptr<Node> a, b;

  std::optional<mpq_class> eval(const std::vector<mpq_class>& pt) const {
    switch (kind) {
      case kVar: return pt[var];
      case kConst: return value;
      case kPow: {
        auto x = a->eval(pt);
        if (!x || (exponent < 0 && *x == 0)) return std::nullopt;
        mpq_class r = 1;
        for (long i = 0; i < std::abs(exponent); ++i) r *= *x;
        return exponent < 0 ? mpq_class(1 / r) : r;
      }
      default: break;
    }
    auto x = a->eval(pt), y = b->eval(pt);
    if (!x || !y) return std::nullopt;
    switch (kind) {
      case kAdd: return *x + *y;
      case kSub: return *x - *y;
      case kMul: return *x * *y;
      default: break;
    }
    if (*y == 0) return std::nullopt;
    return *x / *y;
  }

  std::string text(const std::vector<std::string>& names) const {
    switch (kind) {
      case kVar: return names[var];
      case kConst: return "(" + value.get_str() + ")";
      case kPow: return "(" + a->text(names) + ")^" + std::to_string(exponent);
      case kAdd: return "(" + a->text(names) + ")+(" + b->text(names) + ")";
      case kSub: return "(" + a->text(names) + ")-(" + b->text(names) + ")";
      case kMul: return "(" + a->text(names) + ")*(" + b->text(names) + ")";
      case kDiv: return "(" + a->text(names) + ")/(" + b->text(names) + ")";
    }
    return {};
  }

  // Built with the library's arithmetic, operation by operation.
  Expr build(std::size_t nvars) const {
    switch (kind) {
      case kVar: return Expr::variable(nvars, var);
      case kConst: return Expr::constant(nvars, value);
      case kPow: return a->build(nvars).pow(exponent);
      case kAdd: return a->build(nvars) + b->build(nvars);
      case kSub: return a->build(nvars) - b->build(nvars);
      case kMul: return a->build(nvars) * b->build(nvars);
      case kDiv: return a->build(nvars) / b->build(nvars);
    }
    return Expr(nvars);
  }
};
using NodeP = std::shared_ptr<Node>;

NodeP leaf(Rng& rng, std::size_t nvars) {
  auto n = std::make_shared<Node>();
  if (testsupport::uniform_int(rng, 0, 2) == 0) {
    n->kind = Node::kConst;
    n->value = testsupport::small_rational(rng, 4, 3);
  } else {
    n->kind = Node::kVar;
    n->var = static_cast<std::size_t>(testsupport::uniform_int(rng, 0, nvars - 1));
  }
  return n;
}

NodeP binary(Node::Kind k, NodeP a, NodeP b) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodeP random_tree(Rng& rng, std::size_t nvars, int depth) {
  if (depth == 0 || testsupport::uniform_int(rng, 0, 4) == 0) return leaf(rng, nvars);
  const long k = testsupport::uniform_int(rng, 0, 5);
  if (k == 5) {
    auto n = std::make_shared<Node>();
    n->kind = Node::kPow;
    n->a = random_tree(rng, nvars, depth - 1);
    n->exponent = testsupport::uniform_int(rng, -2, 3);
    return n;
  }
  static const Node::Kind ops[] = {Node::kAdd, Node::kSub, Node::kMul, Node::kDiv, Node::kMul};
  return binary(ops[k], random_tree(rng, nvars, depth - 1), random_tree(rng, nvars, depth - 1));
}

// A tree for the same function, reached through algebraic rewrites.
NodeP rewrite(Rng& rng, const NodeP& n, std::size_t nvars) {
  NodeP r = n;
  if (n->a) {
    r = std::make_shared<Node>(*n);
    r->a = rewrite(rng, n->a, nvars);
    if (n->b) r->b = rewrite(rng, n->b, nvars);
  }
  switch (testsupport::uniform_int(rng, 0, 5)) {
    case 0:
      if (r->kind == Node::kAdd || r->kind == Node::kMul) return binary(r->kind, r->b, r->a);
      return r;
    case 1: {  // x -> (x*k)/k
      NodeP k = random_tree(rng, nvars, 1);
      return binary(Node::kDiv, binary(Node::kMul, r, k), k);
    }
    case 2: {  // x -> (x + k) - k
      NodeP k = random_tree(rng, nvars, 2);
      return binary(Node::kSub, binary(Node::kAdd, r, k), k);
    }
    case 3:  // a*(b+c) -> a*b + a*c
      if (r->kind == Node::kMul && r->b->kind == Node::kAdd) {
        return binary(Node::kAdd, binary(Node::kMul, r->a, r->b->a), binary(Node::kMul, r->a, r->b->b));
      }
      return r;
    default:
      return r;
  }
}

}  // namespace

TEST_CASE("parse: grammar examples") {
  const Expr e = P("y1^2 + 3*y2");
  CHECK(e.is_polynomial());
  CHECK(e.numerator().total_degree() == 2);
  CHECK(at(e, {2, 5}) == 19);

  CHECK_THROWS_AS(P("1/(y1 - y1)"), DivisionByZeroError);
  CHECK(at(P("(y1*y2)/(y1+1)"), {1, 2}) == 1);

  CHECK(P("2^3^2") == P("512"));          // right associative
  CHECK(P("-y1^2") == -P("y1^2"));         // power binds tighter than unary minus
  CHECK(P("y1^-2") == P("1/(y1*y1)"));
  CHECK(P("y1^(-1)") == P("1/y1"));
  CHECK(P("3/4") == Expr::constant(2, mpq_class(3, 4)));
  CHECK(P("  y1*  y2 ") == P("y1*y2"));
  CHECK(P("y1 - y2 - y1") == -P("y2"));    // left associative minus
  CHECK(P("6/3/2") == P("1"));
  CHECK(P("0^0") == P("1"));
}

TEST_CASE("parse: errors carry positions and names") {
  try {
    P("y1 + * y2");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.position() == 5);
  }
  try {
    P("y1 + y3");
    FAIL("expected an unknown-variable error");
  } catch (const UnknownVariableError& e) {
    CHECK(e.name() == "y3");
    CHECK(std::string(e.what()).find("y3") != std::string::npos);
  }
  CHECK_THROWS_AS(P("(y1 + y2"), SyntaxError);
  CHECK_THROWS_AS(P("y1^y2"), SyntaxError);
  CHECK_THROWS_AS(P("y1^(1/2)"), SyntaxError);
  CHECK_THROWS_AS(P(""), SyntaxError);
  CHECK_THROWS_AS(P("y1 y2"), SyntaxError);
  CHECK_THROWS_AS(P("0^-1"), DivisionByZeroError);
  CHECK_THROWS_AS(P("y1/0"), DivisionByZeroError);
}

TEST_CASE("variable sets validate names") {
  CHECK_THROWS_AS(VarSet({"y1", "y1"}), InputError);
  CHECK_THROWS_AS(VarSet({"1y"}), InputError);
  CHECK(VarSet::numbered("u", 3).names() == std::vector<std::string>{"u1", "u2", "u3"});
  CHECK(yy().index_of("y2") == 1u);
  CHECK_FALSE(yy().index_of("z").has_value());
}

TEST_CASE("differentiate: examples") {
  CHECK(P("y1^2").derivative(0) == P("2*y1"));
  CHECK(P("y2").derivative(0) == P("0"));
  CHECK(P("y1/y2").derivative(1) == P("-y1/y2^2"));
  CHECK(P("1/(y1^2 + 1)").derivative(0) == P("-2*y1/(y1^2+1)^2"));
  CHECK_THROWS_AS(P("y1").derivative(2), DimensionError);
}

TEST_CASE("evaluate: examples") {
  CHECK(at(P("(y1+y2)/2"), {1, 3}) == 2);
  CHECK_THROWS_AS(at(P("1/y1"), {0, 1}), PoleError);
  CHECK(at(P("y1*y2^2"), {2, 3}) == 18);
  CHECK(at(P("y1/3 - y2/7"), {mpq_class(1, 2), 1}) == mpq_class(1, 42));
  const std::vector<double> pt{2.0, 3.0};
  CHECK(P("y1*y2^2").eval(std::span<const double>(pt)) == doctest::Approx(18.0));
}

TEST_CASE("is_zero: examples") {
  CHECK(is_zero(P("(y1+y2)^2 - y1^2 - 2*y1*y2 - y2^2")));
  CHECK_FALSE(is_zero(P("y1 - y2")));
  CHECK(is_zero(P("(y1^2-1)/(y1-1) - (y1+1)")));
  const ProbeOptions probe;
  CHECK(is_zero(P("(y1+y2)^2 - y1^2 - 2*y1*y2 - y2^2"), probe));
  CHECK_FALSE(is_zero(P("y1 - y2"), probe));
  CHECK(is_zero(P("(y1^2-1)/(y1-1) - (y1+1)"), probe));
}

TEST_CASE("canonical form: equal functions have identical representations") {
  CHECK(P("(y1^2-1)/(y1-1)") == P("y1+1"));
  CHECK(P("1/(-y1)") == P("-1/y1"));
  CHECK(P("(2*y1)/(4*y2)") == P("y1/(2*y2)"));
  CHECK(P("(y1*y2 + y2)/(y1^2 - 1)") == P("y2/(y1 - 1)"));
  const Expr e = P("(3*y1 - 3)/(-6*y2 + 6)");
  CHECK(e.denominator().leading().coeff > 0);
  CHECK(e.numerator().content() == 1);
  CHECK(e == P("(1 - y1)/(2*y2 - 2)"));
  // Non-canonical rationals from callers are normalized.
  CHECK(Expr::constant(2, mpq_class(-2, 2)) == P("-1"));
}

TEST_CASE("print then parse is idempotent on canonical forms") {
  Rng rng(11);
  int checked = 0;
  for (int k = 0; k < 300; ++k) {
    const NodeP t = random_tree(rng, 2, 4);
    Expr e;
    try {
      e = t->build(2);
    } catch (const DivisionByZeroError&) {
      continue;
    }
    const std::string s = e.to_string(yy());
    const Expr back = P(s.c_str());
    CHECK_MESSAGE(back == e, s);
    CHECK(back.to_string(yy()) == s);
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("canonical-form soundness against direct evaluation, 1000 pairs") {
  Rng rng(20240601);
  const std::vector<std::string> names{"y1", "y2", "y3"};
  const VarSet vars(names);
  int pairs = 0, equal_pairs = 0, agree = 0;
  while (pairs < 1000) {
    const NodeP t1 = random_tree(rng, 3, 3);
    NodeP t2;
    switch (testsupport::uniform_int(rng, 0, 2)) {
      case 0: t2 = random_tree(rng, 3, 3); break;
      case 1: t2 = rewrite(rng, t1, 3); break;
      default: {  // near miss: rewritten, then nudged by a constant
        auto c = std::make_shared<Node>();
        c->kind = Node::kConst;
        c->value = mpq_class(1, 1000);
        t2 = binary(Node::kAdd, rewrite(rng, t1, 3), c);
      }
    }
    Expr diff;
    try {
      // One side through the parser, the other through direct arithmetic.
      diff = parse_expr(t1->text(names), vars) - t2->build(3);
    } catch (const DivisionByZeroError&) {
      continue;  // a subexpression is identically zero and divides
    }
    std::vector<std::vector<mpq_class>> points;
    for (int tries = 0; points.size() < 20 && tries < 400; ++tries) {
      std::vector<mpq_class> p;
      for (int i = 0; i < 3; ++i) p.push_back(testsupport::small_rational(rng, 9, 5));
      const auto v1 = t1->eval(p), v2 = t2->eval(p);
      if (!v1 || !v2) continue;
      points.push_back(p);
    }
    if (points.size() < 20) continue;
    bool all_equal = true;
    for (const auto& p : points) all_equal &= *t1->eval(p) == *t2->eval(p);
    ++pairs;
    equal_pairs += all_equal;
    if (is_zero(diff) == all_equal) ++agree;
  }
  CHECK(agree == 1000);
  // Both outcomes must be well represented for the check to mean anything.
  CHECK(equal_pairs > 200);
  CHECK(1000 - equal_pairs > 200);
}

TEST_CASE("product rule, quotient rule and mixed partials") {
  Rng rng(7);
  for (int k = 0; k < 60; ++k) {
    Expr e1, e2;
    try {
      e1 = random_tree(rng, 2, 3)->build(2);
      e2 = random_tree(rng, 2, 3)->build(2);
    } catch (const DivisionByZeroError&) {
      continue;
    }
    for (std::size_t v = 0; v < 2; ++v) {
      CHECK((e1 * e2).derivative(v) == e1.derivative(v) * e2 + e1 * e2.derivative(v));
      CHECK((e1 + e2).derivative(v) == e1.derivative(v) + e2.derivative(v));
      if (!e2.is_zero()) {
        CHECK((e1 / e2).derivative(v) ==
              (e1.derivative(v) * e2 - e1 * e2.derivative(v)) / (e2 * e2));
      }
    }
    CHECK(e1.derivative(0).derivative(1) == e1.derivative(1).derivative(0));
  }
}

TEST_CASE("substitution composes") {
  const VarSet uv({"u1", "u2"});
  const std::vector<Expr> vals{parse_expr("u1 + u2^2", uv), parse_expr("1/u1", uv)};
  const Expr e = P("y1*y2 + y2^2");
  CHECK(e.substitute(vals) == parse_expr("(u1 + u2^2)/u1 + 1/u1^2", uv));
  const std::vector<Expr> poly_vals{parse_expr("u1 - u2", uv), parse_expr("2*u2", uv)};
  CHECK(P("(y1 + y2)/y2").substitute(poly_vals) == parse_expr("(u1 + u2)/(2*u2)", uv));
  const std::vector<Expr> zero_den{parse_expr("u1", uv), parse_expr("0", uv)};
  CHECK_THROWS_AS(P("1/y2").substitute(zero_den), DivisionByZeroError);
}

TEST_CASE("gcd: heuristic and subresultant strategies agree") {
  Rng rng(5);
  int heuristic_used = 0;
  for (int k = 0; k < 150; ++k) {
    const Expr f = testsupport::random_poly(rng, 3, 3, 4, 5);
    const Expr g = testsupport::random_poly(rng, 3, 3, 4, 5);
    const Expr h = testsupport::random_poly(rng, 3, 2, 3, 5);
    if (h.is_zero()) continue;
    const Poly a = (f * h).numerator(), b = (g * h).numerator();
    const Poly prs = detail::gcd_prs(a, b);
    if (!a.is_zero() && !b.is_zero()) {
      CHECK(a.divide_exact(prs).has_value());
      CHECK(b.divide_exact(prs).has_value());
      CHECK(prs.divide_exact(h.numerator().divided_by(h.numerator().content())).has_value());
    }
    if (auto heu = detail::gcd_heuristic(a, b)) {
      ++heuristic_used;
      CHECK(*heu == prs);
    }
    CHECK(gcd(a, b) == prs);
  }
  CHECK(heuristic_used > 50);
}
