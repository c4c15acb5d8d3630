#include "diffred/expr.hpp"

#include <algorithm>
#include <cctype>
#include <random>

#include "diffred/errors.hpp"

namespace diffred {

namespace {

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

Poly exact_quotient(const Poly& a, const Poly& b) {
  auto q = a.divide_exact(b);
  if (!q) throw Error("internal: expected exact polynomial division");
  return std::move(*q);
}

// sum_t c_t * prod_i a_i^{e_i} * b_i^{E_i - e_i}
Poly homogenized(const Poly& p, const std::vector<std::vector<Poly>>& apow,
                 const std::vector<std::vector<Poly>>& bpow,
                 const std::vector<unsigned>& top, std::size_t target) {
  std::vector<Term> acc;
  for (const auto& t : p.terms()) {
    Poly prod = Poly::constant(target, t.coeff);
    for (std::size_t v = 0; v < p.nvars(); ++v) {
      const unsigned e = t.mono.exp[v];
      if (e != 0) prod *= apow[v][e];
      if (top[v] != e) prod *= bpow[v][top[v] - e];
    }
    for (const auto& pt : prod.terms()) acc.push_back(pt);
  }
  return Poly::from_terms(target, std::move(acc));
}

}  // namespace

VarSet::VarSet(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!valid_identifier(names_[i])) {
      throw InputError("invalid variable name '" + names_[i] + "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) throw InputError("duplicate variable name '" + names_[i] + "'");
    }
  }
  if (names_.size() > kMaxVars) {
    throw DimensionError("at most " + std::to_string(kMaxVars) + " variables are supported");
  }
}

VarSet VarSet::numbered(std::string_view prefix, std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back(std::string(prefix) + std::to_string(i));
  return VarSet(std::move(names));
}

std::optional<std::size_t> VarSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

VarSet VarSet::extended(const std::vector<std::string>& extra) const {
  std::vector<std::string> all = names_;
  all.insert(all.end(), extra.begin(), extra.end());
  return VarSet(std::move(all));
}

Expr::Expr(std::size_t nvars) : num_(nvars), den_(Poly::constant(nvars, 1)) {}

Expr::Expr(Poly num, Poly den, int) : num_(std::move(num)), den_(std::move(den)) {}

Expr Expr::constant(std::size_t nvars, const mpq_class& c) {
  mpq_class q = c;  // callers may pass an mpq_class built without canonicalize()
  q.canonicalize();
  return Expr(Poly::constant(nvars, q.get_num()), Poly::constant(nvars, q.get_den()), 0);
}

Expr Expr::variable(std::size_t nvars, std::size_t index) {
  return Expr(Poly::variable(nvars, index), Poly::constant(nvars, 1), 0);
}

Expr Expr::polynomial(Poly p) {
  const std::size_t n = p.nvars();
  return Expr(std::move(p), Poly::constant(n, 1), 0);
}

Expr Expr::fraction(Poly num, Poly den) {
  if (num.nvars() != den.nvars()) throw DimensionError("fraction parts from different rings");
  if (den.is_zero()) throw DivisionByZeroError("division by zero");
  const std::size_t n = num.nvars();
  if (num.is_zero()) return Expr(n);
  if (!den.is_one()) {
    const Poly g = gcd(num, den);
    if (!g.is_one()) {
      num = exact_quotient(num, g);
      den = exact_quotient(den, g);
    }
  }
  if (den.sign() < 0) {
    num = -num;
    den = -den;
  }
  return Expr(std::move(num), std::move(den), 0);
}

mpq_class Expr::constant_value() const {
  if (!is_constant()) throw Error("expression is not constant");
  mpq_class q(num_.constant_value(), den_.constant_value());
  q.canonicalize();
  return q;
}

bool Expr::depends_on(std::size_t var) const {
  return num_.depends_on(var) || den_.depends_on(var);
}

Expr Expr::operator-() const { return Expr(-num_, den_, 0); }

Expr& Expr::operator+=(const Expr& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  if (den_.is_one() && o.den_.is_one()) {
    num_ += o.num_;
    return *this;
  }
  if (den_ == o.den_) {
    return *this = fraction(num_ + o.num_, den_);
  }
  // Henrici: with g = gcd(b, d), gcd(a d/g + c b/g, b d/g) = gcd(that, g).
  const Poly g = gcd(den_, o.den_);
  const Poly b1 = exact_quotient(den_, g);
  const Poly d1 = exact_quotient(o.den_, g);
  Poly num = num_ * d1 + o.num_ * b1;
  Poly den = b1 * o.den_;
  if (num.is_zero()) return *this = Expr(nvars());
  if (!g.is_one()) {
    const Poly h = gcd(num, g);
    if (!h.is_one()) {
      num = exact_quotient(num, h);
      den = exact_quotient(den, h);
    }
  }
  if (den.sign() < 0) {
    num = -num;
    den = -den;
  }
  num_ = std::move(num);
  den_ = std::move(den);
  return *this;
}

Expr& Expr::operator-=(const Expr& o) { return *this += -o; }

Expr& Expr::operator*=(const Expr& o) {
  if (is_zero()) return *this;
  if (o.is_zero()) return *this = Expr(nvars());
  if (den_.is_one() && o.den_.is_one()) {
    num_ *= o.num_;
    return *this;
  }
  // Cross-cancel: (a/b)(c/d) = (a/g1)(c/g2) / ((b/g2)(d/g1)).
  const Poly g1 = gcd(num_, o.den_);
  const Poly g2 = gcd(o.num_, den_);
  const Poly a = g1.is_one() ? num_ : exact_quotient(num_, g1);
  const Poly d = g1.is_one() ? o.den_ : exact_quotient(o.den_, g1);
  const Poly c = g2.is_one() ? o.num_ : exact_quotient(o.num_, g2);
  const Poly b = g2.is_one() ? den_ : exact_quotient(den_, g2);
  Poly num = a * c;
  Poly den = b * d;
  if (den.sign() < 0) {
    num = -num;
    den = -den;
  }
  num_ = std::move(num);
  den_ = std::move(den);
  return *this;
}

Expr& Expr::operator/=(const Expr& o) { return *this *= o.reciprocal(); }

Expr Expr::scaled(const mpq_class& c) const { return *this * constant(nvars(), c); }

Expr Expr::reciprocal() const {
  if (is_zero()) throw DivisionByZeroError("division by zero");
  if (num_.sign() < 0) return Expr(-den_, -num_, 0);
  return Expr(den_, num_, 0);
}

Expr Expr::pow(long e) const {
  if (e < 0) return reciprocal().pow(-e);
  if (e == 0) return constant(nvars(), 1);
  // Powers of coprime parts stay coprime; den^e keeps a positive lead.
  return Expr(num_.pow(static_cast<unsigned>(e)), den_.pow(static_cast<unsigned>(e)), 0);
}

Expr Expr::derivative(std::size_t var) const {
  if (var >= nvars()) throw DimensionError("derivative variable out of range");
  if (den_.is_constant()) return fraction(num_.derivative(var), den_);
  // p/q with q = g u, q' = g v: (p/q)' = (p' u - p v) / (q u).
  const Poly dq = den_.derivative(var);
  const Poly dp = num_.derivative(var);
  if (dq.is_zero()) return fraction(dp, den_);
  const Poly g = gcd(den_, dq);
  const Poly u = exact_quotient(den_, g);
  const Poly v = exact_quotient(dq, g);
  return fraction(dp * u - num_ * v, den_ * u);
}

mpq_class Expr::eval(std::span<const mpq_class> point) const {
  const mpq_class d = den_.evaluate(point);
  if (d == 0) throw PoleError("denominator vanishes at the evaluation point");
  mpq_class r = num_.evaluate(point) / d;
  r.canonicalize();
  return r;
}

double Expr::eval(std::span<const double> point) const {
  return num_.evaluate(point) / den_.evaluate(point);
}

Expr Expr::substitute(std::span<const Expr> values) const {
  if (values.size() != nvars()) throw DimensionError("substitution needs one value per variable");
  const std::size_t target = values.empty() ? 0 : values[0].nvars();
  const bool polynomial_values = std::all_of(values.begin(), values.end(),
                                             [](const Expr& v) { return v.is_polynomial(); });
  if (polynomial_values) {
    std::vector<Poly> polys;
    for (const auto& v : values) polys.push_back(v.num_);
    return fraction(num_.substitute(polys), den_.substitute(polys));
  }
  std::vector<unsigned> top(nvars());
  std::vector<std::vector<Poly>> apow(nvars()), bpow(nvars());
  for (std::size_t v = 0; v < nvars(); ++v) {
    top[v] = std::max(num_.degree(v), den_.degree(v));
    apow[v].push_back(Poly::constant(target, 1));
    bpow[v].push_back(Poly::constant(target, 1));
    for (unsigned k = 1; k <= top[v]; ++k) {
      apow[v].push_back(apow[v].back() * values[v].num_);
      bpow[v].push_back(bpow[v].back() * values[v].den_);
    }
  }
  Poly den = homogenized(den_, apow, bpow, top, target);
  if (den.is_zero()) throw DivisionByZeroError("substitution makes the denominator vanish");
  return fraction(homogenized(num_, apow, bpow, top, target), std::move(den));
}

Expr Expr::with_nvars(std::size_t n) const {
  return Expr(num_.with_nvars(n), den_.with_nvars(n), 0);
}

std::string Expr::to_string(std::span<const std::string> names) const {
  if (den_.is_one()) return num_.to_string(names);
  std::string num = num_.to_string(names);
  std::string den = den_.to_string(names);
  if (num_.size() > 1) num = "(" + num + ")";
  // An integer or a lone power such as y1^2 binds tighter than '/', anything
  // else is parenthesized.
  bool bare = den_.size() == 1 && (den_.terms()[0].coeff == 1 || den_.is_constant());
  if (bare && !den_.is_constant()) {
    const auto& e = den_.terms()[0].mono.exp;
    bare = std::count_if(e.begin(), e.end(), [](auto x) { return x != 0; }) <= 1;
  }
  if (!bare) den = "(" + den + ")";
  return num + "/" + den;
}

bool is_zero(const Expr& e) { return e.is_zero(); }

bool is_zero(const Expr& e, const ProbeOptions& probe) {
  if (probe.points > 0 && e.nvars() > 0) {
    for (const auto& pt : random_points(e.nvars(), static_cast<std::size_t>(probe.points),
                                        probe.seed)) {
      if (e.numerator().evaluate(pt) != 0) return false;
    }
  }
  return e.is_zero();
}

std::vector<std::vector<mpq_class>> random_points(std::size_t nvars, std::size_t count,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> num(-997, 997);
  std::uniform_int_distribution<long> den(1, 89);
  std::vector<std::vector<mpq_class>> pts(count, std::vector<mpq_class>(nvars));
  for (auto& p : pts) {
    for (auto& x : p) {
      x = mpq_class(num(rng), den(rng));
      x.canonicalize();
    }
  }
  return pts;
}

}  // namespace diffred
