#include "diffred/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "diffred/errors.hpp"

namespace diffred {

namespace {

void check_same_ring(const Poly& a, const Poly& b) {
  if (a.nvars() != b.nvars()) {
    throw DimensionError("polynomials from rings with " +
                         std::to_string(a.nvars()) + " and " +
                         std::to_string(b.nvars()) + " variables");
  }
}

// out = a + sign*b, both inputs sorted.
std::vector<Term> merge_terms(const std::vector<Term>& a,
                              const std::vector<Term>& b, bool subtract) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->mono == ib->mono) {
      mpz_class c = subtract ? mpz_class(ia->coeff - ib->coeff)
                             : mpz_class(ia->coeff + ib->coeff);
      if (c != 0) out.push_back({ia->mono, std::move(c)});
      ++ia;
      ++ib;
    } else if (grlex_greater(ia->mono, ib->mono)) {
      out.push_back(*ia++);
    } else {
      out.push_back({ib->mono, subtract ? mpz_class(-ib->coeff) : ib->coeff});
      ++ib;
    }
  }
  for (; ia != a.end(); ++ia) out.push_back(*ia);
  for (; ib != b.end(); ++ib) {
    out.push_back({ib->mono, subtract ? mpz_class(-ib->coeff) : ib->coeff});
  }
  return out;
}

}  // namespace

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    const unsigned e = unsigned(a.exp[i]) + unsigned(b.exp[i]);
    if (e > std::numeric_limits<std::uint16_t>::max()) {
      throw DegreeError("monomial exponent overflow");
    }
    r.exp[i] = static_cast<std::uint16_t>(e);
  }
  r.degree = a.degree + b.degree;
  return r;
}

bool divides(const Monomial& d, const Monomial& m) {
  if (d.degree > m.degree) return false;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    if (d.exp[i] > m.exp[i]) return false;
  }
  return true;
}

Monomial quotient(const Monomial& m, const Monomial& d) {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    r.exp[i] = static_cast<std::uint16_t>(m.exp[i] - d.exp[i]);
  }
  r.degree = m.degree - d.degree;
  return r;
}

Poly::Poly(std::size_t nvars) : nvars_(nvars) {
  if (nvars > kMaxVars) {
    throw DimensionError("at most " + std::to_string(kMaxVars) +
                         " variables are supported");
  }
}

Poly Poly::constant(std::size_t nvars, const mpz_class& c) {
  Poly p(nvars);
  if (c != 0) p.terms_.push_back({Monomial{}, c});
  return p;
}

Poly Poly::variable(std::size_t nvars, std::size_t index) {
  if (index >= nvars) throw DimensionError("variable index out of range");
  Poly p(nvars);
  Monomial m;
  m.exp[index] = 1;
  m.degree = 1;
  p.terms_.push_back({m, 1});
  return p;
}

Poly Poly::from_terms(std::size_t nvars, std::vector<Term> terms) {
  Poly p(nvars);
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return grlex_greater(a.mono, b.mono);
  });
  p.terms_.reserve(terms.size());
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
      p.terms_.back().coeff += t.coeff;
    } else {
      if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.degree == 0);
}

bool Poly::is_one() const {
  return terms_.size() == 1 && terms_[0].mono.degree == 0 &&
         terms_[0].coeff == 1;
}

mpz_class Poly::constant_value() const {
  if (terms_.empty()) return 0;
  return terms_.front().coeff;
}

unsigned Poly::degree(std::size_t var) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max<unsigned>(d, t.mono.exp[var]);
  return d;
}

unsigned Poly::total_degree() const {
  return terms_.empty() ? 0 : terms_.front().mono.degree;
}

bool Poly::depends_on(std::size_t var) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [var](const Term& t) { return t.mono.exp[var] != 0; });
}

mpz_class Poly::content() const {
  mpz_class g = 0;
  for (const auto& t : terms_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coeff.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

mpz_class Poly::max_norm() const {
  mpz_class m = 0;
  for (const auto& t : terms_) {
    if (mpz_cmpabs(t.coeff.get_mpz_t(), m.get_mpz_t()) > 0) m = abs(t.coeff);
  }
  return m;
}

int Poly::sign() const {
  return terms_.empty() ? 0 : sgn(terms_.front().coeff);
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  check_same_ring(*this, o);
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  terms_ = merge_terms(terms_, o.terms_, false);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  check_same_ring(*this, o);
  if (o.is_zero()) return *this;
  terms_ = merge_terms(terms_, o.terms_, true);
  return *this;
}

Poly& Poly::operator*=(const Poly& o) { return *this = *this * o; }

Poly operator*(const Poly& a, const Poly& b) {
  check_same_ring(a, b);
  if (a.is_zero() || b.is_zero()) return Poly(a.nvars_);
  if (a.size() == 1) return b.times_monomial(a.leading().mono, a.leading().coeff);
  if (b.size() == 1) return a.times_monomial(b.leading().mono, b.leading().coeff);

  struct Entry {
    Monomial mono;
    std::uint32_t i;
    std::uint32_t j;
  };
  std::vector<Entry> entries;
  entries.reserve(a.size() * b.size());
  for (std::uint32_t i = 0; i < a.size(); ++i) {
    for (std::uint32_t j = 0; j < b.size(); ++j) {
      entries.push_back({a.terms_[i].mono * b.terms_[j].mono, i, j});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return grlex_greater(x.mono, y.mono);
  });
  Poly r(a.nvars_);
  mpz_class acc;
  for (std::size_t k = 0; k < entries.size();) {
    acc = 0;
    std::size_t l = k;
    for (; l < entries.size() && entries[l].mono == entries[k].mono; ++l) {
      mpz_addmul(acc.get_mpz_t(), a.terms_[entries[l].i].coeff.get_mpz_t(),
                 b.terms_[entries[l].j].coeff.get_mpz_t());
    }
    if (acc != 0) r.terms_.push_back({entries[k].mono, acc});
    k = l;
  }
  return r;
}

Poly Poly::scaled(const mpz_class& c) const {
  if (c == 0) return Poly(nvars_);
  Poly r = *this;
  for (auto& t : r.terms_) t.coeff *= c;
  return r;
}

Poly Poly::times_monomial(const Monomial& m, const mpz_class& c) const {
  Poly r(nvars_);
  if (c == 0) return r;
  r.terms_.reserve(terms_.size());
  for (const auto& t : terms_) r.terms_.push_back({t.mono * m, t.coeff * c});
  return r;
}

Poly Poly::divided_by(const mpz_class& c) const {
  if (c == 0) throw DivisionByZeroError("polynomial divided by zero");
  Poly r = *this;
  for (auto& t : r.terms_) {
    if (!mpz_divisible_p(t.coeff.get_mpz_t(), c.get_mpz_t())) {
      throw Error("inexact coefficient division");
    }
    mpz_divexact(t.coeff.get_mpz_t(), t.coeff.get_mpz_t(), c.get_mpz_t());
  }
  return r;
}

std::optional<Poly> Poly::divide_exact(const Poly& d) const {
  check_same_ring(*this, d);
  if (d.is_zero()) throw DivisionByZeroError("polynomial divided by zero");
  if (is_zero()) return Poly(nvars_);
  if (d.is_constant()) {
    const mpz_class& c = d.terms_[0].coeff;
    for (const auto& t : terms_) {
      if (!mpz_divisible_p(t.coeff.get_mpz_t(), c.get_mpz_t())) return std::nullopt;
    }
    return divided_by(c);
  }
  // Cheap necessary conditions: extreme terms and per-variable degrees.
  const Term& dl = d.terms_.front();
  const Term& dt = d.terms_.back();
  if (!divides(dl.mono, terms_.front().mono) || !divides(dt.mono, terms_.back().mono)) {
    return std::nullopt;
  }
  if (!mpz_divisible_p(terms_.front().coeff.get_mpz_t(), dl.coeff.get_mpz_t()) ||
      !mpz_divisible_p(terms_.back().coeff.get_mpz_t(), dt.coeff.get_mpz_t())) {
    return std::nullopt;
  }
  for (std::size_t v = 0; v < nvars_; ++v) {
    if (d.degree(v) > degree(v)) return std::nullopt;
  }

  std::vector<Term> q;
  std::vector<Term> rem = terms_;
  std::vector<Term> tail(d.terms_.begin() + 1, d.terms_.end());
  std::vector<Term> sub;
  while (!rem.empty()) {
    const Term& lt = rem.front();
    if (!divides(dl.mono, lt.mono) ||
        !mpz_divisible_p(lt.coeff.get_mpz_t(), dl.coeff.get_mpz_t())) {
      return std::nullopt;
    }
    Term qt{quotient(lt.mono, dl.mono), 0};
    mpz_divexact(qt.coeff.get_mpz_t(), lt.coeff.get_mpz_t(), dl.coeff.get_mpz_t());
    sub.clear();
    sub.reserve(tail.size());
    for (const auto& t : tail) sub.push_back({t.mono * qt.mono, t.coeff * qt.coeff});
    std::vector<Term> rest(std::make_move_iterator(rem.begin() + 1),
                           std::make_move_iterator(rem.end()));
    rem = merge_terms(rest, sub, true);
    q.push_back(std::move(qt));
  }
  Poly r(nvars_);
  r.terms_ = std::move(q);
  return r;
}

Poly Poly::pow(unsigned e) const {
  Poly result = Poly::constant(nvars_, 1);
  Poly base = *this;
  while (e > 0) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return result;
}

Poly Poly::derivative(std::size_t var) const {
  if (var >= nvars_) throw DimensionError("variable index out of range");
  Poly r(nvars_);
  for (const auto& t : terms_) {
    const unsigned e = t.mono.exp[var];
    if (e == 0) continue;
    Term d = t;
    d.mono.exp[var] = static_cast<std::uint16_t>(e - 1);
    d.mono.degree -= 1;
    d.coeff *= e;
    r.terms_.push_back(std::move(d));
  }
  // Every surviving term is divided by the same monomial, so order holds.
  return r;
}

std::vector<Poly> Poly::coefficients_in(std::size_t var) const {
  const unsigned deg = degree(var);
  std::vector<std::vector<Term>> buckets(deg + 1);
  for (const auto& t : terms_) {
    Term c = t;
    const unsigned e = c.mono.exp[var];
    c.mono.exp[var] = 0;
    c.mono.degree -= e;
    buckets[e].push_back(std::move(c));
  }
  std::vector<Poly> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(from_terms(nvars_, std::move(b)));
  return out;
}

Poly Poly::lead_coeff_in(std::size_t var) const {
  const unsigned deg = degree(var);
  std::vector<Term> b;
  for (const auto& t : terms_) {
    if (t.mono.exp[var] != deg) continue;
    Term c = t;
    c.mono.exp[var] = 0;
    c.mono.degree -= deg;
    b.push_back(std::move(c));
  }
  return from_terms(nvars_, std::move(b));
}

Poly Poly::evaluate_var(std::size_t var, const mpz_class& value) const {
  const unsigned deg = degree(var);
  std::vector<mpz_class> powers(deg + 1);
  powers[0] = 1;
  for (unsigned k = 1; k <= deg; ++k) powers[k] = powers[k - 1] * value;
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    Term c = t;
    const unsigned e = c.mono.exp[var];
    c.mono.exp[var] = 0;
    c.mono.degree -= e;
    c.coeff *= powers[e];
    out.push_back(std::move(c));
  }
  return from_terms(nvars_, std::move(out));
}

Poly Poly::substitute(std::span<const Poly> values) const {
  if (values.size() != nvars_) {
    throw DimensionError("substitution needs one value per variable");
  }
  const std::size_t target = values.empty() ? 0 : values[0].nvars();
  for (const auto& v : values) {
    if (v.nvars() != target) throw DimensionError("substitution values disagree on ring");
  }
  if (is_zero()) return Poly(target);
  std::vector<std::vector<Poly>> powers(nvars_);
  for (std::size_t v = 0; v < nvars_; ++v) {
    const unsigned deg = degree(v);
    powers[v].reserve(deg + 1);
    powers[v].push_back(Poly::constant(target, 1));
    for (unsigned k = 1; k <= deg; ++k) powers[v].push_back(powers[v][k - 1] * values[v]);
  }
  std::vector<Term> acc;
  for (const auto& t : terms_) {
    Poly prod = Poly::constant(target, t.coeff);
    for (std::size_t v = 0; v < nvars_; ++v) {
      if (t.mono.exp[v] != 0) prod *= powers[v][t.mono.exp[v]];
    }
    for (auto& pt : prod.terms_) acc.push_back(std::move(pt));
  }
  return from_terms(target, std::move(acc));
}

mpq_class Poly::evaluate(std::span<const mpq_class> point) const {
  if (point.size() != nvars_) throw DimensionError("evaluation point has wrong length");
  std::vector<std::vector<mpq_class>> powers(nvars_);
  for (std::size_t v = 0; v < nvars_; ++v) {
    const unsigned deg = degree(v);
    powers[v].resize(deg + 1);
    powers[v][0] = 1;
    for (unsigned k = 1; k <= deg; ++k) powers[v][k] = powers[v][k - 1] * point[v];
  }
  mpq_class sum = 0;
  mpq_class term;
  for (const auto& t : terms_) {
    term = t.coeff;
    for (std::size_t v = 0; v < nvars_; ++v) {
      if (t.mono.exp[v] != 0) term *= powers[v][t.mono.exp[v]];
    }
    sum += term;
  }
  return sum;
}

double Poly::evaluate(std::span<const double> point) const {
  if (point.size() != nvars_) throw DimensionError("evaluation point has wrong length");
  double sum = 0.0;
  for (const auto& t : terms_) {
    double term = t.coeff.get_d();
    for (std::size_t v = 0; v < nvars_; ++v) {
      if (t.mono.exp[v] != 0) term *= std::pow(point[v], int(t.mono.exp[v]));
    }
    sum += term;
  }
  return sum;
}

Poly Poly::with_nvars(std::size_t n) const {
  if (n < nvars_) {
    for (std::size_t v = n; v < nvars_; ++v) {
      if (depends_on(v)) throw DimensionError("cannot drop a variable in use");
    }
  }
  Poly r(n);
  r.terms_ = terms_;
  return r;
}

std::string Poly::to_string(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    const bool neg = t.coeff < 0;
    if (first) {
      if (neg) os << '-';
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    const mpz_class mag = abs(t.coeff);
    bool wrote = false;
    if (mag != 1 || t.mono.degree == 0) {
      os << mag.get_str();
      wrote = true;
    }
    for (std::size_t v = 0; v < nvars_; ++v) {
      const unsigned e = t.mono.exp[v];
      if (e == 0) continue;
      if (wrote) os << '*';
      os << (v < names.size() ? names[v] : "x" + std::to_string(v + 1));
      if (e > 1) os << '^' << e;
      wrote = true;
    }
  }
  return os.str();
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.nvars_ != b.nvars_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (!(a.terms_[i].mono == b.terms_[i].mono) ||
        a.terms_[i].coeff != b.terms_[i].coeff) {
      return false;
    }
  }
  return true;
}

}  // namespace diffred
