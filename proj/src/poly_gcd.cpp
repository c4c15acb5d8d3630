// Multivariate gcd over Z. The fast path is the heuristic gcd of Char,
// Geddes and Gonnet (evaluate at a large integer, recurse, interpolate the
// xi-adic digits, verify by exact division). When it gives up, a recursive
// primitive polynomial remainder sequence provides the certain answer.

#include <algorithm>

#include "diffred/errors.hpp"
#include "diffred/poly.hpp"

namespace diffred {

namespace {

constexpr int kHeuristicAttempts = 6;

Poly normalized(Poly p) {
  if (p.sign() < 0) p = -p;
  return p;
}

mpz_class isqrt(const mpz_class& x) {
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
  return r;
}

std::optional<std::size_t> first_variable(const Poly& a, const Poly& b) {
  for (std::size_t v = 0; v < a.nvars(); ++v) {
    if (a.depends_on(v) || b.depends_on(v)) return v;
  }
  return std::nullopt;
}

Monomial min_exponents(const Poly& p) {
  Monomial m = p.terms().front().mono;
  for (const auto& t : p.terms()) {
    for (std::size_t i = 0; i < kMaxVars; ++i) m.exp[i] = std::min(m.exp[i], t.mono.exp[i]);
  }
  m.degree = 0;
  for (auto e : m.exp) m.degree += e;
  return m;
}

Monomial min_monomial(const Monomial& a, const Monomial& b) {
  Monomial m;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    m.exp[i] = std::min(a.exp[i], b.exp[i]);
    m.degree += m.exp[i];
  }
  return m;
}

Poly divide_monomial(const Poly& p, const Monomial& m) {
  std::vector<Term> out;
  out.reserve(p.size());
  for (const auto& t : p.terms()) out.push_back({quotient(t.mono, m), t.coeff});
  return Poly::from_terms(p.nvars(), std::move(out));
}

// Expand the integer coefficients of h in symmetric base-x digits; digit k
// becomes the coefficient of var^k.
Poly interpolate(const Poly& h, const mpz_class& x, std::size_t var) {
  std::vector<Term> out;
  Poly rest = h;
  const mpz_class half = x / 2;
  unsigned k = 0;
  while (!rest.is_zero()) {
    std::vector<Term> digit;
    for (const auto& t : rest.terms()) {
      mpz_class r;
      mpz_fdiv_r(r.get_mpz_t(), t.coeff.get_mpz_t(), x.get_mpz_t());
      if (r > half) r -= x;
      if (r == 0) continue;
      digit.push_back({t.mono, r});
      Term lifted{t.mono, r};
      lifted.mono.exp[var] = static_cast<std::uint16_t>(lifted.mono.exp[var] + k);
      lifted.mono.degree += k;
      out.push_back(std::move(lifted));
    }
    rest = (rest - Poly::from_terms(rest.nvars(), std::move(digit))).divided_by(x);
    ++k;
    if (k > 60000) throw DegreeError("heuristic gcd interpolation diverged");
  }
  return Poly::from_terms(h.nvars(), std::move(out));
}

std::optional<Poly> heuristic(const Poly& f, const Poly& g) {
  const std::size_t n = f.nvars();
  if (f.is_constant() && g.is_constant()) {
    mpz_class c;
    mpz_gcd(c.get_mpz_t(), f.constant_value().get_mpz_t(), g.constant_value().get_mpz_t());
    return Poly::constant(n, c);
  }
  const std::size_t v = *first_variable(f, g);
  mpz_class gamma;
  mpz_gcd(gamma.get_mpz_t(), f.content().get_mpz_t(), g.content().get_mpz_t());
  const Poly F = f.divided_by(gamma);
  const Poly G = g.divided_by(gamma);

  const mpz_class fn = F.max_norm();
  const mpz_class gn = G.max_norm();
  const mpz_class bound = 2 * std::min(fn, gn) + 29;
  mpz_class x = std::max<mpz_class>(
      bound, 2 * std::min<mpz_class>(fn / abs(F.leading().coeff),
                                     gn / abs(G.leading().coeff)) + 2);

  for (int attempt = 0; attempt < kHeuristicAttempts; ++attempt) {
    const Poly ff = F.evaluate_var(v, x);
    const Poly gg = G.evaluate_var(v, x);
    if (!ff.is_zero() && !gg.is_zero()) {
      if (auto h = heuristic(ff, gg)) {
        Poly cand = interpolate(*h, x, v);
        const mpz_class cc = cand.content();
        if (cc != 0) {
          cand = normalized(cand.divided_by(cc));
          if (F.divide_exact(cand) && G.divide_exact(cand)) return cand.scaled(gamma);
        }
      }
    }
    x = 73794 * x * isqrt(isqrt(x)) / 27011;
  }
  return std::nullopt;
}

Poly prs_content(const Poly& p, std::size_t v) {
  Poly c(p.nvars());
  for (const auto& coeff : p.coefficients_in(v)) {
    if (coeff.is_zero()) continue;
    c = detail::gcd_prs(c, coeff);
    if (c.is_one()) break;
  }
  return c;
}

Poly pseudo_remainder(Poly a, const Poly& b, std::size_t v) {
  const unsigned db = b.degree(v);
  const Poly lb = b.lead_coeff_in(v);
  while (!a.is_zero() && a.degree(v) >= db) {
    const unsigned d = a.degree(v) - db;
    Monomial shift;
    shift.exp[v] = static_cast<std::uint16_t>(d);
    shift.degree = d;
    a = lb * a - (a.lead_coeff_in(v) * b).times_monomial(shift, 1);
  }
  return a;
}

}  // namespace

namespace detail {

std::optional<Poly> gcd_heuristic(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return normalized(a.is_zero() ? b : a);
  auto r = heuristic(a, b);
  if (r) return normalized(*r);
  return std::nullopt;
}

Poly gcd_prs(const Poly& a, const Poly& b) {
  if (a.is_zero()) return normalized(b);
  if (b.is_zero()) return normalized(a);
  if (a.is_constant() || b.is_constant()) {
    mpz_class c;
    mpz_gcd(c.get_mpz_t(), a.content().get_mpz_t(), b.content().get_mpz_t());
    return Poly::constant(a.nvars(), c);
  }
  const std::size_t v = *first_variable(a, b);
  if (!a.depends_on(v)) return gcd_prs(a, prs_content(b, v));
  if (!b.depends_on(v)) return gcd_prs(b, prs_content(a, v));

  const Poly ca = prs_content(a, v);
  const Poly cb = prs_content(b, v);
  const Poly c = gcd_prs(ca, cb);
  Poly p = *a.divide_exact(ca);
  Poly q = *b.divide_exact(cb);
  if (p.degree(v) < q.degree(v)) std::swap(p, q);
  while (!q.is_zero() && q.degree(v) > 0) {
    Poly r = pseudo_remainder(p, q, v);
    p = std::move(q);
    if (r.is_zero()) {
      q = Poly(a.nvars());
    } else {
      q = *r.divide_exact(prs_content(r, v));
    }
  }
  if (!q.is_zero()) return normalized(c);  // nonzero remainder free of v
  return normalized(c * p);
}

}  // namespace detail

Poly gcd(const Poly& a, const Poly& b) {
  if (a.nvars() != b.nvars()) throw DimensionError("gcd of polynomials from different rings");
  if (a.is_zero()) return normalized(b);
  if (b.is_zero()) return normalized(a);
  mpz_class c;
  mpz_gcd(c.get_mpz_t(), a.content().get_mpz_t(), b.content().get_mpz_t());
  if (a.is_constant() || b.is_constant()) return Poly::constant(a.nvars(), c);
  if (a == b || a == -b) return normalized(a);

  const Monomial ma = min_exponents(a);
  const Monomial mb = min_exponents(b);
  const Monomial m = min_monomial(ma, mb);
  Poly common = Poly::constant(a.nvars(), c).times_monomial(m, 1);

  const Poly ra = divide_monomial(a, ma).divided_by(a.content());
  const Poly rb = divide_monomial(b, mb).divided_by(b.content());
  if (ra.is_constant() || rb.is_constant()) return common;

  // Exact divisibility is the common case when normalizing fractions.
  if (ra.size() <= rb.size()) {
    if (rb.divide_exact(ra)) return normalized(common * ra);
  } else if (ra.divide_exact(rb)) {
    return normalized(common * rb);
  }

  if (auto h = heuristic(ra, rb)) return normalized(common * *h);
  return normalized(common * detail::gcd_prs(ra, rb));
}

}  // namespace diffred
