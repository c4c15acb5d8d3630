#include "diffred/problem.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "diffred/errors.hpp"
#include "diffred/parser.hpp"

namespace diffred {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Line {
  std::size_t number;
  std::string section;
  std::string key;
  std::string value;
};

class LineReader {
 public:
  LineReader(std::string_view text, std::string origin) : origin_(std::move(origin)) {
    std::size_t number = 0;
    std::string section;
    std::set<std::string> seen;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++number;
      std::string raw(text.substr(start, end - start));
      start = end + 1;
      std::string body = trim(strip_comment(raw));
      if (body.empty()) {
        if (end == text.size()) break;
        continue;
      }
      if (body.front() == '[') {
        if (body.back() != ']') fail(number, "malformed section header");
        section = trim(std::string_view(body).substr(1, body.size() - 2));
        if (!seen.insert(section).second) fail(number, "section [" + section + "] appears twice");
        sections_.push_back(section);
        continue;
      }
      if (section.empty()) fail(number, "entry outside of any section");
      const std::size_t eq = find_unquoted(body, '=');
      if (eq == std::string::npos) fail(number, "expected 'key = value'");
      lines_.push_back({number, section, trim(std::string_view(body).substr(0, eq)),
                        trim(std::string_view(body).substr(eq + 1))});
      if (end == text.size()) break;
    }
  }

  const std::vector<Line>& lines() const { return lines_; }
  const std::vector<std::string>& sections() const { return sections_; }

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
    throw InputError(origin_ + ":" + std::to_string(line) + ": " + msg);
  }

  std::string unquote(const Line& l) const {
    const std::string& v = l.value;
    if (v.size() < 2 || v.front() != '"' || v.back() != '"' ||
        v.find('"', 1) != v.size() - 1) {
      fail(l.number, "expected a double-quoted expression");
    }
    return v.substr(1, v.size() - 2);
  }

  // Quoted or bare.
  std::string plain(const Line& l) const {
    if (!l.value.empty() && l.value.front() == '"') return unquote(l);
    return l.value;
  }

  std::vector<std::size_t> indices(const Line& l, std::size_t count, std::size_t n) const {
    std::istringstream is(l.key);
    std::vector<std::size_t> out;
    std::string tok;
    while (is >> tok) {
      if (!std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
          tok.size() > 3) {
        fail(l.number, "index '" + tok + "' is not a positive integer");
      }
      const std::size_t v = std::stoul(tok);
      if (v < 1 || v > n) fail(l.number, "index " + tok + " out of range 1.." + std::to_string(n));
      out.push_back(v);
    }
    if (out.size() != count) {
      fail(l.number, "expected " + std::to_string(count) + " indices, got '" + l.key + "'");
    }
    return out;
  }

  const std::string& origin() const { return origin_; }

 private:
  static std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
  }

  static std::size_t find_unquoted(const std::string& s, char c) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == c && !quoted) return i;
    }
    return std::string::npos;
  }

  std::string origin_;
  std::vector<Line> lines_;
  std::vector<std::string> sections_;
};

std::vector<std::string> parse_names(const LineReader& r, const Line& l) {
  if (l.key != "names") r.fail(l.number, "unknown key '" + l.key + "' in [variables]");
  auto names = split(r.plain(l), ',');
  for (const auto& nm : names) {
    if (nm.empty()) r.fail(l.number, "empty variable name");
  }
  return names;
}

// Wraps errors raised while interpreting one field of a file.
template <class F>
auto at_field(const std::string& origin, std::size_t line, const std::string& field, F&& f) {
  try {
    return f();
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(origin + ":" + std::to_string(line) + ": " + field + ": " + e.what());
  }
}

}  // namespace

std::vector<mpq_class> parse_point(std::string_view text) {
  std::vector<mpq_class> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_rational(part));
  return out;
}

GridSpec parse_grid_text(std::string_view text) {
  GridSpec g;
  for (const auto& part : split(text, ',')) {
    const auto f = split(part, ':');
    if (f.size() != 3) throw InputError("grid axis '" + part + "' is not lo:hi:count");
    const double lo = parse_rational(f[0]).get_d();
    const double hi = parse_rational(f[1]).get_d();
    if (f[2].empty() || f[2].size() > 6 ||
        !std::all_of(f[2].begin(), f[2].end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw InputError("grid count '" + f[2] + "' is not a positive integer");
    }
    const std::size_t k = std::stoul(f[2]);
    if (k == 0) throw InputError("grid count must be at least 1");
    if (lo > hi) throw InputError("grid axis '" + part + "' has lo > hi");
    g.lo.push_back(lo);
    g.hi.push_back(hi);
    g.count.push_back(k);
  }
  return g;
}

ProblemFile parse_problem_text(std::string_view text, const std::string& origin) {
  const LineReader r(text, origin);
  ProblemFile p;
  p.origin = origin;
  static const std::set<std::string> known{"dimensions", "variables", "A", "Gamma", "point", "options"};
  for (const auto& s : r.sections()) {
    if (!known.count(s)) throw InputError(origin + ": unknown section [" + s + "]");
  }

  std::size_t names_line = 0;
  for (const auto& l : r.lines()) {
    if (l.section != "dimensions") continue;
    if (l.key != "n") r.fail(l.number, "unknown key '" + l.key + "' in [dimensions]");
    const std::string v = r.plain(l);
    if (v.empty() || v.size() > 2 || !std::all_of(v.begin(), v.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      r.fail(l.number, "n must be a positive integer");
    }
    p.n = std::stoul(v);
    if (p.n < 1 || p.n > kMaxVars) r.fail(l.number, "n must be between 1 and " + std::to_string(kMaxVars));
  }
  if (p.n == 0) throw InputError(origin + ": missing [dimensions] n");

  p.a_src.assign(p.n * p.n, "");
  p.a_line.assign(p.n * p.n, 0);
  for (const auto& l : r.lines()) {
    if (l.section == "variables") {
      p.names = parse_names(r, l);
      names_line = l.number;
    } else if (l.section == "A") {
      const auto ix = r.indices(l, 2, p.n);
      const std::size_t k = (ix[0] - 1) * p.n + (ix[1] - 1);
      if (p.a_line[k]) {
        r.fail(l.number, "duplicate A entry " + l.key + " (first at line " + std::to_string(p.a_line[k]) + ")");
      }
      p.a_src[k] = r.unquote(l);
      p.a_line[k] = l.number;
    } else if (l.section == "Gamma") {
      const auto ix = r.indices(l, 3, p.n);
      if (ix[1] > ix[2]) {
        r.fail(l.number, "Gamma entry " + l.key + " has i > j; write lower indices as i <= j");
      }
      const auto key = std::make_tuple(ix[0], ix[1], ix[2]);
      if (auto it = p.gamma_src.find(key); it != p.gamma_src.end()) {
        r.fail(l.number, "duplicate Gamma entry " + l.key + " (first at line " +
                             std::to_string(it->second.line) + ")");
      }
      p.gamma_src[key] = {r.unquote(l), l.number};
    } else if (l.section == "point") {
      if (l.key != "base") r.fail(l.number, "unknown key '" + l.key + "' in [point]");
      try {
        p.base = parse_point(r.plain(l));
      } catch (const InputError& e) {
        r.fail(l.number, std::string("base: ") + e.what());
      }
      if (p.base->size() != p.n) {
        r.fail(l.number, "base has " + std::to_string(p.base->size()) + " coordinates, expected " +
                             std::to_string(p.n));
      }
    } else if (l.section == "options") {
      const std::string v = r.plain(l);
      if (l.key == "d_route") {
        if (v != "solve" && v != "cayley" && v != "both") r.fail(l.number, "d_route must be solve, cayley or both");
        p.options.d_route = v;
      } else if (l.key == "grid") {
        p.options.grid = v;
      } else if (l.key == "step") {
        p.options.step = v;
      } else if (l.key == "output") {
        p.options.output = v;
      } else if (l.key == "format") {
        if (v != "human" && v != "machine") r.fail(l.number, "format must be human or machine");
        p.options.format = v;
      } else {
        r.fail(l.number, "unknown key '" + l.key + "' in [options]");
      }
    }
  }
  if (p.names.empty()) throw InputError(origin + ": missing [variables] names");
  if (p.names.size() != p.n) {
    r.fail(names_line, std::to_string(p.names.size()) + " variable names for n = " + std::to_string(p.n));
  }
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = 0; j < p.n; ++j) {
      if (!p.a_line[i * p.n + j]) {
        throw InputError(origin + ": missing A entry " + std::to_string(i + 1) + " " + std::to_string(j + 1));
      }
    }
  }
  return p;
}

ProblemFile load_problem_file(const std::string& path) {
  return parse_problem_text(read_file(path), path);
}

std::string write_problem_text(const ProblemFile& p) {
  std::ostringstream os;
  os << "[dimensions]\nn = " << p.n << "\n\n[variables]\nnames = ";
  for (std::size_t i = 0; i < p.names.size(); ++i) os << (i ? ", " : "") << p.names[i];
  os << "\n\n[A]\n";
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = 0; j < p.n; ++j) {
      os << i + 1 << " " << j + 1 << " = \"" << p.a_src[i * p.n + j] << "\"\n";
    }
  }
  os << "\n[Gamma]\n";
  for (const auto& [key, entry] : p.gamma_src) {
    const auto [k, i, j] = key;
    os << k << " " << i << " " << j << " = \"" << entry.src << "\"\n";
  }
  if (p.base) {
    os << "\n[point]\nbase = ";
    for (std::size_t i = 0; i < p.base->size(); ++i) os << (i ? ", " : "") << (*p.base)[i].get_str();
    os << "\n";
  }
  const auto& o = p.options;
  if (o.d_route || o.grid || o.step || o.output || o.format) {
    os << "\n[options]\n";
    if (o.d_route) os << "d_route = " << *o.d_route << "\n";
    if (o.grid) os << "grid = \"" << *o.grid << "\"\n";
    if (o.step) os << "step = " << *o.step << "\n";
    if (o.output) os << "output = \"" << *o.output << "\"\n";
    if (o.format) os << "format = " << *o.format << "\n";
  }
  return os.str();
}

Problem build_problem(const ProblemFile& p) {
  const VarSet vars = at_field(p.origin, 0, "variables", [&] { return VarSet(p.names); });
  const std::size_t n = p.n;
  const std::size_t nv = vars.size();
  ExprMatrix a(n, n, nv);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i * n + j;
      a(i, j) = at_field(p.origin, p.a_line[k], "A " + std::to_string(i + 1) + " " + std::to_string(j + 1),
                         [&] { return parse_expr(p.a_src[k], vars); });
    }
  }
  Connection gamma(n, nv);
  for (const auto& [key, entry] : p.gamma_src) {
    const auto [k, i, j] = key;
    const std::string field = "Gamma " + std::to_string(k) + " " + std::to_string(i) + " " + std::to_string(j);
    gamma.set(k - 1, i - 1, j - 1, at_field(p.origin, entry.line, field, [&] { return parse_expr(entry.src, vars); }));
  }
  std::optional<OperatorField> field;
  try {
    field.emplace(std::move(a));
  } catch (const SingularMatrixError&) {
    throw InputError(p.origin + ": det A is identically zero");
  }
  return Problem{vars, std::move(*field), std::move(gamma), p.base};
}

ProblemFile to_problem_file(const VarSet& vars, const OperatorField& a, const Connection& gamma,
                            const std::optional<std::vector<mpq_class>>& base,
                            const ProblemOptions& options) {
  ProblemFile p;
  p.n = a.dim();
  p.names = vars.names();
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = 0; j < p.n; ++j) {
      p.a_src.push_back(a(i, j).to_string(vars));
      p.a_line.push_back(0);
    }
  }
  for (std::size_t k = 0; k < p.n; ++k) {
    for (std::size_t i = 0; i < p.n; ++i) {
      for (std::size_t j = i; j < p.n; ++j) {
        if (!gamma(k, i, j).is_zero()) p.gamma_src[{k + 1, i + 1, j + 1}] = {gamma(k, i, j).to_string(vars), 0};
      }
    }
  }
  p.base = base;
  p.options = options;
  return p;
}

TransformFile parse_transform_text(std::string_view text, const std::string& origin) {
  const LineReader r(text, origin);
  TransformFile t;
  t.origin = origin;
  static const std::set<std::string> known{"variables", "forward", "inverse"};
  for (const auto& s : r.sections()) {
    if (!known.count(s)) throw InputError(origin + ": unknown section [" + s + "]");
  }
  for (const auto& l : r.lines()) {
    if (l.section == "variables") t.names = parse_names(r, l);
  }
  const std::size_t n = t.names.size();
  if (n == 0) throw InputError(origin + ": missing [variables] names");
  std::vector<std::size_t> fwd_line(n, 0), inv_line(n, 0);
  t.forward_src.assign(n, "");
  const bool has_inverse =
      std::find(r.sections().begin(), r.sections().end(), "inverse") != r.sections().end();
  if (has_inverse) t.inverse_src.emplace(n, "");
  for (const auto& l : r.lines()) {
    if (l.section != "forward" && l.section != "inverse") continue;
    const std::size_t m = r.indices(l, 1, n)[0] - 1;
    auto& lines = l.section == "forward" ? fwd_line : inv_line;
    auto& srcs = l.section == "forward" ? t.forward_src : *t.inverse_src;
    if (lines[m]) r.fail(l.number, "duplicate " + l.section + " entry " + l.key);
    lines[m] = l.number;
    srcs[m] = r.unquote(l);
  }
  for (std::size_t m = 0; m < n; ++m) {
    if (!fwd_line[m]) throw InputError(origin + ": missing forward entry " + std::to_string(m + 1));
    if (has_inverse && !inv_line[m]) {
      throw InputError(origin + ": missing inverse entry " + std::to_string(m + 1));
    }
  }
  return t;
}

TransformFile load_transform_file(const std::string& path) {
  return parse_transform_text(read_file(path), path);
}

PointTransform build_transform(const TransformFile& t, const VarSet& old_vars) {
  const std::size_t n = t.names.size();
  if (n != old_vars.size()) {
    throw InputError(t.origin + ": transform has " + std::to_string(n) + " variables, problem has " +
                     std::to_string(old_vars.size()));
  }
  const VarSet new_vars = at_field(t.origin, 0, "variables", [&] { return VarSet(t.names); });
  std::vector<Expr> fwd;
  for (std::size_t m = 0; m < n; ++m) {
    fwd.push_back(at_field(t.origin, 0, "forward " + std::to_string(m + 1),
                           [&] { return parse_expr(t.forward_src[m], old_vars); }));
  }
  std::optional<std::vector<Expr>> inv;
  if (t.inverse_src) {
    inv.emplace();
    for (std::size_t i = 0; i < n; ++i) {
      inv->push_back(at_field(t.origin, 0, "inverse " + std::to_string(i + 1),
                              [&] { return parse_expr((*t.inverse_src)[i], new_vars); }));
    }
    for (std::size_t m = 0; m < n; ++m) {
      if (!(fwd[m].substitute(*inv) == Expr::variable(n, m))) {
        throw InputError(t.origin + ": [inverse] does not undo [forward] in component " +
                         std::to_string(m + 1));
      }
    }
  }
  try {
    return PointTransform(std::move(fwd), std::move(inv));
  } catch (const SingularMatrixError& e) {
    throw InputError(t.origin + ": " + e.what());
  }
}

}  // namespace diffred
