#include "diffred/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "diffred/errors.hpp"

namespace diffred {

using nlohmann::json;

namespace {

std::string q(const mpq_class& v) { return v.get_str(); }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <class T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

Report make_report(const Verdict& v, const VarSet& vars, double seconds) {
  Report r;
  r.status = to_string(v.status);
  r.n = v.gate.sigma.size();
  r.variables = vars.names();
  for (const auto& b : v.base_point) r.base_point.push_back(q(b));
  r.route = to_string(v.route);
  r.seconds = seconds;

  const GateReport& g = v.gate;
  r.gate.passed = g.passed;
  r.gate.det_a = g.det_a.to_string(vars);
  r.gate.det_value = q(g.det_value);
  for (const auto& s : g.sigma) r.gate.sigma.push_back(s.to_string(vars));
  for (const auto& s : g.sigma_values) r.gate.sigma_values.push_back(q(s));
  if (g.trace) r.gate.trace = g.trace->to_string(vars);
  if (g.trace_value) r.gate.trace_value = q(*g.trace_value);
  r.gate.resultant_value = q(g.resultant_value);
  r.gate.det_test = g.det_test;
  r.gate.resultant_test = g.resultant_test;
  r.gate.trace_test = g.trace_test;
  if (!g.passed) {
    r.gate.witness = g.witness;
    r.gate.witness_expr = g.witness_expr->to_string(vars);
    r.gate.witness_value = q(g.witness_value);
    r.gate.witness_identically_zero = g.witness_identically_zero;
  }

  if (v.theta) {
    const std::size_t n = v.theta->dim();
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t s = p; s < n; ++s) {
          r.theta.push_back({a + 1, p + 1, s + 1, (*v.theta)(a, p, s).to_string(vars)});
        }
      }
    }
  }
  for (const auto& w : v.curvature_witness) {
    r.curvature_witness.push_back({w.m + 1, w.k + 1, w.q + 1, w.p + 1, w.value.to_string(vars),
                                   w.at_base ? std::optional(q(*w.at_base)) : std::nullopt});
  }
  return r;
}

void add_reduction(Report& r, const GridSolution& sol, const DiffusionResidual& res,
                   const std::string& table) {
  Report::Reduction red;
  red.step = sol.step;
  red.points = sol.points.size();
  for (const auto& d : sol.dropped) {
    red.dropped.push_back({std::vector<double>(d.y.begin(), d.y.begin() + sol.dim()), d.reason});
  }
  red.diffusion_residual = res.max_residual;
  red.estimated_error = sol.estimated_error;
  red.symmetry_residual = sol.symmetry_residual;
  red.table = table;
  r.reduction = std::move(red);
}

std::string to_human(const Report& r) {
  std::ostringstream os;
  auto list = [&](const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  };
  os << "verdict: " << r.status << "\n";
  os << "variables: ";
  list(r.variables);
  os << "\nbase point: ";
  list(r.base_point);
  os << "\nD route: " << r.route << "\n\n";

  const auto& g = r.gate;
  os << "non-degeneracy gate: " << (g.passed ? "pass" : "fail") << "\n";
  os << "  det A = " << g.det_a << "\n    at base: " << g.det_value << "\n";
  for (std::size_t s = 0; s < g.sigma.size(); ++s) {
    os << "  sigma_" << s + 1 << " = " << g.sigma[s] << "\n    at base: " << g.sigma_values[s] << "\n";
  }
  if (g.trace) os << "  trace A = " << *g.trace << "\n    at base: " << *g.trace_value << "\n";
  os << "  Res[f(t), f(-t)] at base: " << g.resultant_value << "\n";
  os << "  det test: " << (g.det_test ? "pass" : "fail")
     << ", resultant test: " << (g.resultant_test ? "pass" : "fail");
  if (g.trace_test) os << ", trace test: " << (*g.trace_test ? "pass" : "fail");
  os << "\n";
  if (g.witness) {
    os << "  degeneracy witness: " << *g.witness << " = " << *g.witness_expr << "\n"
       << "    at base: " << *g.witness_value << "\n"
       << "    identically zero: " << (*g.witness_identically_zero ? "yes" : "no, move the base point")
       << "\n";
  }

  if (!r.theta.empty()) {
    os << "\ntheta (r p q):\n";
    for (const auto& t : r.theta) os << "  " << t.r << " " << t.p << " " << t.q << " = " << t.expr << "\n";
  }
  if (!r.curvature_witness.empty()) {
    const auto& w = r.curvature_witness.front();
    os << "\ncurvature witness (m k q p) = (" << w.m << " " << w.k << " " << w.q << " " << w.p
       << "):\n  " << w.expr << "\n  at base: " << (w.at_base ? *w.at_base : "pole") << "\n";
    if (r.curvature_witness.size() > 1) {
      os << "  (" << r.curvature_witness.size() - 1 << " further nonzero components)\n";
    }
  }

  if (r.reduction) {
    const auto& red = *r.reduction;
    os << "\nreduction:\n"
       << "  step: " << num(red.step) << "\n"
       << "  grid points: " << red.points << " retained, " << red.dropped.size() << " dropped\n"
       << "  diffusion-form residual (max): " << num(red.diffusion_residual) << "\n"
       << "  estimated integration error: " << num(red.estimated_error) << "\n"
       << "  two-order coordinate discrepancy: " << num(red.symmetry_residual) << "\n"
       << "  table: " << red.table << "\n";
    for (const auto& d : red.dropped) os << "  dropped: " << d.reason << "\n";
  }
  return os.str();
}

std::string to_machine(const Report& r) {
  json j;
  j["status"] = r.status;
  j["n"] = r.n;
  j["variables"] = r.variables;
  j["base_point"] = r.base_point;
  j["route"] = r.route;
  const auto& g = r.gate;
  json gj;
  gj["passed"] = g.passed;
  gj["det_a"] = g.det_a;
  gj["det_value"] = g.det_value;
  gj["sigma"] = g.sigma;
  gj["sigma_values"] = g.sigma_values;
  put_opt(gj, "trace", g.trace);
  put_opt(gj, "trace_value", g.trace_value);
  gj["resultant_value"] = g.resultant_value;
  gj["det_test"] = g.det_test;
  gj["resultant_test"] = g.resultant_test;
  put_opt(gj, "trace_test", g.trace_test);
  put_opt(gj, "witness", g.witness);
  put_opt(gj, "witness_expr", g.witness_expr);
  put_opt(gj, "witness_value", g.witness_value);
  put_opt(gj, "witness_identically_zero", g.witness_identically_zero);
  j["gate"] = gj;
  j["theta"] = json::array();
  for (const auto& t : r.theta) j["theta"].push_back({{"r", t.r}, {"p", t.p}, {"q", t.q}, {"expr", t.expr}});
  j["curvature_witness"] = json::array();
  for (const auto& w : r.curvature_witness) {
    json wj{{"m", w.m}, {"k", w.k}, {"q", w.q}, {"p", w.p}, {"expr", w.expr}};
    put_opt(wj, "at_base", w.at_base);
    j["curvature_witness"].push_back(wj);
  }
  if (r.reduction) {
    const auto& red = *r.reduction;
    json rj{{"step", red.step},
            {"points", red.points},
            {"diffusion_residual", red.diffusion_residual},
            {"estimated_error", red.estimated_error},
            {"symmetry_residual", red.symmetry_residual},
            {"table", red.table}};
    rj["dropped"] = json::array();
    for (const auto& d : red.dropped) rj["dropped"].push_back({{"y", d.y}, {"reason", d.reason}});
    j["reduction"] = rj;
  } else {
    j["reduction"] = nullptr;
  }
  return j.dump(2) + "\n";
}

Report parse_machine_report(std::string_view text) {
  try {
    const json j = json::parse(text);
    Report r;
    r.status = j.at("status").get<std::string>();
    if (r.status != "Reducible" && r.status != "NotReducible" && r.status != "Degenerate") {
      throw InputError("unknown status '" + r.status + "'");
    }
    r.n = j.at("n").get<std::size_t>();
    r.variables = j.at("variables").get<std::vector<std::string>>();
    r.base_point = j.at("base_point").get<std::vector<std::string>>();
    r.route = j.at("route").get<std::string>();
    const json& gj = j.at("gate");
    auto& g = r.gate;
    g.passed = gj.at("passed").get<bool>();
    g.det_a = gj.at("det_a").get<std::string>();
    g.det_value = gj.at("det_value").get<std::string>();
    g.sigma = gj.at("sigma").get<std::vector<std::string>>();
    g.sigma_values = gj.at("sigma_values").get<std::vector<std::string>>();
    g.trace = get_opt<std::string>(gj, "trace");
    g.trace_value = get_opt<std::string>(gj, "trace_value");
    g.resultant_value = gj.at("resultant_value").get<std::string>();
    g.det_test = gj.at("det_test").get<bool>();
    g.resultant_test = gj.at("resultant_test").get<bool>();
    g.trace_test = get_opt<bool>(gj, "trace_test");
    g.witness = get_opt<std::string>(gj, "witness");
    g.witness_expr = get_opt<std::string>(gj, "witness_expr");
    g.witness_value = get_opt<std::string>(gj, "witness_value");
    g.witness_identically_zero = get_opt<bool>(gj, "witness_identically_zero");
    for (const auto& t : j.at("theta")) {
      r.theta.push_back({t.at("r").get<std::size_t>(), t.at("p").get<std::size_t>(),
                         t.at("q").get<std::size_t>(), t.at("expr").get<std::string>()});
    }
    for (const auto& w : j.at("curvature_witness")) {
      r.curvature_witness.push_back({w.at("m").get<std::size_t>(), w.at("k").get<std::size_t>(),
                                     w.at("q").get<std::size_t>(), w.at("p").get<std::size_t>(),
                                     w.at("expr").get<std::string>(), get_opt<std::string>(w, "at_base")});
    }
    if (!j.at("reduction").is_null()) {
      const json& rj = j.at("reduction");
      Report::Reduction red;
      red.step = rj.at("step").get<double>();
      red.points = rj.at("points").get<std::size_t>();
      red.diffusion_residual = rj.at("diffusion_residual").get<double>();
      red.estimated_error = rj.at("estimated_error").get<double>();
      red.symmetry_residual = rj.at("symmetry_residual").get<double>();
      red.table = rj.at("table").get<std::string>();
      for (const auto& d : rj.at("dropped")) {
        red.dropped.push_back({d.at("y").get<std::vector<double>>(), d.at("reason").get<std::string>()});
      }
      r.reduction = std::move(red);
    }
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed machine report: ") + e.what());
  }
}

}  // namespace diffred
