#include "diffred/commands.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <ostream>

#include "diffred/criterion.hpp"
#include "diffred/errors.hpp"
#include "diffred/parser.hpp"
#include "diffred/pfaff.hpp"
#include "diffred/problem.hpp"
#include "diffred/report.hpp"

namespace diffred {

namespace {

struct Loaded {
  ProblemFile file;
  Problem problem;
  std::vector<mpq_class> base;
  DecideOptions decide;
  std::string format;
};

DRoute parse_route(const std::string& s) {
  if (s == "solve") return DRoute::kSolve;
  if (s == "cayley") return DRoute::kCayley;
  if (s == "both") return DRoute::kBoth;
  throw InputError("--d-route must be solve, cayley or both, got '" + s + "'");
}

Loaded load(const CommandOptions& opt) {
  ProblemFile file = load_problem_file(opt.input);
  Problem problem = build_problem(file);
  std::vector<mpq_class> base;
  if (opt.base) {
    base = parse_point(*opt.base);
  } else if (file.base) {
    base = *file.base;
  } else {
    throw InputError(opt.input + ": no base point; add [point] base or pass --base");
  }
  if (base.size() != file.n) {
    throw InputError("base point has " + std::to_string(base.size()) + " coordinates, expected " +
                     std::to_string(file.n));
  }
  DecideOptions d;
  d.route = parse_route(opt.d_route.value_or(file.options.d_route.value_or("solve")));
  if (opt.seed) d.probe.seed = *opt.seed;
  std::string format = opt.format.value_or(file.options.format.value_or("human"));
  if (format != "human" && format != "machine") {
    throw InputError("--format must be human or machine, got '" + format + "'");
  }
  return Loaded{std::move(file), std::move(problem), std::move(base), d, std::move(format)};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
  if (!f) throw InputError("error writing '" + path + "'");
}

std::string render(const Report& r, const std::string& format) {
  return format == "machine" ? to_machine(r) : to_human(r);
}

int exit_code(Status s) {
  switch (s) {
    case Status::kReducible: return kExitReducible;
    case Status::kNotReducible: return kExitNotReducible;
    case Status::kDegenerate: return kExitDegenerate;
  }
  return kExitFailure;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const IntegrationError& e) {
    err << "integration error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const SyntaxError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const UnknownVariableError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DivisionByZeroError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const PoleError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitFailure;
  }
}

struct Decided {
  Verdict verdict;
  Report report;
};

Decided run_decide(const Loaded& l, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v = decide(l.problem.a, l.problem.gamma, l.base, l.decide);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  err << "decided in " << secs << " s\n";
  Report r = make_report(v, l.problem.vars, secs);
  return {std::move(v), std::move(r)};
}

}  // namespace

int cmd_check(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load(opt);
    const Decided d = run_decide(l, err);
    const std::string text = render(d.report, l.format);
    if (opt.output) {
      write_file(*opt.output, text);
    } else {
      out << text;
    }
    return exit_code(d.verdict.status);
  });
}

int cmd_reduce(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load(opt);
    Decided d = run_decide(l, err);
    if (d.verdict.status != Status::kReducible) {
      out << render(d.report, l.format);
      err << "not reducing: verdict is " << d.report.status << "\n";
      return exit_code(d.verdict.status);
    }
    const std::size_t n = l.file.n;
    std::vector<double> base;
    for (const auto& b : l.base) base.push_back(b.get_d());

    GridSpec grid;
    if (auto g = opt.grid ? opt.grid : l.file.options.grid) {
      grid = parse_grid_text(*g);
      if (grid.dim() != n) {
        throw InputError("grid has " + std::to_string(grid.dim()) + " axes, expected " + std::to_string(n));
      }
    } else {
      grid = GridSpec::around(base, 0.25, 5);
    }
    IntegrateOptions io;
    if (auto s = opt.step ? opt.step : l.file.options.step) {
      io.step = parse_rational(*s).get_d();
      if (!(io.step > 0)) throw InputError("step must be positive");
    }
    std::vector<double> t0(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) t0[i * n + i] = 1.0;

    GridSolution sol = integrate_T(*d.verdict.theta, base, t0, grid, io);
    integrate_coordinates(sol, std::vector<double>(n, 0.0));
    const DiffusionResidual res = verify_diffusion_form(l.problem.a, l.problem.gamma, sol);
    const std::string table = grid_table(sol, l.problem.vars.names());

    const auto path = opt.output ? opt.output : l.file.options.output;
    add_reduction(d.report, sol, res, path ? *path : "-");
    if (path) {
      write_file(*path, table);
      out << render(d.report, l.format);
    } else {
      out << table;
      err << render(d.report, l.format);
    }
    return kExitReducible;
  });
}

int cmd_transform(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ProblemFile file = load_problem_file(opt.input);
    const Problem problem = build_problem(file);
    if (opt.transform.empty()) throw InputError("transform needs --transform PATH");
    const TransformFile tf = load_transform_file(opt.transform);
    if (!tf.inverse_src) {
      throw InputError(opt.transform + ": an [inverse] section is needed to write the system in the new variables");
    }
    const PointTransform phi = build_transform(tf, problem.vars);
    const OperatorField a = transform_operator(problem.a, phi);
    const Connection gamma = transform_connection(problem.gamma, phi);

    std::optional<std::vector<mpq_class>> base;
    if (auto b = opt.base ? std::optional(parse_point(*opt.base)) : file.base) {
      if (b->size() != file.n) throw InputError("base point has the wrong number of coordinates");
      base.emplace();
      for (std::size_t m = 0; m < file.n; ++m) {
        try {
          base->push_back(phi.forward()[m].eval(*b));
        } catch (const PoleError&) {
          throw InputError(opt.transform + ": forward " + std::to_string(m + 1) +
                           " has a pole at the base point");
        }
      }
    }
    const ProblemFile outp = to_problem_file(VarSet(tf.names), a, gamma, base, file.options);
    const std::string text = write_problem_text(outp);
    if (opt.output) {
      write_file(*opt.output, text);
    } else {
      out << text;
    }
    return kExitReducible;
  });
}

}  // namespace diffred
