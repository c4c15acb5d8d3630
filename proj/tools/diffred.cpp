#include <iostream>

#include <CLI11.hpp>

#include "diffred/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Decide whether a quasilinear parabolic system can be brought to diffusion form"};
  app.require_subcommand(1);

  diffred::CommandOptions opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", opt.input, "Problem file")->required();
    sub->add_option("--output", opt.output, "Write the main output to this path");
    sub->add_option("--base", opt.base, "Base point \"r1,...,rn\" (overrides the file)");
  };

  CLI::App* check = app.add_subcommand("check", "Run the criterion and print a report");
  CLI::App* reduce = app.add_subcommand("reduce", "Construct the reducing transformation on a grid");
  CLI::App* transform = app.add_subcommand("transform", "Apply a point transformation to a problem");
  for (CLI::App* sub : {check, reduce}) {
    add_common(sub);
    sub->add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"human", "machine"}));
    sub->add_option("--d-route", opt.d_route, "How to invert Lambda_sym")
        ->check(CLI::IsMember({"solve", "cayley", "both"}));
    sub->add_option("--seed", opt.seed, "Seed of the zero-test probe generator");
  }
  reduce->add_option("--step", opt.step, "RK4 step (default: grid extent / 64)");
  reduce->add_option("--grid", opt.grid, "Grid \"lo1:hi1:k1,...\"");
  add_common(transform);
  transform->add_option("--transform", opt.transform, "Transform file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return diffred::kExitUsage;
  }

  if (check->parsed()) return diffred::cmd_check(opt, std::cout, std::cerr);
  if (reduce->parsed()) return diffred::cmd_reduce(opt, std::cout, std::cerr);
  return diffred::cmd_transform(opt, std::cout, std::cerr);
}
