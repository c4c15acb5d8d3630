#pragma once

// Subcommands behind the `diffred` executable. Each returns the process exit
// code; see README for the contract.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace diffred {

enum ExitCode : int {
  kExitReducible = 0,
  kExitNotReducible = 1,
  kExitDegenerate = 2,
  kExitInputError = 3,
  kExitUsage = 4,
  kExitFailure = 5,
};

struct CommandOptions {
  std::string input;
  std::optional<std::string> output;
  std::optional<std::string> format;    // human | machine
  std::optional<std::string> d_route;   // solve | cayley | both
  std::optional<std::string> step;
  std::optional<std::string> grid;
  std::optional<std::string> base;
  std::optional<std::uint64_t> seed;
  std::string transform;
};

int cmd_check(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_reduce(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_transform(const CommandOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace diffred
