#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lipcausal::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kValidation = 2,
  kNumerical = 3,
};

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

const std::vector<std::string>& subcommands();

}  // namespace lipcausal::cli
