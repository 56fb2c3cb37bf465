#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "specdescent/kernels.hpp"

namespace specdescent {

inline constexpr std::string_view kVersion = "0.1.0";

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

// Runs the command line `args` (args[0] is the program name) and returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "linear", "const:c", "affine:a,b" or "exp:scale,rate". Throws DomainError.
ScalarFunction parse_scalar_function(std::string_view text);

}  // namespace specdescent
