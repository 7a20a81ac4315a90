#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gns {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode { exit_ok = 0, exit_property = 1, exit_usage = 2, exit_convergence = 3, exit_infeasible = 4, exit_io = 5 };

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gns
