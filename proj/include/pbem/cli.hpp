#ifndef PBEM_CLI_HPP
#define PBEM_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace pbem {

/// Exit codes: 0 pass, 1 verified-and-failed, 2 usage or parse error.
enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2 };

/// Runs one subcommand. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pbem

#endif  // PBEM_CLI_HPP
