#ifndef CANTOR_DPP_CLI_HPP
#define CANTOR_DPP_CLI_HPP

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cantor_dpp::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,  // verify: some inequality does not hold; also I/O failures
  kUsage = 2,        // unknown flags, invalid inputs, failed preconditions
  kAccuracy = 3,     // quadrature or eigen-solver could not meet its tolerance
};

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace cantor_dpp::cli

#endif  // CANTOR_DPP_CLI_HPP
