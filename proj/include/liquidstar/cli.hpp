#pragma once

#include <string>
#include <vector>

namespace liquidstar {

// Exit codes of the command-line front end.
enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2, kVerification = 3 };

// args excludes the program name.
int dispatch(const std::vector<std::string>& args);

// A:B:K ranges. K log-spaced points (rho_c) or K linear points (gamma); endpoints exact.
std::vector<double> parse_range(const std::string& spec, bool log_spaced);
std::vector<int> parse_int_list(const std::string& spec);

}  // namespace liquidstar
