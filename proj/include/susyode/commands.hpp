#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "susyode/closedform.hpp"
#include "susyode/picard.hpp"

namespace susyode::cli {

/// Dispatches one CLI invocation (argv without the program name) and writes
/// all output to the given streams. Returns the process exit code:
///   0  command ran and every verification passed
///   1  a verification failed, or a domain error stopped the run
///   2  usage, flag, or file/expression parse error
int run_command(std::vector<std::string> args, std::ostream& out, std::ostream& err);

/// "1 + t + (1 + e1)*t^2" — exact series with Grassmann coefficients.
std::string tpoly_to_string(const solve::TPoly& p);

/// Same, with "/t^k" tails for the negative powers: "-1/t + 2*t".
std::string laurent_to_string(const solve::LaurentPoly& p);

} // namespace susyode::cli
