#pragma once

// levycalc command line: eval, normalize, factorize, classify, identities, simulate.
// Exit codes: 0 success, 1 usage or parse error, 2 verification, domain or
// class failure.

#include <ostream>
#include <string>
#include <vector>

namespace levycalc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

int run(int argc, char** argv, std::ostream& out, std::ostream& err);
/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace levycalc::cli
