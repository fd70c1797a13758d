#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace branchlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). Reports go to `out`
/// or to the --out file; diagnostics and usage text go to `err`. Returns 0
/// on success, 1 when a verification fails, 2 on usage or input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace branchlab::cli
