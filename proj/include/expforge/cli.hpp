#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace expforge::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kResourceError = 2,
    kConsistencyError = 3,
};

// Runs one command line (program name excluded). Outputs without --out go
// to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace expforge::cli
