#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace phasemem::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 2,
    kInputError = 3,
    kContractViolation = 4,
};

/// Runs one subcommand (model | tps | simulate | acf | fit | scan | kinematics).
/// argv[0] is the program name. Diagnostics go to err.
int execute(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// Worker count from PHASEMEM_THREADS, else the machine's parallelism.
int default_thread_count();

}  // namespace phasemem::cli
