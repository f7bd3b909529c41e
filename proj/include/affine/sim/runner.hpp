#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "affine/sim/config.hpp"

namespace affine::sim {

enum ExitCode : int { kOk = 0, kValidationError = 2, kIntegrationFailure = 3 };

struct Trajectory {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct RunResult {
    int exit_code = kOk;
    std::string error;
    Trajectory trajectory;
    json summary;  // {run_id, monitors:{name:{max_drift, final}}, classification?, oracle_checks}
};

// Integrates the configured system; never throws for physics failures (exit code 3).
RunResult run(const RunConfig& config);

void write_csv(const Trajectory& t, std::ostream& os);
void write_json(const Trajectory& t, std::ostream& os);

// Whole CLI pipeline: read, expand sweeps, validate, run and write into out_dir.
// Diagnostics and progress go to `log`.
int run_file(const std::string& config_path, const std::string& out_dir, bool validate_only,
             unsigned long long seed, std::ostream& log);

}  // namespace affine::sim
