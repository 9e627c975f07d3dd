#ifndef NILFLOW_RUNNER_HPP
#define NILFLOW_RUNNER_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "nilflow/config.hpp"

namespace nilflow {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit statuses shared by the runner and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitIo = 4;

struct RunOptions {
    std::string out_dir;  // empty: take the config's
    int threads = 1;
    std::optional<std::uint64_t> seed_override;
};

struct RunOutcome {
    int exit_code = kExitOk;
    std::string csv_path;
    std::string json_path;
    std::string error;  // single-line machine-parsable reason on failure
};

RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

}  // namespace nilflow

#endif
