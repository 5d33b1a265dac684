#pragma once

#include <string>
#include <vector>

#include "ocpg/config.hpp"

namespace ocpg {

// Exit codes shared by all commands: 0 success, 1 verification/assertion
// failure (including training divergence), 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int cmd_train(const RunConfig& config);

int cmd_verify(const std::string& suite, const std::string& out_dir, std::uint64_t seed);

int cmd_demo_interpolation(const std::string& out_dir);

int cmd_compare(const std::vector<std::string>& curve_dirs, const std::string& out_dir);

int cmd_evaluate(const std::string& checkpoint_path, const std::string& env_name, int episodes,
                 std::uint64_t seed);

// Loads the per-seed curve CSVs written by cmd_train from a run directory.
EvalCurve load_run_curves(const std::string& run_dir);

// Environment factories used by cmd_train (exposed for tests).
TrainSetup make_train_setup(const RunConfig& config);

}  // namespace ocpg
