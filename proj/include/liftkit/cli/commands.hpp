#pragma once

#include <iosfwd>

#include "liftkit/cli/config.hpp"

namespace liftkit::cli {

enum ExitCode : int {
  kExitOk = 0,
  /// Solver stopped at max_iters, or a verification check failed.
  kExitNotConverged = 1,
  kExitUsage = 2,
  kExitRuntime = 3,
};

/// Each command writes its outputs under cfg.out (created if needed) and a
/// manifest.json with the merged config and a report summary. The returned
/// code is kExitOk iff the solver converged (verify: iff every gating check
/// passed). Errors propagate as exceptions.
int cmd_denoise(const ExperimentConfig& cfg, std::ostream& log);
int cmd_stereo(const ExperimentConfig& cfg, std::ostream& log);
int cmd_flow(const ExperimentConfig& cfg, std::ostream& log);
int cmd_register(const ExperimentConfig& cfg, std::ostream& log);
int cmd_harmonic(const ExperimentConfig& cfg, std::ostream& log);
int cmd_verify(const ExperimentConfig& cfg, std::ostream& log);

/// Dispatches on cfg.command and maps exceptions to exit codes: ConfigError
/// gives kExitUsage, every other error kExitRuntime. Messages go to `err`.
int run_command(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace liftkit::cli
