#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "pwcert/config.hpp"
#include "pwcert/reference.hpp"
#include "pwcert/trace.hpp"

namespace pwcert {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_config_error = 2,
  exit_non_convergence = 3,
  exit_missing_reference = 4,
};

/// Exit code matching an exception raised by a command.
int exit_code_for(const std::exception& e);

/// Bounded SCF at the config's computational cutoff.
ScfHistory run_bounds(const RunConfig& config, const Problem& problem);

SweepRow sweep_row(double ecut, const ScfHistory& history, double reference_energy);

/// Each command returns an exit code and never throws.
int cmd_reference(const RunConfig& config, std::ostream& log);
int cmd_bounds(const RunConfig& config, std::ostream& log);
/// An empty list falls back to the config's own cutoff.
int cmd_sweep(const RunConfig& config, const std::vector<double>& ecuts, std::ostream& log);
/// CSV of the external potential's coefficients on the density sphere;
/// written to `out`, or to the log when `out` is empty.
int cmd_gen_potential(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

}  // namespace pwcert
