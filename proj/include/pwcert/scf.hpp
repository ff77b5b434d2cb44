#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pwcert/kpoints.hpp"

namespace pwcert {

struct ScfConfig {
  enum class Mixing { damped, anderson };
  enum class Guess { constant, random };

  double density_tol = 1e-10;
  int max_iter = 100;
  Mixing mixing = Mixing::damped;
  /// Damping factor: rho_in <- rho_in + beta (rho_out - rho_in).
  double beta = 0.8;
  int anderson_depth = 10;
  Guess guess = Guess::constant;
  std::uint64_t guess_seed = 0;
  double gap_tol = 1e-8;

  /// Throws InvalidArgument on out-of-range parameters.
  void validate() const;
  friend bool operator==(const ScfConfig&, const ScfConfig&) = default;
};

std::string to_string(ScfConfig::Mixing m);
std::string to_string(ScfConfig::Guess g);
ScfConfig::Mixing mixing_from_string(const std::string& name);
ScfConfig::Guess guess_from_string(const std::string& name);

/// Iterate m: gamma_m (Aufbau state of H_{rho_in,m-1}), its density and energy.
struct ScfRecord {
  int m = 0;
  BlochState state;
  PeriodicField rho;
  double energy = 0.0;
  /// ||rho(gamma_m) - rho_in|| in L^2.
  double residual = 0.0;
  std::optional<BoundReport> bounds;
};

struct ScfHistory {
  std::vector<ScfRecord> records;
  bool converged = false;
  double final_residual = 0.0;
  std::vector<std::string> warnings;
};

/// Called after every diagonalization; its report is stored in the record.
using ScfHook = std::function<std::optional<BoundReport>(const ScfRecord&)>;

struct ScfStep {
  BlochState state;
  PeriodicField rho_out;
};

/// Diagonalizes H_{rho_in} on every fiber's coarse sphere and fills the
/// lowest n_el states.
ScfStep scf_step(const ModelSpec& model, const PeriodicField& rho_in,
                 const BzDiscretization& disc, double gap_tol = 1e-8);

/// Starting density for the given configuration.
PeriodicField initial_density(const ModelSpec& model, const BzDiscretization& disc,
                              const ScfConfig& cfg);

ScfHistory run_scf(const ModelSpec& model, const BzDiscretization& disc, const ScfConfig& cfg,
                   const ScfHook& hook = {});

/// Hook that certifies gamma_m with H built from rho(gamma_m) itself.
ScfHook bound_hook(const ModelSpec& model, const BzDiscretization& disc,
                   const CertifyOptions& options = {});

}  // namespace pwcert
