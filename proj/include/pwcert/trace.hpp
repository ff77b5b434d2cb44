#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pwcert/scf.hpp"

namespace pwcert {

/// Version of the CSV column layout; bumped whenever names or order change.
inline constexpr int kTraceSchemaVersion = 1;

/// "2026-01-31T12:00:00Z".
std::string utc_timestamp();

/// Column names: m, energy, true_error, err_scf, then err_disc_<v>, shift_<v>,
/// opnorm_<v> and guaranteed_<v> for every variant in order.
std::vector<std::string> trace_columns(const std::vector<Variant>& variants);

/// Per-iteration CSV. The first line is a comment carrying the timestamp;
/// everything after it depends only on the inputs. Missing values are empty.
std::string trace_csv(const ScfHistory& history, const std::vector<Variant>& variants,
                      double reference_energy, const std::string& timestamp);

/// First iteration whose err_disc for `variant` exceeds err_scf.
std::optional<int> crossover_iteration(const ScfHistory& history, Variant variant);

/// (err_disc + err_scf) / true_error at one record; nullopt when either side is missing
/// or the true error is not positive.
std::optional<double> bound_ratio(const ScfRecord& record, Variant variant, double reference_energy);

struct SummaryInfo {
  std::string digest;
  double ecut = 0.0;
  double ecut_ref = 0.0;
  double reference_energy = 0.0;
  std::vector<Variant> variants;
};

/// JSON summary: final ratios per variant, the ratio history and the
/// crossover iteration (judged on eta0 when selected, else the first variant).
std::string summary_json(const ScfHistory& history, const SummaryInfo& info);

/// One converged (or abandoned) run of a cutoff sweep.
struct SweepRow {
  double ecut = 0.0;
  int iterations = 0;
  bool converged = false;
  double energy = 0.0;
  double true_error = 0.0;
  std::optional<BoundReport> bounds;
};

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::vector<Variant>& variants,
                      const std::string& timestamp);

}  // namespace pwcert
