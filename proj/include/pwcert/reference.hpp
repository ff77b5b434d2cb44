#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pwcert/config.hpp"

namespace pwcert {

/// Converged SCF in the reference space, keyed by the config digest.
struct ReferenceSolution {
  std::string digest;
  double energy = 0.0;
  int iterations = 0;
  double final_residual = 0.0;
  double density_tol = 0.0;
  int n_el = 0;
  /// One row per k-point: the lowest n_el + 1 eigenvalues of the final Hamiltonian.
  Eigen::MatrixXd eigenvalues;
  std::vector<Miller> density_miller;
  Eigen::VectorXcd density;

  friend bool operator==(const ReferenceSolution&, const ReferenceSolution&) = default;
};

/// Artifact layout, all integers and floats little-endian:
///
///   8 bytes   magic "PWCREF01"
///   uint32    length H of the header
///   H bytes   JSON header: format, version, digest, metadata and an
///             "arrays" list of {name, shape}
///   float64   every array in header order, row-major
///
/// Arrays: energy [1], eigenvalues [n_k, n_el+1], density_miller [n, 3],
/// density [n, 2] (real, imaginary).
void write_reference(const ReferenceSolution& ref, const std::filesystem::path& path);
/// Throws MissingReference if the file does not exist, Error if it is malformed.
ReferenceSolution read_reference(const std::filesystem::path& path);

/// $PWCERT_CACHE_DIR, or ./cache when unset.
std::filesystem::path cache_directory();
std::filesystem::path reference_path(const std::string& digest);

/// SCF in the reference space to a tenth of the run tolerance. Throws
/// NonConvergence.
ReferenceSolution compute_reference(const RunConfig& config, const Problem& problem);

/// Loads the cached artifact for the config or computes and stores it.
ReferenceSolution ensure_reference(const RunConfig& config, const Problem& problem,
                                   bool* cache_hit = nullptr);

/// Loads the cached artifact; throws MissingReference when absent or stale.
ReferenceSolution load_reference(const RunConfig& config);

}  // namespace pwcert
