#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "pwcert/estimators.hpp"
#include "pwcert/kpoints.hpp"
#include "pwcert/scf.hpp"

namespace pwcert {

/// A complete experiment: model, discretization, SCF settings, estimators
/// and output locations. Serialized as JSON (comments allowed on input).
struct RunConfig {
  int dimension = 1;
  /// Cell vectors as rows; only the first `dimension` rows and columns are read.
  std::array<std::array<double, 3>, 3> cell{{{10.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  int n_el = 3;
  PotentialDescriptor potential;
  Functional functional = Functional::rhf();

  double ecut = 400.0;
  double ecut_ref = 1000.0;
  std::array<int, 3> kgrid{1, 1, 1};
  ScfConfig scf;

  std::vector<Variant> estimators{all_variants().begin(), all_variants().end()};
  double q_target = 0.5;
  bool opnorm_use_next_eigenvalue = false;

  struct Output {
    std::string directory = "out";
    std::string trace = "trace.csv";
    std::string summary = "summary.json";
    std::string sweep = "sweep.csv";
    friend bool operator==(const Output&, const Output&) = default;
  } output;

  /// Throws ConfigError.
  void validate() const;
  Lattice lattice() const;
  KGrid kpoint_grid() const;
  CertifyOptions certify_options() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Pretty-printed JSON that parse_config reads back to an equal RunConfig.
std::string dump_config(const RunConfig& config);

/// SHA-256 (hex) of the canonical JSON of everything the reference solution
/// depends on: model, ecut_ref, k-grid and SCF settings.
std::string reference_digest(const RunConfig& config);

/// Reference and computational discretizations plus the model whose
/// external potential lives on the shared density sphere.
struct Problem {
  BzDiscretization ref;
  BzDiscretization disc;
  ModelSpec model;
};

Problem build_problem(const RunConfig& config);
/// Same reference and model, another computational cutoff.
Problem with_cutoff(const Problem& problem, double ecut);

}  // namespace pwcert
