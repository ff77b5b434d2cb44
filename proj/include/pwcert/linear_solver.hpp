#pragma once

#include <Eigen/Dense>

#include "pwcert/model.hpp"

namespace pwcert {

/// Lowest eigenpairs of Pi_N (H + shift) Pi_N, eigenvectors embedded in the
/// reference basis. Eigenvalues include the shift.
struct SpectralSlice {
  BasisPtr ref;
  BasisPtr coarse;
  Eigen::VectorXd eigenvalues;
  /// n_ref x count, orthonormal, zero outside the coarse sphere.
  Eigen::MatrixXcd vectors;
  double shift = 0.0;
  int n_el = 0;

  int count() const { return static_cast<int>(eigenvalues.size()); }
  /// eps_{N_el+1} - eps_{N_el}.
  double gap() const { return eigenvalues[n_el] - eigenvalues[n_el - 1]; }
  /// Same eigenvectors, eigenvalues moved to another shift.
  SpectralSlice shifted(double new_shift) const;
  /// Aufbau occupation of the lowest n_el eigenvectors (eigenvalues unshifted).
  OrbitalSet occupied() const;
};

struct DiagonalizeOptions {
  /// Number of eigenpairs kept; values <= n_el mean n_el + 1.
  int count = 0;
  double gap_tol = 1e-8;
};

/// Dense Hermitian diagonalization of the coarse block of H + shift. Each
/// eigenvector's first coefficient within a factor 1 - 1e-6 of the largest modulus is made
/// real and positive.
/// Throws DegenerateFermiLevel when the gap at n_el is below gap_tol.
SpectralSlice diagonalize_projected(const MeanFieldHamiltonian& hamiltonian, const BasisPtr& coarse,
                                    const BasisPtr& ref, int n_el, double shift = 0.0,
                                    const DiagonalizeOptions& options = {});

SpectralSlice diagonalize_projected(const ModelSpec& model, const PeriodicField& rho, double shift,
                                    const BasisPtr& coarse, const BasisPtr& ref,
                                    const DiagonalizeOptions& options = {});

}  // namespace pwcert
