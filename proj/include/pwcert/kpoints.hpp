#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "pwcert/estimators.hpp"
#include "pwcert/model.hpp"

namespace pwcert {

/// Uniform Gamma-centred k-grid with equal weights. Fractional coordinates
/// i/n_j are folded into (-1/2, 1/2].
struct KGrid {
  std::array<int, 3> sizes{1, 1, 1};
  std::vector<Eigen::Vector3d> fractional;
  std::vector<double> weights;

  static KGrid uniform(const Lattice& lattice, const std::array<int, 3>& sizes);
  static KGrid gamma();
  std::size_t size() const { return fractional.size(); }
};

/// One Bloch fiber: its k-point and the k-shifted reference and coarse spheres.
struct Fiber {
  Eigen::Vector3d k_fractional = Eigen::Vector3d::Zero();
  Eigen::Vector3d k = Eigen::Vector3d::Zero();
  double weight = 1.0;
  BasisPtr ref;
  BasisPtr coarse;
};

/// Reference and computational spheres for every k-point, all on one FFT
/// grid, plus the shared density sphere.
class BzDiscretization {
 public:
  static BzDiscretization build(const Lattice& lattice, double ecut, double ecut_ref,
                                const KGrid& kgrid);

  /// Same reference spheres and grid, new computational cutoff (<= ecut_ref).
  BzDiscretization with_coarse_cutoff(double ecut) const;

  const Lattice& lattice() const { return density_->lattice(); }
  const GridShape& grid() const { return density_->grid(); }
  const BasisPtr& density_basis() const { return density_; }
  const std::vector<Fiber>& fibers() const { return fibers_; }
  double ecut() const { return ecut_; }
  double ecut_ref() const { return ecut_ref_; }
  const KGrid& kgrid() const { return kgrid_; }

 private:
  KGrid kgrid_;
  double ecut_ = 0.0;
  double ecut_ref_ = 0.0;
  BasisPtr density_;
  std::vector<Fiber> fibers_;
};

/// Occupied orbitals of every fiber (N_k = N_el for all k).
struct BlochState {
  std::vector<OrbitalSet> fibers;
  std::vector<double> weights;
};

/// rho = sum_k w_k sum_i |phi_{i,k}|^2.
PeriodicField bz_density(const BlochState& state, const BasisPtr& density_basis);

/// sum_k w_k kinetic_k + int V rho + F(rho).
double bz_total_energy(const ModelSpec& model, const BlochState& state);
double bz_total_energy(const ModelSpec& model, const BlochState& state, const PeriodicField& rho);

/// (1/2 |G+k|^2 + V + V_rho + shift) phi for phi on the fiber's k-shifted basis.
PeriodicField fiber_hamiltonian_apply(const ModelSpec& model, const PeriodicField& rho,
                                      const Eigen::Vector3d& k, double shift,
                                      const PeriodicField& phi);

/// Fiber-wise certificates of gamma_m under H_{rho_m}, aggregated with the
/// k-point weights.
struct BzCertificate {
  std::vector<FiberCertificate> fibers;
  BoundReport report;
};

BzCertificate bz_error_components(const MeanFieldHamiltonian& hamiltonian,
                                  const BlochState& gamma_m, const BzDiscretization& disc,
                                  int n_el, bool convex, const CertifyOptions& options = {});

/// Lattice whose cell vectors are factors[j] times the original ones.
Lattice supercell_lattice(const Lattice& lattice, const std::array<int, 3>& factors);

/// The same periodic function expressed on a supercell density sphere.
PeriodicField fold_to_supercell(const PeriodicField& f, const BasisPtr& supercell_basis,
                                const std::array<int, 3>& factors);

}  // namespace pwcert
