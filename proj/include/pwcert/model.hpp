#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pwcert/field.hpp"
#include "pwcert/potential.hpp"

namespace pwcert {

/// Density functional F(rho) = 1/2 D(rho, rho) + E_xc(rho).
struct Functional {
  enum class Kind { linear, rhf, rhf_xalpha };

  Kind kind = Kind::rhf;
  /// Coefficient of E_xc = -c_alpha int rho^{4/3} (rhf_xalpha only).
  double c_alpha = 0.0;

  static Functional linear() { return {Kind::linear, 0.0}; }
  static Functional rhf() { return {Kind::rhf, 0.0}; }
  /// Default coefficient is the Dirac exchange constant (3/4)(3/pi)^{1/3}.
  static Functional xalpha(double c_alpha = 0.7385587663820224) {
    return {Kind::rhf_xalpha, c_alpha};
  }

  bool has_hartree() const { return kind != Kind::linear; }
  bool has_xc() const { return kind == Kind::rhf_xalpha && c_alpha != 0.0; }
  /// Linear and rHF functionals are convex; the X-alpha term breaks convexity.
  bool convex() const { return kind != Kind::rhf_xalpha; }

  friend bool operator==(const Functional&, const Functional&) = default;
};

std::string to_string(Functional::Kind kind);
Functional::Kind functional_kind_from_string(const std::string& name);

/// Energy model E(gamma) = Tr(h gamma) + F(rho_gamma), h = -Delta/2 + V.
///
/// The external potential lives on the density sphere of the reference
/// discretization; densities and mean-field potentials share that sphere.
struct ModelSpec {
  Lattice lattice;
  int n_el = 1;
  ExternalPotential external;
  Functional functional;

  bool convex() const { return functional.convex(); }
  const BasisPtr& density_basis() const { return external.field.basis(); }
};

/// N_el orthonormal orbitals stored in a (reference) basis, supported in a
/// sub-sphere `mask`, with their eigenvalues in ascending order.
class OrbitalSet {
 public:
  OrbitalSet(BasisPtr basis, BasisPtr mask, Eigen::MatrixXcd coefficients,
             Eigen::VectorXd eigenvalues);

  const BasisPtr& basis() const { return basis_; }
  const BasisPtr& mask() const { return mask_; }
  /// One column per orbital.
  const Eigen::MatrixXcd& coefficients() const { return coeffs_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  int count() const { return static_cast<int>(coeffs_.cols()); }
  PeriodicField orbital(int i) const;
  /// max |<phi_i, phi_j> - delta_ij|.
  double orthonormality_error() const;

 private:
  BasisPtr basis_;
  BasisPtr mask_;
  Eigen::MatrixXcd coeffs_;
  Eigen::VectorXd eigenvalues_;
};

/// rho = sum_i |phi_i|^2, computed on the grid and collected on `density_basis`.
/// Throws InvalidArgument when the orbitals are not orthonormal to 1e-10.
PeriodicField density(const OrbitalSet& orbitals, const BasisPtr& density_basis);

/// Zero-mean periodic solution of -Delta V_H = 4 pi (rho - <rho>).
PeriodicField hartree_potential(const PeriodicField& rho);

/// D(rho1, rho2) = sum_{G != 0} 4 pi conj(rho1_G) rho2_G / |G|^2.
double coulomb_energy(const PeriodicField& rho1, const PeriodicField& rho2);

/// E_xc(rho) by grid quadrature; zero unless the functional has an X-alpha term.
double xc_energy(const Functional& functional, const PeriodicField& rho);
/// dE_xc/drho = -(4/3) c_alpha rho^{1/3}, collected on the density sphere.
PeriodicField xc_potential(const Functional& functional, const PeriodicField& rho);

/// F(rho).
double density_functional(const ModelSpec& model, const PeriodicField& rho);
/// V_rho = F'(rho) = V_H[rho] + V_xc[rho].
PeriodicField density_potential(const ModelSpec& model, const PeriodicField& rho);

/// sum_i sum_G |G+k|^2/2 |c_iG|^2.
double kinetic_energy(const OrbitalSet& orbitals);
/// int V rho.
double external_energy(const ModelSpec& model, const PeriodicField& rho);
/// kinetic + int V rho + F(rho).
double total_energy(const ModelSpec& model, double kinetic, const PeriodicField& rho);
double total_energy(const ModelSpec& model, const OrbitalSet& orbitals);

/// Mean-field operator H_rho = -Delta/2 + V + V_rho on any basis sharing the
/// density grid. The total potential V + V_rho is cached on the grid.
class MeanFieldHamiltonian {
 public:
  MeanFieldHamiltonian(const ModelSpec& model, const PeriodicField& rho);
  /// Operator -Delta/2 + potential for an arbitrary real potential.
  explicit MeanFieldHamiltonian(PeriodicField total_potential);

  const PeriodicField& total_potential() const { return potential_; }
  const Eigen::ArrayXd& potential_on_grid() const { return grid_values_; }
  /// <V_tot>, the cell average.
  double potential_mean() const { return mean_; }
  /// ||V_tot||_inf evaluated on the grid.
  double potential_sup() const { return sup_; }
  /// ||V_tot - <V_tot>||_inf evaluated on the grid.
  double fluctuation_sup() const { return fluct_sup_; }

  /// (H + shift) c for a coefficient vector of `basis`.
  Eigen::VectorXcd apply(const BasisPtr& basis, const Eigen::VectorXcd& c, double shift = 0.0) const;
  PeriodicField apply(const PeriodicField& phi, double shift = 0.0) const;
  /// V_tot c (multiplication on the grid).
  Eigen::VectorXcd apply_potential(const BasisPtr& basis, const Eigen::VectorXcd& c) const;
  /// Dense Hermitian matrix of H + shift in `basis`.
  Eigen::MatrixXcd dense_matrix(const BasisPtr& basis, double shift = 0.0) const;

 private:
  void check_grid(const PlanewaveBasis& basis) const;

  PeriodicField potential_;
  Eigen::ArrayXd grid_values_;
  double mean_ = 0.0;
  double sup_ = 0.0;
  double fluct_sup_ = 0.0;
};

/// (-Delta/2 + V + V_rho + shift) phi.
PeriodicField apply_hamiltonian(const ModelSpec& model, const PeriodicField& rho, double shift,
                                const PeriodicField& phi);

}  // namespace pwcert
