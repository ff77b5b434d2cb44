#include "pwcert/model.hpp"

#include <cmath>
#include <numbers>

#include "pwcert/error.hpp"

namespace pwcert {

std::string to_string(Functional::Kind kind) {
  switch (kind) {
    case Functional::Kind::linear: return "linear";
    case Functional::Kind::rhf: return "rhf";
    case Functional::Kind::rhf_xalpha: return "rhf_xalpha";
  }
  return "rhf";
}

Functional::Kind functional_kind_from_string(const std::string& name) {
  if (name == "linear") return Functional::Kind::linear;
  if (name == "rhf") return Functional::Kind::rhf;
  if (name == "rhf_xalpha") return Functional::Kind::rhf_xalpha;
  throw InvalidArgument("unknown functional '" + name + "'");
}

OrbitalSet::OrbitalSet(BasisPtr basis, BasisPtr mask, Eigen::MatrixXcd coefficients,
                       Eigen::VectorXd eigenvalues)
    : basis_(std::move(basis)),
      mask_(std::move(mask)),
      coeffs_(std::move(coefficients)),
      eigenvalues_(std::move(eigenvalues)) {
  if (!basis_) throw InvalidArgument("orbital set without basis");
  if (!mask_) mask_ = basis_;
  if (static_cast<std::size_t>(coeffs_.rows()) != basis_->size()) {
    throw InvalidArgument("orbital coefficients do not match the basis size");
  }
  if (eigenvalues_.size() != coeffs_.cols()) {
    throw InvalidArgument("one eigenvalue per orbital expected");
  }
  for (Eigen::Index i = 1; i < eigenvalues_.size(); ++i) {
    if (eigenvalues_[i] < eigenvalues_[i - 1]) throw InvalidArgument("eigenvalues not ascending");
  }
  if (mask_ != basis_) {
    const SubspaceMask m(mask_, basis_);
    for (std::size_t g = 0; g < basis_->size(); ++g) {
      if (m.inside()[g]) continue;
      if (coeffs_.row(static_cast<Eigen::Index>(g)).cwiseAbs().maxCoeff() != 0.0) {
        throw InvalidArgument("orbital has coefficients outside its mask");
      }
    }
  }
}

PeriodicField OrbitalSet::orbital(int i) const { return PeriodicField(basis_, coeffs_.col(i)); }

double OrbitalSet::orthonormality_error() const {
  const Eigen::MatrixXcd s = coeffs_.adjoint() * coeffs_;
  return (s - Eigen::MatrixXcd::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
}

PeriodicField density(const OrbitalSet& orbitals, const BasisPtr& density_basis) {
  if (orbitals.count() > 0 && orbitals.orthonormality_error() > 1e-10) {
    throw InvalidArgument("density of non-orthonormal orbitals");
  }
  const auto& basis = orbitals.basis();
  if (basis->grid() != density_basis->grid() || !(basis->lattice() == density_basis->lattice())) {
    throw InvalidArgument("orbital and density bases do not share a grid");
  }
  GridFunction acc;
  acc.shape = density_basis->grid();
  acc.values = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(grid_points(acc.shape)));
  for (int i = 0; i < orbitals.count(); ++i) {
    const GridFunction phi = to_real(basis, orbitals.coefficients().col(i));
    acc.values += phi.values.abs2().cast<std::complex<double>>();
  }
  return to_fourier(acc, density_basis);
}

PeriodicField hartree_potential(const PeriodicField& rho) {
  const auto& basis = rho.basis();
  PeriodicField v = PeriodicField::zeros(basis);
  const auto& kin = basis->kinetic();
  for (std::size_t i = 0; i < kin.size(); ++i) {
    if (kin[i] == 0.0) continue;
    // |G|^2 = 2 * kinetic.
    v.coefficients()[static_cast<Eigen::Index>(i)] =
        4.0 * std::numbers::pi * rho.coefficients()[static_cast<Eigen::Index>(i)] / (2.0 * kin[i]);
  }
  return v;
}

double coulomb_energy(const PeriodicField& rho1, const PeriodicField& rho2) {
  const PeriodicField v = hartree_potential(rho2);
  return std::real(rho1.dot(v));
}

namespace {

Eigen::ArrayXd real_density_on_grid(const PeriodicField& rho) {
  return to_real(rho).values.real().max(0.0);
}

}  // namespace

double xc_energy(const Functional& functional, const PeriodicField& rho) {
  if (!functional.has_xc()) return 0.0;
  GridFunction g;
  g.shape = rho.basis()->grid();
  g.values = real_density_on_grid(rho).pow(4.0 / 3.0).cast<std::complex<double>>();
  return -functional.c_alpha * integrate_real(g, rho.basis()->lattice());
}

PeriodicField xc_potential(const Functional& functional, const PeriodicField& rho) {
  if (!functional.has_xc()) return PeriodicField::zeros(rho.basis());
  GridFunction g;
  g.shape = rho.basis()->grid();
  g.values = (-(4.0 / 3.0) * functional.c_alpha * real_density_on_grid(rho).pow(1.0 / 3.0))
                 .cast<std::complex<double>>();
  return to_fourier(g, rho.basis());
}

double density_functional(const ModelSpec& model, const PeriodicField& rho) {
  double f = 0.0;
  if (model.functional.has_hartree()) f += 0.5 * coulomb_energy(rho, rho);
  f += xc_energy(model.functional, rho);
  return f;
}

PeriodicField density_potential(const ModelSpec& model, const PeriodicField& rho) {
  PeriodicField v = PeriodicField::zeros(rho.basis());
  if (model.functional.has_hartree()) v += hartree_potential(rho);
  if (model.functional.has_xc()) v += xc_potential(model.functional, rho);
  return v;
}

double kinetic_energy(const OrbitalSet& orbitals) {
  const auto& kin = orbitals.basis()->kinetic();
  const Eigen::Map<const Eigen::VectorXd> k(kin.data(), static_cast<Eigen::Index>(kin.size()));
  return (orbitals.coefficients().cwiseAbs2().transpose() * k).sum();
}

double external_energy(const ModelSpec& model, const PeriodicField& rho) {
  return std::real(model.external.field.dot(rho));
}

double total_energy(const ModelSpec& model, double kinetic, const PeriodicField& rho) {
  return kinetic + external_energy(model, rho) + density_functional(model, rho);
}

double total_energy(const ModelSpec& model, const OrbitalSet& orbitals) {
  return total_energy(model, kinetic_energy(orbitals), density(orbitals, model.density_basis()));
}

MeanFieldHamiltonian::MeanFieldHamiltonian(const ModelSpec& model, const PeriodicField& rho)
    : MeanFieldHamiltonian([&] {
        PeriodicField v = model.external.field;
        PeriodicField vr = density_potential(model, rho);
        if (vr.basis() != v.basis()) vr = project(vr, v.basis());
        return v + vr;
      }()) {}

MeanFieldHamiltonian::MeanFieldHamiltonian(PeriodicField total_potential)
    : potential_(std::move(total_potential)) {
  grid_values_ = to_real(potential_).values.real();
  const auto& basis = *potential_.basis();
  mean_ = std::real(potential_.coefficient({0, 0, 0})) / std::sqrt(basis.lattice().volume());
  sup_ = grid_values_.abs().maxCoeff();
  fluct_sup_ = (grid_values_ - mean_).abs().maxCoeff();
}

void MeanFieldHamiltonian::check_grid(const PlanewaveBasis& basis) const {
  if (basis.grid() != potential_.basis()->grid() ||
      !(basis.lattice() == potential_.basis()->lattice())) {
    throw InvalidArgument("orbital basis does not share the potential grid");
  }
}

Eigen::VectorXcd MeanFieldHamiltonian::apply_potential(const BasisPtr& basis,
                                                       const Eigen::VectorXcd& c) const {
  check_grid(*basis);
  GridFunction g = to_real(basis, c);
  g.values *= grid_values_.cast<std::complex<double>>();
  return to_fourier_coefficients(g, basis);
}

Eigen::VectorXcd MeanFieldHamiltonian::apply(const BasisPtr& basis, const Eigen::VectorXcd& c,
                                             double shift) const {
  Eigen::VectorXcd out = apply_potential(basis, c);
  const auto& kin = basis->kinetic();
  for (std::size_t i = 0; i < kin.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out[ii] += (kin[i] + shift) * c[ii];
  }
  return out;
}

PeriodicField MeanFieldHamiltonian::apply(const PeriodicField& phi, double shift) const {
  return PeriodicField(phi.basis(), apply(phi.basis(), phi.coefficients(), shift));
}

Eigen::MatrixXcd MeanFieldHamiltonian::dense_matrix(const BasisPtr& basis, double shift) const {
  check_grid(*basis);
  const auto& pb = *potential_.basis();
  const double inv_sqrt_vol = 1.0 / std::sqrt(pb.lattice().volume());
  const auto& ms = basis->miller();
  const auto n = static_cast<Eigen::Index>(ms.size());
  Eigen::MatrixXcd h(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const auto& a = ms[static_cast<std::size_t>(i)];
      const auto& b = ms[static_cast<std::size_t>(j)];
      const std::complex<double> v =
          potential_.coefficient({a[0] - b[0], a[1] - b[1], a[2] - b[2]}) * inv_sqrt_vol;
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
    h(j, j) = std::real(h(j, j)) + basis->kinetic()[static_cast<std::size_t>(j)] + shift;
  }
  return h;
}

PeriodicField apply_hamiltonian(const ModelSpec& model, const PeriodicField& rho, double shift,
                                const PeriodicField& phi) {
  return MeanFieldHamiltonian(model, rho).apply(phi, shift);
}

}  // namespace pwcert
