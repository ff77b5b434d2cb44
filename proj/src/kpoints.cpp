#include "pwcert/kpoints.hpp"

#include <cmath>

#include "pwcert/error.hpp"

namespace pwcert {

KGrid KGrid::uniform(const Lattice& lattice, const std::array<int, 3>& sizes) {
  for (int d = 0; d < 3; ++d) {
    if (sizes[d] < 1) throw InvalidArgument("k-grid sizes must be positive");
    if (d >= lattice.dimension() && sizes[d] != 1) {
      throw InvalidArgument("k-grid extends along a non-periodic direction");
    }
  }
  KGrid g;
  g.sizes = sizes;
  for (int a = 0; a < sizes[0]; ++a) {
    for (int b = 0; b < sizes[1]; ++b) {
      for (int c = 0; c < sizes[2]; ++c) {
        Eigen::Vector3d f;
        const std::array<int, 3> idx{a, b, c};
        for (int d = 0; d < 3; ++d) {
          double x = static_cast<double>(idx[d]) / sizes[d];
          if (x > 0.5) x -= 1.0;
          f[d] = x;
        }
        g.fractional.push_back(f);
      }
    }
  }
  g.weights.assign(g.fractional.size(), 1.0 / static_cast<double>(g.fractional.size()));
  return g;
}

KGrid KGrid::gamma() {
  KGrid g;
  g.fractional.push_back(Eigen::Vector3d::Zero());
  g.weights.push_back(1.0);
  return g;
}

BzDiscretization BzDiscretization::build(const Lattice& lattice, double ecut, double ecut_ref,
                                         const KGrid& kgrid) {
  if (!(ecut > 0.0) || !(ecut_ref > 0.0)) throw InvalidArgument("energy cutoffs must be positive");
  if (ecut > ecut_ref) throw InvalidArgument("computational cutoff exceeds the reference cutoff");
  if (kgrid.size() == 0 || kgrid.weights.size() != kgrid.size()) {
    throw InvalidArgument("k-grid without points or with mismatched weights");
  }
  BzDiscretization d;
  d.kgrid_ = kgrid;
  d.ecut_ = ecut;
  d.ecut_ref_ = ecut_ref;
  std::vector<Eigen::Vector3d> ks;
  for (const auto& f : kgrid.fractional) ks.push_back(lattice.cartesian_k(f));
  const GridShape grid = alias_free_grid(lattice, ecut_ref, ks);
  d.density_ = pwcert::density_basis(lattice, ecut_ref, grid);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    Fiber fb;
    fb.k_fractional = kgrid.fractional[i];
    fb.k = ks[i];
    fb.weight = kgrid.weights[i];
    fb.ref = PlanewaveBasis::build(lattice, ecut_ref, ks[i], grid);
    fb.coarse = ecut == ecut_ref ? fb.ref : PlanewaveBasis::build(lattice, ecut, ks[i], grid);
    d.fibers_.push_back(std::move(fb));
  }
  return d;
}

BzDiscretization BzDiscretization::with_coarse_cutoff(double ecut) const {
  if (!(ecut > 0.0) || ecut > ecut_ref_) throw InvalidArgument("invalid computational cutoff");
  BzDiscretization d = *this;
  d.ecut_ = ecut;
  for (auto& fb : d.fibers_) {
    fb.coarse = ecut == ecut_ref_ ? fb.ref : PlanewaveBasis::build(lattice(), ecut, fb.k, grid());
  }
  return d;
}

PeriodicField bz_density(const BlochState& state, const BasisPtr& density_basis) {
  if (state.fibers.size() != state.weights.size() || state.fibers.empty()) {
    throw InvalidArgument("Bloch state needs one weight per fiber");
  }
  PeriodicField rho = PeriodicField::zeros(density_basis);
  for (std::size_t k = 0; k < state.fibers.size(); ++k) {
    PeriodicField rk = density(state.fibers[k], density_basis);
    rk *= state.weights[k];
    rho += rk;
  }
  return rho;
}

double bz_total_energy(const ModelSpec& model, const BlochState& state, const PeriodicField& rho) {
  double kin = 0.0;
  for (std::size_t k = 0; k < state.fibers.size(); ++k) {
    kin += state.weights[k] * kinetic_energy(state.fibers[k]);
  }
  return total_energy(model, kin, rho);
}

double bz_total_energy(const ModelSpec& model, const BlochState& state) {
  return bz_total_energy(model, state, bz_density(state, model.density_basis()));
}

PeriodicField fiber_hamiltonian_apply(const ModelSpec& model, const PeriodicField& rho,
                                      const Eigen::Vector3d& k, double shift,
                                      const PeriodicField& phi) {
  if ((phi.basis()->kshift() - k).norm() > 1e-12 * (1.0 + k.norm())) {
    throw InvalidArgument("field does not live on the basis of this k-point");
  }
  return apply_hamiltonian(model, rho, shift, phi);
}

BzCertificate bz_error_components(const MeanFieldHamiltonian& hamiltonian,
                                  const BlochState& gamma_m, const BzDiscretization& disc,
                                  int n_el, bool convex, const CertifyOptions& options) {
  if (gamma_m.fibers.size() != disc.fibers().size()) {
    throw InvalidArgument("state and discretization have different k-grids");
  }
  BzCertificate out;
  std::vector<double> weights;
  for (std::size_t k = 0; k < disc.fibers().size(); ++k) {
    const Fiber& fb = disc.fibers()[k];
    out.fibers.push_back(
        certify_fiber(hamiltonian, gamma_m.fibers[k], fb.coarse, fb.ref, n_el, options));
    weights.push_back(fb.weight);
  }
  out.report = make_report(out.fibers, weights, convex);
  return out;
}

Lattice supercell_lattice(const Lattice& lattice, const std::array<int, 3>& factors) {
  Eigen::Matrix3d v = lattice.vectors();
  for (int d = 0; d < lattice.dimension(); ++d) {
    if (factors[d] < 1) throw InvalidArgument("supercell factors must be positive");
    v.col(d) *= factors[d];
  }
  return Lattice(lattice.dimension(), v);
}

PeriodicField fold_to_supercell(const PeriodicField& f, const BasisPtr& supercell_basis,
                                const std::array<int, 3>& factors) {
  const auto& src = *f.basis();
  const double scale = std::sqrt(supercell_basis->lattice().volume() / src.lattice().volume());
  PeriodicField out = PeriodicField::zeros(supercell_basis);
  const auto& ms = supercell_basis->miller();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    Miller n{0, 0, 0};
    bool divisible = true;
    for (int d = 0; d < 3; ++d) {
      if (ms[i][d] % factors[d] != 0) divisible = false;
      n[d] = ms[i][d] / factors[d];
    }
    if (divisible) out.coefficients()[static_cast<Eigen::Index>(i)] = scale * f.coefficient(n);
  }
  return out;
}

}  // namespace pwcert
