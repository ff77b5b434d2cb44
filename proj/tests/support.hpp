#pragma once

#include <random>

#include <Eigen/Dense>

#include "pwcert/config.hpp"
#include "pwcert/error.hpp"
#include "pwcert/estimators.hpp"
#include "pwcert/kpoints.hpp"
#include "pwcert/scf.hpp"

namespace pwtest {

using namespace pwcert;

inline Eigen::VectorXcd random_coeffs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Eigen::VectorXcd c(static_cast<Eigen::Index>(n));
  for (auto& x : c) x = {d(rng), d(rng)};
  return c;
}

/// Random real function: coefficients symmetrized so that c_{-G} = conj(c_G).
inline PeriodicField random_real_field(const BasisPtr& basis, std::uint64_t seed) {
  Eigen::VectorXcd c = random_coeffs(basis->size(), seed);
  Eigen::VectorXcd s = c;
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const auto& m = basis->miller()[i];
    const auto j = basis->index_of({-m[0], -m[1], -m[2]});
    s[static_cast<Eigen::Index>(i)] =
        0.5 * (c[static_cast<Eigen::Index>(i)] + std::conj(c[static_cast<Eigen::Index>(j)]));
  }
  return PeriodicField(basis, s);
}

inline Eigen::MatrixXcd random_orthonormal(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Eigen::MatrixXcd m(rows, cols);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = {d(rng), d(rng)};
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(rows, cols);
}

/// The 1D toy: Omega = (0, 10), three electrons, seeded random potential.
inline RunConfig toy_config(std::uint64_t seed = 42, double ecut = 400.0, double ecut_ref = 1000.0) {
  RunConfig c;
  c.potential.kind = PotentialDescriptor::Kind::random1d;
  c.potential.seed = seed;
  c.ecut = ecut;
  c.ecut_ref = ecut_ref;
  c.scf.mixing = ScfConfig::Mixing::anderson;
  return c;
}

inline ModelSpec linear_model(const BzDiscretization& ref, PotentialDescriptor pot, int n_el) {
  return {ref.lattice(), n_el, make_potential(pot, ref.density_basis()), Functional::linear()};
}

}  // namespace pwtest
