#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pwcert/linear_solver.hpp"
#include "support.hpp"

using namespace pwtest;

namespace {

constexpr double kPi = std::numbers::pi;

struct Setup {
  Lattice lat = Lattice::line(10.0);
  BasisPtr orb;
  BasisPtr rho;
};

Setup setup(double ecut) {
  Setup s;
  s.orb = PlanewaveBasis::build(s.lat, ecut);
  s.rho = density_basis(s.lat, ecut, s.orb->grid());
  return s;
}

OrbitalSet single_modes(const BasisPtr& b, std::initializer_list<int> modes) {
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(b->size()),
                                              static_cast<Eigen::Index>(modes.size()));
  int j = 0;
  for (int n : modes) c(b->index_of({n, 0, 0}), j++) = 1.0;
  return OrbitalSet(b, b, c, Eigen::VectorXd::Zero(j));
}

ModelSpec model_on(const Setup& s, PotentialDescriptor pot, Functional f, int n_el) {
  return {s.lat, n_el, make_potential(pot, s.rho), f};
}

// Random density with a fixed mean, real and smooth enough to stay positive.
PeriodicField random_density(const BasisPtr& rho, std::uint64_t seed, double mean) {
  PeriodicField r = random_real_field(rho, seed);
  r *= 0.02;
  r.coefficients()[rho->index_of({0, 0, 0})] = mean * std::sqrt(rho->lattice().volume());
  return r;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("random potential") {
    auto s = setup(400.0);
    const auto v = random_potential_1d(s.rho, 42);
    CHECK(v.field.coefficient({0, 0, 0}) == std::complex<double>(1.0, 0.0));
    const double g1 = 2.0 * kPi / 10.0;
    int checked = 0;
    for (std::size_t i = 0; i < s.rho->size(); ++i) {
      const int n = s.rho->miller()[i][0];
      const double g = std::abs(n * g1);
      if (n == 0 || g > 100.0) continue;
      CHECK(std::abs(v.field.coefficients()[static_cast<Eigen::Index>(i)]) <= 10.0 / std::pow(g, 1.1));
      ++checked;
    }
    CHECK(checked > 100);
    CHECK(v.field.is_real());

    const auto again = random_potential_1d(s.rho, 42);
    const auto other = random_potential_1d(s.rho, 43);
    CHECK((again.field.coefficients() - v.field.coefficients()).norm() == 0.0);
    CHECK((other.field.coefficients() - v.field.coefficients()).norm() > 1.0);

    // Draws are independent of the sphere size.
    auto small = setup(50.0);
    const auto vs = random_potential_1d(small.rho, 42);
    for (const auto& m : small.rho->miller()) CHECK(vs.field.coefficient(m) == v.field.coefficient(m));
  }

  TEST_CASE("densities") {
    auto s = setup(5.0);
    const PeriodicField r0 = density(single_modes(s.orb, {0}), s.rho);
    const GridFunction g0 = to_real(r0);
    for (auto x : g0.values) CHECK(std::abs(x - 0.1) < 1e-14);

    const PeriodicField r2 = density(single_modes(s.orb, {0, 1}), s.rho);
    GridFunction g2 = to_real(r2);
    CHECK(integrate_real(g2, s.lat) == doctest::Approx(2.0).epsilon(1e-13));
    const int n = g2.shape[0];
    for (int j = 0; j < n; ++j) {
      // |e_0|^2 + |e_G|^2 = 2 / |Omega|; cross terms cancel within each orbital.
      CHECK(std::abs(g2.values[j] - 0.2) < 1e-13);
    }

    const auto nb = static_cast<Eigen::Index>(s.orb->size());
    const Eigen::MatrixXcd c = random_orthonormal(nb, 2, 9);
    const OrbitalSet pair(s.orb, s.orb, c, Eigen::VectorXd::Zero(2));
    const GridFunction rho = to_real(density(pair, s.rho));
    const GridFunction p0 = to_real(s.orb, c.col(0));
    const GridFunction p1 = to_real(s.orb, c.col(1));
    const Eigen::ArrayXd oracle = p0.values.abs2() + p1.values.abs2();
    CHECK((rho.values - oracle.cast<std::complex<double>>()).abs().maxCoeff() < 1e-12);

    Eigen::MatrixXcd bad = c;
    bad.col(1) = c.col(0);
    CHECK_THROWS_AS(density(OrbitalSet(s.orb, s.orb, bad, Eigen::VectorXd::Zero(2)), s.rho),
                    InvalidArgument);
  }

  TEST_CASE("Hartree potential and Coulomb energy") {
    auto s = setup(5.0);
    PeriodicField c = PeriodicField::zeros(s.rho);
    c.coefficients()[s.rho->index_of({0, 0, 0})] = 3.0;
    CHECK(hartree_potential(c).norm() == 0.0);
    CHECK(coulomb_energy(c, c) == 0.0);

    const double g2 = std::pow(2.0 * kPi / 10.0, 2);
    PeriodicField m = PeriodicField::zeros(s.rho);
    m.coefficients()[s.rho->index_of({1, 0, 0})] = 1.0;
    const auto vh = hartree_potential(m);
    CHECK(std::abs(vh.coefficient({1, 0, 0}) - 4.0 * kPi / g2) < 1e-12);
    CHECK(4.0 * kPi / g2 == doctest::Approx(31.83).epsilon(1e-3));

    m.coefficients()[s.rho->index_of({-1, 0, 0})] = 1.0;
    CHECK(coulomb_energy(m, m) == doctest::Approx(2.0 * 4.0 * kPi / g2).epsilon(1e-14));
    CHECK(coulomb_energy(m, m) == doctest::Approx(63.66).epsilon(1e-3));

    // -Delta V_H = 4 pi (rho - mean) mode by mode.
    const PeriodicField r = random_density(s.rho, 3, 0.3);
    const PeriodicField v = hartree_potential(r);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.rho->size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double k2 = 2.0 * s.rho->kinetic()[i];
      const auto rhs = k2 == 0.0 ? std::complex<double>(0.0) : 4.0 * kPi * r.coefficients()[ii];
      worst = std::max(worst, std::abs(k2 * v.coefficients()[ii] - rhs));
    }
    CHECK(worst <= 1e-12 * r.norm());
    CHECK(std::abs(v.coefficient({0, 0, 0})) == 0.0);

    GridFunction prod = to_real(v);
    prod.values *= to_real(r).values;
    CHECK(std::abs(coulomb_energy(r, r) - integrate_real(prod, s.lat)) <= 1e-10);
  }

  TEST_CASE("free planewave energies") {
    auto s = setup(5.0);
    const auto m = model_on(s, {}, Functional::linear(), 1);
    CHECK(total_energy(m, single_modes(s.orb, {0})) == 0.0);
    CHECK(total_energy(m, single_modes(s.orb, {1})) == doctest::Approx(0.19739).epsilon(1e-5));
  }

  TEST_CASE("Hamiltonian application") {
    auto s = setup(5.0);
    const auto m = model_on(s, {}, Functional::rhf(), 1);
    PeriodicField rho = PeriodicField::zeros(s.rho);
    rho.coefficients()[s.rho->index_of({0, 0, 0})] = 0.1 * std::sqrt(10.0);
    const OrbitalSet eg = single_modes(s.orb, {2});
    const PeriodicField hphi = apply_hamiltonian(m, rho, 0.0, eg.orbital(0));
    CHECK((hphi.coefficients() - s.orb->kinetic()[static_cast<std::size_t>(s.orb->index_of({2, 0, 0}))] *
                                     eg.coefficients().col(0))
              .norm() < 1e-13);
    const PeriodicField sphi = apply_hamiltonian(m, rho, 1.5, single_modes(s.orb, {0}).orbital(0));
    CHECK((sphi.coefficients() - 1.5 * single_modes(s.orb, {0}).coefficients().col(0)).norm() < 1e-13);

    // Dense assembly oracle with V + V_rho built mode by mode.
    PotentialDescriptor pot;
    pot.kind = PotentialDescriptor::Kind::random1d;
    pot.seed = 5;
    for (auto f : {Functional::rhf(), Functional::xalpha()}) {
      const auto mm = model_on(s, pot, f, 2);
      const PeriodicField r = random_density(s.rho, 8, 0.2);
      const MeanFieldHamiltonian h(mm, r);
      const PeriodicField vtot = mm.external.field + density_potential(mm, r);
      const auto n = static_cast<Eigen::Index>(s.orb->size());
      Eigen::MatrixXcd dense(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          const auto& a = s.orb->miller()[static_cast<std::size_t>(i)];
          const auto& b = s.orb->miller()[static_cast<std::size_t>(j)];
          dense(i, j) = vtot.coefficient({a[0] - b[0], 0, 0}) / std::sqrt(10.0);
        }
        dense(i, i) += s.orb->kinetic()[static_cast<std::size_t>(i)] + 0.3;
      }
      const Eigen::VectorXcd x = random_coeffs(s.orb->size(), 12);
      CHECK((h.apply(s.orb, x, 0.3) - dense * x).norm() <= 1e-11 * (dense * x).norm());
      CHECK((h.dense_matrix(s.orb, 0.3) - dense).norm() <= 1e-12 * dense.norm());

      const PeriodicField p(s.orb, random_coeffs(s.orb->size(), 13));
      const PeriodicField q(s.orb, random_coeffs(s.orb->size(), 14));
      const auto a = p.dot(h.apply(q));
      const auto b = std::conj(q.dot(h.apply(p)));
      CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
    }
  }

  TEST_CASE("convexity identity of the rHF functional") {
    auto s = setup(8.0);
    const auto m = model_on(s, {}, Functional::rhf(), 2);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const PeriodicField r1 = random_density(s.rho, seed, 0.2);
      const PeriodicField r2 = random_density(s.rho, seed + 100, 0.2);
      const PeriodicField d = r1 - r2;
      const double lhs = density_functional(m, r1) - density_functional(m, r2) -
                         std::real(density_potential(m, r2).dot(d));
      const double rhs = 0.5 * coulomb_energy(d, d);
      CHECK(std::abs(lhs - rhs) <= 1e-10);
      CHECK(rhs >= 0.0);
    }
  }

  TEST_CASE("functional derivative by finite differences") {
    auto s = setup(8.0);
    for (auto f : {Functional::rhf(), Functional::xalpha()}) {
      const auto m = model_on(s, {}, f, 2);
      const PeriodicField r = random_density(s.rho, 31, 0.2);
      PeriodicField dr = random_real_field(s.rho, 32);
      dr *= 0.01;
      const double slope = std::real(density_potential(m, r).dot(dr));
      double prev = 0.0;
      for (double eps : {1e-2, 1e-3}) {
        const double fd = (density_functional(m, r + eps * dr) - density_functional(m, r - eps * dr)) /
                          (2.0 * eps);
        const double err = std::abs(fd - slope);
        if (prev > 0.0 && prev > 1e-12) CHECK(err <= prev);
        prev = err;
        CHECK(err <= 1e-6 * std::max(1.0, std::abs(slope)));
      }
    }
  }

  TEST_CASE("double-counting identity at self-consistency") {
    RunConfig cfg = toy_config(42, 100.0, 101.0);
    cfg.scf.density_tol = 1e-13;
    const Problem p = build_problem(cfg);
    const ScfHistory h = run_scf(p.model, p.disc, cfg.scf);
    REQUIRE(h.converged);
    const auto& last = h.records.back();
    const double sum_eps = last.state.fibers[0].eigenvalues().sum();
    const double e = sum_eps - 0.5 * coulomb_energy(last.rho, last.rho);
    CHECK(std::abs(e - last.energy) <= 1e-10);
  }
}
