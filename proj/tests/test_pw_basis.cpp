#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"

using namespace pwtest;

namespace {

double gmin() { return 2.0 * std::numbers::pi / 10.0; }

}  // namespace

TEST_SUITE("pw_basis") {
  TEST_CASE("cutoff sphere sizes") {
    const Lattice lat = Lattice::line(10.0);
    auto b = PlanewaveBasis::build(lat, 0.2);
    REQUIRE(b->size() == 3);
    CHECK(b->index_of({0, 0, 0}) >= 0);
    CHECK(b->index_of({1, 0, 0}) >= 0);
    CHECK(b->index_of({-1, 0, 0}) >= 0);
    CHECK(b->kinetic()[static_cast<std::size_t>(b->index_of({1, 0, 0}))] ==
          doctest::Approx(0.5 * gmin() * gmin()).epsilon(1e-14));

    CHECK(PlanewaveBasis::build(lat, 0.1)->size() == 1);

    std::size_t brute = 0;
    for (int n = -1000; n <= 1000; ++n) {
      if (0.5 * std::pow(gmin() * n, 2) <= 400.0) ++brute;
    }
    auto big = PlanewaveBasis::build(lat, 400.0);
    CHECK(big->size() == brute);
    CHECK(big->size() == 91);
  }

  TEST_CASE("lexicographic order and kinetic energies") {
    Eigen::Matrix3d v;
    v << 4.0, 1.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 1.0;
    const Lattice lat(2, v);
    auto b = PlanewaveBasis::build(lat, 3.0, lat.cartesian_k(Eigen::Vector3d(0.25, -0.5, 0.0)));
    for (std::size_t i = 1; i < b->size(); ++i) CHECK(b->miller()[i - 1] < b->miller()[i]);
    for (std::size_t i = 0; i < b->size(); ++i) {
      const Eigen::Vector3d g = b->gvector(i) + b->kshift();
      CHECK(b->kinetic()[i] == doctest::Approx(0.5 * g.squaredNorm()).epsilon(1e-13));
      CHECK(b->kinetic()[i] <= 3.0);
      CHECK(b->miller()[i][2] == 0);
    }
  }

  TEST_CASE("to_real of single modes") {
    const Lattice lat = Lattice::line(10.0);
    auto b = PlanewaveBasis::build(lat, 0.2);
    const double inv = 1.0 / std::sqrt(10.0);

    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(3);
    c[b->index_of({0, 0, 0})] = 1.0;
    const GridFunction e0 = to_real(b, c);
    for (auto x : e0.values) CHECK(std::abs(x - inv) < 1e-14);

    c.setZero();
    c[b->index_of({1, 0, 0})] = 1.0;
    c[b->index_of({-1, 0, 0})] = 1.0;
    const GridFunction cs = to_real(b, c);
    const int n = cs.shape[0];
    for (int j = 0; j < n; ++j) {
      const double x = 10.0 * j / n;
      CHECK(std::abs(cs.values[j] - 2.0 * inv * std::cos(gmin() * x)) < 1e-13);
    }
  }

  TEST_CASE("Fourier round trip and Parseval") {
    Eigen::Matrix3d v = Eigen::Matrix3d::Identity() * 3.0;
    v(0, 1) = 0.5;
    const Lattice lat(3, v);
    auto b = PlanewaveBasis::build(lat, 6.0);
    const PeriodicField f(b, random_coeffs(b->size(), 7));
    const Eigen::VectorXcd back = to_fourier_coefficients(to_real(f), b);
    CHECK((back - f.coefficients()).norm() <= 1e-12 * f.norm());

    GridFunction g = to_real(f);
    g.values = g.values.abs2().cast<std::complex<double>>();
    const double l2 = std::sqrt(integrate_real(g, lat));
    CHECK(std::abs(l2 - f.norm()) <= 1e-12 * f.norm());
  }

  TEST_CASE("projection") {
    const Lattice lat = Lattice::line(10.0);
    auto ref = PlanewaveBasis::build(lat, 50.0);
    auto coarse = PlanewaveBasis::build(lat, 10.0, Eigen::Vector3d::Zero(), ref->grid());
    const PeriodicField f(ref, random_coeffs(ref->size(), 3));
    const PeriodicField g(ref, random_coeffs(ref->size(), 4));

    CHECK((project(f, ref).coefficients() - f.coefficients()).norm() == 0.0);

    auto tiny = PlanewaveBasis::build(lat, 0.1, Eigen::Vector3d::Zero(), ref->grid());
    PeriodicField eg = PeriodicField::zeros(ref);
    eg.coefficients()[ref->index_of({2, 0, 0})] = 1.0;
    CHECK(project(eg, tiny).norm() == 0.0);

    const PeriodicField pf = project(f, coarse);
    double outside = 0.0;
    for (std::size_t i = 0; i < ref->size(); ++i) {
      if (coarse->index_of(ref->miller()[i]) < 0) {
        outside += std::norm(f.coefficients()[static_cast<Eigen::Index>(i)]);
      }
    }
    const PeriodicField back = project(pf, ref);
    CHECK(std::abs((f - back).norm() * (f - back).norm() - outside) <= 1e-12 * outside);

    // Idempotent and self-adjoint.
    const PeriodicField ppf = project(project(pf, ref), coarse);
    CHECK((ppf.coefficients() - pf.coefficients()).norm() == 0.0);
    const auto lhs = project(project(f, coarse), ref).dot(g);
    const auto rhs = f.dot(project(project(g, coarse), ref));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
  }

  TEST_CASE("Sobolev norms") {
    const Lattice lat = Lattice::line(10.0);
    auto b = PlanewaveBasis::build(lat, 0.2);
    PeriodicField e0 = PeriodicField::zeros(b);
    e0.coefficients()[b->index_of({0, 0, 0})] = 1.0;
    CHECK(sobolev_norm(e0, 1.0) == doctest::Approx(1.0));
    CHECK(sobolev_norm(e0, -3.0) == doctest::Approx(1.0));
    PeriodicField eg = PeriodicField::zeros(b);
    eg.coefficients()[b->index_of({1, 0, 0})] = 1.0;
    CHECK(sobolev_norm(eg, 1.0) ==
          doctest::Approx(std::sqrt(1.0 + 0.5 * gmin() * gmin())).epsilon(1e-14));

    // s = -1 against a dense solve with 1 - Delta/2.
    auto big = PlanewaveBasis::build(lat, 30.0);
    const PeriodicField f(big, random_coeffs(big->size(), 11));
    const auto n = static_cast<Eigen::Index>(big->size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = 1.0 + big->kinetic()[static_cast<std::size_t>(i)];
    const Eigen::VectorXcd x = m.cast<std::complex<double>>().partialPivLu().solve(f.coefficients());
    const double dense = std::sqrt(std::real(f.coefficients().dot(x)));
    CHECK(std::abs(sobolev_norm(f, -1.0) - dense) <= 1e-12 * dense);
  }

  TEST_CASE("products are alias free on the density sphere") {
    for (int dim : {1, 2}) {
      Eigen::Matrix3d v = Eigen::Matrix3d::Identity();
      v(0, 0) = 4.0;
      if (dim == 2) v(1, 1) = 3.0;
      const Lattice lat(dim, v);
      const double ecut = dim == 1 ? 8.0 : 3.0;
      auto b = PlanewaveBasis::build(lat, ecut);
      auto rho = density_basis(lat, ecut, b->grid());
      const Eigen::VectorXcd f = random_coeffs(b->size(), 21);
      const Eigen::VectorXcd g = random_coeffs(b->size(), 22);

      GridFunction prod = to_real(b, f);
      prod.values *= to_real(b, g).values;
      const Eigen::VectorXcd fft = to_fourier_coefficients(prod, rho);

      Eigen::VectorXcd direct = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rho->size()));
      const double inv = 1.0 / std::sqrt(lat.volume());
      for (std::size_t i = 0; i < b->size(); ++i) {
        for (std::size_t j = 0; j < b->size(); ++j) {
          const auto& a = b->miller()[i];
          const auto& c = b->miller()[j];
          const auto h = rho->index_of({a[0] + c[0], a[1] + c[1], a[2] + c[2]});
          REQUIRE(h >= 0);
          direct[h] += inv * f[static_cast<Eigen::Index>(i)] * g[static_cast<Eigen::Index>(j)];
        }
      }
      CHECK((fft - direct).norm() <= 1e-12 * direct.norm());
    }
  }

  TEST_CASE("subspace mask") {
    const Lattice lat = Lattice::line(10.0);
    auto ref = PlanewaveBasis::build(lat, 40.0);
    auto coarse = PlanewaveBasis::build(lat, 10.0, Eigen::Vector3d::Zero(), ref->grid());
    const SubspaceMask mask(coarse, ref);
    const Eigen::VectorXcd c = random_coeffs(coarse->size(), 5);
    const Eigen::VectorXcd e = mask.embed(c);
    CHECK((mask.restrict(e) - c).norm() == 0.0);
    CHECK(mask.complement(e).norm() == 0.0);
    const Eigen::VectorXcd r = random_coeffs(ref->size(), 6);
    CHECK((mask.project(r) + mask.complement(r) - r).norm() == 0.0);
    CHECK_THROWS_AS(SubspaceMask(ref, coarse), InvalidArgument);
  }
}
