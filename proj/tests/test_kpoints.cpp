#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pwcert/linear_solver.hpp"
#include "support.hpp"

using namespace pwtest;

namespace {

PotentialDescriptor random1d(std::uint64_t seed) {
  PotentialDescriptor d;
  d.kind = PotentialDescriptor::Kind::random1d;
  d.seed = seed;
  return d;
}

std::vector<double> spectrum(const MeanFieldHamiltonian& h, const BasisPtr& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.dense_matrix(b), Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

}  // namespace

TEST_SUITE("kpoints") {
  TEST_CASE("uniform grids") {
    const Lattice lat = Lattice::line(10.0);
    const KGrid g = KGrid::uniform(lat, {4, 1, 1});
    REQUIRE(g.size() == 4);
    std::vector<double> f;
    for (const auto& k : g.fractional) f.push_back(k[0]);
    std::sort(f.begin(), f.end());
    CHECK(f == std::vector<double>{-0.25, 0.0, 0.25, 0.5});
    double w = 0.0;
    for (double x : g.weights) w += x;
    CHECK(w == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(KGrid::uniform(lat, {2, 2, 1}), InvalidArgument);
    CHECK(KGrid::gamma().size() == 1);
  }

  TEST_CASE("free fibers and Hermiticity") {
    const Lattice lat = Lattice::line(10.0);
    const auto d = BzDiscretization::build(lat, 5.0, 20.0, KGrid::uniform(lat, {3, 1, 1}));
    const MeanFieldHamiltonian free(PeriodicField::zeros(d.density_basis()));
    const ModelSpec m = linear_model(d, random1d(3), 2);
    const PeriodicField rho = PeriodicField::zeros(d.density_basis());
    for (const auto& f : d.fibers()) {
      const auto ev = spectrum(free, f.coarse);
      std::vector<double> expect;
      for (std::size_t i = 0; i < f.coarse->size(); ++i) {
        const Eigen::Vector3d g = f.coarse->gvector(i) + f.k;
        expect.push_back(0.5 * g.squaredNorm());
        CHECK(f.coarse->kinetic()[i] == doctest::Approx(expect.back()).epsilon(1e-14));
      }
      std::sort(expect.begin(), expect.end());
      for (std::size_t i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] - expect[i]) < 1e-12);

      const PeriodicField p(f.ref, random_coeffs(f.ref->size(), 1));
      const PeriodicField q(f.ref, random_coeffs(f.ref->size(), 2));
      const auto hp = fiber_hamiltonian_apply(m, rho, f.k, 0.0, p);
      const auto hq = fiber_hamiltonian_apply(m, rho, f.k, 0.0, q);
      CHECK(std::abs(q.dot(hp) - std::conj(p.dot(hq))) <= 1e-10 * std::abs(q.dot(hp)));
    }

    // Gamma reduces to the single-cell operator.
    const auto g = BzDiscretization::build(lat, 5.0, 20.0, KGrid::gamma());
    const ModelSpec mg = linear_model(g, random1d(3), 2);
    const Fiber& f0 = g.fibers().front();
    const PeriodicField p(f0.ref, random_coeffs(f0.ref->size(), 1));
    const PeriodicField rg = PeriodicField::zeros(g.density_basis());
    CHECK((fiber_hamiltonian_apply(mg, rg, f0.k, 0.3, p).coefficients() -
           apply_hamiltonian(mg, rg, 0.3, p).coefficients())
              .norm() == 0.0);
  }

  TEST_CASE("Brillouin-zone densities and energies") {
    const Lattice lat = Lattice::line(10.0);
    const auto d = BzDiscretization::build(lat, 5.0, 20.0, KGrid::uniform(lat, {2, 1, 1}));
    const ModelSpec m = linear_model(d, random1d(3), 2);
    BlochState st;
    std::vector<GridFunction> grids;
    for (std::size_t k = 0; k < d.fibers().size(); ++k) {
      const Fiber& f = d.fibers()[k];
      const Eigen::MatrixXcd c = random_orthonormal(static_cast<Eigen::Index>(f.ref->size()), 2, 40 + k);
      st.fibers.emplace_back(f.ref, f.ref, c, Eigen::VectorXd::Zero(2));
      st.weights.push_back(f.weight);
    }
    const GridFunction bz = to_real(bz_density(st, d.density_basis()));
    GridFunction avg = to_real(density(st.fibers[0], d.density_basis()));
    avg.values = 0.5 * (avg.values + to_real(density(st.fibers[1], d.density_basis())).values);
    CHECK((bz.values - avg.values).abs().maxCoeff() <= 1e-13);

    // Oracle straight from orbital grid values.
    Eigen::ArrayXd direct = Eigen::ArrayXd::Zero(bz.values.size());
    for (const auto& o : st.fibers) {
      for (int i = 0; i < 2; ++i) direct += 0.5 * to_real(o.basis(), o.coefficients().col(i)).values.abs2();
    }
    CHECK((bz.values.real() - direct).abs().maxCoeff() <= 1e-12);

    // Duplicated k-points with split weights.
    BlochState dup;
    for (std::size_t k = 0; k < st.fibers.size(); ++k) {
      for (int r = 0; r < 2; ++r) {
        dup.fibers.push_back(st.fibers[k]);
        dup.weights.push_back(0.5 * st.weights[k]);
      }
    }
    CHECK(std::abs(bz_total_energy(m, dup) - bz_total_energy(m, st)) <= 1e-12);

    // Identical orbitals on every fiber give that fiber's density.
    BlochState same{{st.fibers[0], st.fibers[0]}, {0.5, 0.5}};
    CHECK((to_real(bz_density(same, d.density_basis())).values -
           to_real(density(st.fibers[0], d.density_basis())).values)
              .abs()
              .maxCoeff() <= 1e-13);
  }

  TEST_CASE("fiber-wise certificates") {
    RunConfig cfg = toy_config(42, 60.0, 200.0);
    const Problem single = build_problem(cfg);
    const ScfStep st = scf_step(single.model, initial_density(single.model, single.disc, cfg.scf), single.disc);
    const MeanFieldHamiltonian h(single.model, st.rho_out);
    const ScfStep next = scf_step(single.model, st.rho_out, single.disc);
    const BzCertificate bz = bz_error_components(h, next.state, single.disc, 3, true);
    const Fiber& f = single.disc.fibers().front();
    const FiberCertificate direct = certify_fiber(h, next.state.fibers.front(), f.coarse, f.ref, 3);
    const BoundReport rep = make_report({direct}, {1.0}, true);
    REQUIRE(rep.bounds.size() == bz.report.bounds.size());
    for (std::size_t j = 0; j < rep.bounds.size(); ++j) {
      CHECK(rep.bounds[j].err_disc == bz.report.bounds[j].err_disc);
      CHECK(rep.bounds[j].eta_sq == bz.report.bounds[j].eta_sq);
    }
    CHECK(rep.err_scf == bz.report.err_scf);

    cfg.kgrid = {3, 1, 1};
    const Problem multi = build_problem(cfg);
    const ScfStep m1 = scf_step(multi.model, initial_density(multi.model, multi.disc, cfg.scf), multi.disc);
    const MeanFieldHamiltonian hm(multi.model, m1.rho_out);
    const ScfStep m2 = scf_step(multi.model, m1.rho_out, multi.disc);
    const BzCertificate c = bz_error_components(hm, m2.state, multi.disc, 3, true);
    for (const auto& b : c.report.bounds) {
      REQUIRE(b.available);
      double weighted = 0.0;
      for (std::size_t k = 0; k < c.fibers.size(); ++k) {
        for (const auto& v : c.fibers[k].values) {
          if (v.variant == b.variant) weighted += multi.disc.fibers()[k].weight * v.eta_sq;
        }
      }
      CHECK(std::abs(b.err_disc - weighted) <= 1e-12 * weighted);
    }
  }

  TEST_CASE("band folding") {
    const Lattice cell = Lattice::line(10.0);
    const Lattice super = supercell_lattice(cell, {2, 1, 1});
    CHECK(super.volume() == doctest::Approx(20.0));
    const double ecut = 60.0;
    const double ecut_ref = 200.0;
    const auto unit = BzDiscretization::build(cell, ecut, ecut_ref, KGrid::uniform(cell, {2, 1, 1}));
    const auto sc = BzDiscretization::build(super, ecut, ecut_ref, KGrid::gamma());
    const ModelSpec mu = linear_model(unit, random1d(42), 3);
    ModelSpec ms{super, 6,
                 {fold_to_supercell(mu.external.field, sc.density_basis(), {2, 1, 1}), mu.external.descriptor},
                 Functional::linear()};

    // The folded potential takes the same grid values.
    const GridFunction a = to_real(mu.external.field);
    const GridFunction b = to_real(ms.external.field);
    for (int j = 0; j < a.shape[0]; j += 7) {
      // x_j in the cell and the same point in the supercell.
      const int jb = j * b.shape[0] / (2 * a.shape[0]);
      if (jb * 2 * a.shape[0] != j * b.shape[0]) continue;
      CHECK(std::abs(a.values[j] - b.values[jb]) <= 1e-10);
    }

    const MeanFieldHamiltonian hu(PeriodicField(mu.external.field));
    const MeanFieldHamiltonian hs(PeriodicField(ms.external.field));
    std::vector<double> folded;
    for (const auto& f : unit.fibers()) {
      const auto ev = spectrum(hu, f.coarse);
      folded.insert(folded.end(), ev.begin(), ev.end());
    }
    std::sort(folded.begin(), folded.end());
    const auto direct = spectrum(hs, sc.fibers().front().coarse);
    REQUIRE(folded.size() == direct.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i) worst = std::max(worst, std::abs(folded[i] - direct[i]));
    CHECK(worst <= 1e-9);

    ScfConfig scf;
    const ScfHistory hu_run = run_scf(mu, unit, scf);
    const ScfHistory hs_run = run_scf(ms, sc, scf);
    REQUIRE(hu_run.converged);
    REQUIRE(hs_run.converged);
    CHECK(std::abs(hu_run.records.back().energy - 0.5 * hs_run.records.back().energy) <= 1e-9);
  }
}
