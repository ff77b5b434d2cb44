#include <cmath>

#include "doctest.h"
#include "pwcert/linear_solver.hpp"
#include "support.hpp"

using namespace pwtest;

TEST_SUITE("scf") {
  TEST_CASE("linear model") {
    RunConfig cfg = toy_config(42, 60.0, 200.0);
    cfg.functional = Functional::linear();
    const Problem p = build_problem(cfg);
    const ScfHistory h = run_scf(p.model, p.disc, cfg.scf);
    CHECK(h.converged);
    CHECK(h.records.size() == 1);

    // One step from any input density gives the same state.
    const PeriodicField a = initial_density(p.model, p.disc, cfg.scf);
    ScfConfig rnd = cfg.scf;
    rnd.guess = ScfConfig::Guess::random;
    rnd.guess_seed = 5;
    const PeriodicField b = initial_density(p.model, p.disc, rnd);
    CHECK((a - b).norm() > 1e-3);
    const ScfStep sa = scf_step(p.model, a, p.disc);
    const ScfStep sb = scf_step(p.model, b, p.disc);
    CHECK((sa.rho_out - sb.rho_out).norm() == 0.0);
    CHECK((sa.state.fibers[0].eigenvalues() - sb.state.fibers[0].eigenvalues()).norm() == 0.0);
  }

  TEST_CASE("initial densities integrate to N_el") {
    RunConfig cfg = toy_config(42, 60.0, 200.0);
    const Problem p = build_problem(cfg);
    for (auto g : {ScfConfig::Guess::constant, ScfConfig::Guess::random}) {
      cfg.scf.guess = g;
      const PeriodicField r = initial_density(p.model, p.disc, cfg.scf);
      CHECK(integrate_real(to_real(r), p.model.lattice) == doctest::Approx(3.0).epsilon(1e-12));
      CHECK(r.is_real());
    }
  }

  TEST_CASE("fixed point and determinism") {
    RunConfig cfg = toy_config(42, 400.0, 1000.0);
    const Problem p = build_problem(cfg);
    const ScfHistory a = run_scf(p.model, p.disc, cfg.scf);
    const ScfHistory b = run_scf(p.model, p.disc, cfg.scf);
    REQUIRE(a.converged);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t m = 0; m < a.records.size(); ++m) {
      CHECK(a.records[m].energy == b.records[m].energy);
      CHECK((a.records[m].rho.coefficients() - b.records[m].rho.coefficients()).norm() == 0.0);
    }
    const PeriodicField& rho = a.records.back().rho;
    const ScfStep s = scf_step(p.model, rho, p.disc);
    CHECK((s.rho_out - rho).norm() < 10.0 * cfg.scf.density_tol);

    // Longer budget, same iterates.
    ScfConfig longer = cfg.scf;
    longer.max_iter = 2 * cfg.scf.max_iter;
    const ScfHistory c = run_scf(p.model, p.disc, longer);
    REQUIRE(c.records.size() == a.records.size());
    for (std::size_t m = 0; m < a.records.size(); ++m) CHECK(c.records[m].energy == a.records[m].energy);

    // Truncated budget reproduces the prefix and reports non-convergence.
    ScfConfig shorter = cfg.scf;
    shorter.max_iter = 5;
    const ScfHistory d = run_scf(p.model, p.disc, shorter);
    CHECK_FALSE(d.converged);
    CHECK(d.records.size() == 5);
    CHECK_FALSE(d.warnings.empty());
    for (std::size_t m = 0; m < d.records.size(); ++m) CHECK(d.records[m].energy == a.records[m].energy);
  }

  TEST_CASE("damped mixing converges the toy") {
    RunConfig cfg = toy_config(42, 400.0, 1000.0);
    cfg.scf.mixing = ScfConfig::Mixing::damped;
    cfg.scf.beta = 0.3;
    const Problem p = build_problem(cfg);
    const ScfHistory h = run_scf(p.model, p.disc, cfg.scf);
    CHECK(h.converged);
    CHECK(h.records.size() <= static_cast<std::size_t>(cfg.scf.max_iter));
  }

  TEST_CASE("Aufbau optimality of the inner step") {
    RunConfig cfg = toy_config(42, 60.0, 200.0);
    const Problem p = build_problem(cfg);
    const PeriodicField rho = scf_step(p.model, initial_density(p.model, p.disc, cfg.scf), p.disc).rho_out;
    const MeanFieldHamiltonian h(p.model, rho);
    const Fiber& f = p.disc.fibers().front();
    DiagonalizeOptions o;
    o.count = 10;
    const SpectralSlice s = diagonalize_projected(h, f.coarse, f.ref, 3, 0.0, o);
    const double best = trace_hamiltonian(h, s.occupied());
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<int> idx{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
      std::shuffle(idx.begin(), idx.end(), rng);
      std::sort(idx.begin(), idx.begin() + 3);
      Eigen::MatrixXcd c(s.vectors.rows(), 3);
      Eigen::VectorXd ev(3);
      for (int j = 0; j < 3; ++j) {
        c.col(j) = s.vectors.col(idx[j]);
        ev[j] = s.eigenvalues[idx[j]];
      }
      const OrbitalSet other(f.ref, f.coarse, c, ev);
      CHECK(trace_hamiltonian(h, other) >= best - 1e-12);
    }
  }

  TEST_CASE("configuration validation") {
    ScfConfig c;
    c.beta = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.beta = 1.0;
    c.anderson_depth = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    CHECK(mixing_from_string(to_string(ScfConfig::Mixing::anderson)) == ScfConfig::Mixing::anderson);
    CHECK(guess_from_string(to_string(ScfConfig::Guess::random)) == ScfConfig::Guess::random);
  }
}
