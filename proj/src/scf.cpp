#include "pwcert/scf.hpp"

#include <cmath>
#include <deque>
#include <random>

#include <fmt/format.h>

#include "pwcert/error.hpp"

namespace pwcert {

void ScfConfig::validate() const {
  if (!(density_tol > 0.0)) throw InvalidArgument("density_tol must be positive");
  if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
  if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in (0, 1]");
  if (anderson_depth < 1) throw InvalidArgument("anderson_depth must be at least 1");
  if (!(gap_tol >= 0.0)) throw InvalidArgument("gap_tol must be nonnegative");
}

std::string to_string(ScfConfig::Mixing m) {
  return m == ScfConfig::Mixing::damped ? "damped" : "anderson";
}

std::string to_string(ScfConfig::Guess g) {
  return g == ScfConfig::Guess::constant ? "constant" : "random";
}

ScfConfig::Mixing mixing_from_string(const std::string& name) {
  if (name == "damped") return ScfConfig::Mixing::damped;
  if (name == "anderson") return ScfConfig::Mixing::anderson;
  throw InvalidArgument("unknown mixing '" + name + "'");
}

ScfConfig::Guess guess_from_string(const std::string& name) {
  if (name == "constant") return ScfConfig::Guess::constant;
  if (name == "random") return ScfConfig::Guess::random;
  throw InvalidArgument("unknown initial guess '" + name + "'");
}

ScfStep scf_step(const ModelSpec& model, const PeriodicField& rho_in, const BzDiscretization& disc,
                 double gap_tol) {
  const MeanFieldHamiltonian h(model, rho_in);
  DiagonalizeOptions opt;
  opt.count = model.n_el + 1;
  opt.gap_tol = gap_tol;
  ScfStep step{{}, PeriodicField::zeros(disc.density_basis())};
  for (const auto& fb : disc.fibers()) {
    step.state.fibers.push_back(
        diagonalize_projected(h, fb.coarse, fb.ref, model.n_el, 0.0, opt).occupied());
    step.state.weights.push_back(fb.weight);
  }
  step.rho_out = bz_density(step.state, disc.density_basis());
  return step;
}

PeriodicField initial_density(const ModelSpec& model, const BzDiscretization& disc,
                              const ScfConfig& cfg) {
  const auto& db = disc.density_basis();
  if (cfg.guess == ScfConfig::Guess::constant) {
    PeriodicField rho = PeriodicField::zeros(db);
    rho.coefficients()[db->index_of({0, 0, 0})] =
        static_cast<double>(model.n_el) / std::sqrt(db->lattice().volume());
    return rho;
  }
  // Random orthonormal orbitals in each coarse sphere.
  std::mt19937_64 rng(cfg.guess_seed);
  std::normal_distribution<double> normal;
  BlochState state;
  for (const auto& fb : disc.fibers()) {
    const auto n = static_cast<Eigen::Index>(fb.coarse->size());
    if (n < model.n_el) throw InvalidArgument("coarse basis smaller than the number of electrons");
    Eigen::MatrixXcd c(n, model.n_el);
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      for (Eigen::Index i = 0; i < n; ++i) c(i, j) = {normal(rng), normal(rng)};
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(c);
    const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, model.n_el);
    const SubspaceMask mask(fb.coarse, fb.ref);
    Eigen::MatrixXcd emb(static_cast<Eigen::Index>(fb.ref->size()), model.n_el);
    for (int j = 0; j < model.n_el; ++j) emb.col(j) = mask.embed(q.col(j));
    state.fibers.emplace_back(fb.ref, fb.coarse, std::move(emb), Eigen::VectorXd::Zero(model.n_el));
    state.weights.push_back(fb.weight);
  }
  return bz_density(state, db);
}

namespace {

/// Anderson acceleration on the density residual f = rho_out - rho_in.
class AndersonMixer {
 public:
  AndersonMixer(int depth, double beta) : depth_(depth), beta_(beta) {}

  Eigen::VectorXcd next(const Eigen::VectorXcd& x, const Eigen::VectorXcd& f) {
    if (prev_x_) {
      dx_.push_back(x - *prev_x_);
      df_.push_back(f - *prev_f_);
      if (static_cast<int>(dx_.size()) > depth_) {
        dx_.pop_front();
        df_.pop_front();
      }
    }
    prev_x_ = x;
    prev_f_ = f;
    Eigen::VectorXcd out = x + beta_ * f;
    if (dx_.empty()) return out;

    const auto n = f.size();
    const auto k = static_cast<Eigen::Index>(df_.size());
    // Real least squares: stack real and imaginary parts.
    Eigen::MatrixXd a(2 * n, k);
    Eigen::VectorXd b(2 * n);
    for (Eigen::Index j = 0; j < k; ++j) {
      a.col(j).head(n) = df_[static_cast<std::size_t>(j)].real();
      a.col(j).tail(n) = df_[static_cast<std::size_t>(j)].imag();
    }
    b.head(n) = f.real();
    b.tail(n) = f.imag();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
    const double cond = diag.maxCoeff() / std::max(diag.minCoeff(), 1e-300);
    if (!(cond <= 1e12)) {
      ++restarts_;
      dx_.clear();
      df_.clear();
      return out;
    }
    const Eigen::VectorXd g = qr.solve(b);
    for (Eigen::Index j = 0; j < k; ++j) {
      out -= g[j] * (dx_[static_cast<std::size_t>(j)] + beta_ * df_[static_cast<std::size_t>(j)]);
    }
    return out;
  }

  int restarts() const { return restarts_; }

 private:
  int depth_;
  double beta_;
  std::optional<Eigen::VectorXcd> prev_x_;
  std::optional<Eigen::VectorXcd> prev_f_;
  std::deque<Eigen::VectorXcd> dx_;
  std::deque<Eigen::VectorXcd> df_;
  int restarts_ = 0;
};

}  // namespace

ScfHistory run_scf(const ModelSpec& model, const BzDiscretization& disc, const ScfConfig& cfg,
                   const ScfHook& hook) {
  cfg.validate();
  if (model.density_basis()->miller() != disc.density_basis()->miller() ||
      model.density_basis()->grid() != disc.grid()) {
    throw InvalidArgument("model potential and discretization use different density spheres");
  }
  ScfHistory hist;
  PeriodicField rho_in = initial_density(model, disc, cfg);
  AndersonMixer anderson(cfg.anderson_depth, cfg.beta);

  for (int m = 1; m <= cfg.max_iter; ++m) {
    ScfStep step = scf_step(model, rho_in, disc, cfg.gap_tol);
    const double energy = bz_total_energy(model, step.state, step.rho_out);
    // Without a density functional H does not depend on rho: the first
    // diagonalization is already self-consistent.
    const double residual = model.functional.kind == Functional::Kind::linear
                                ? 0.0
                                : (step.rho_out - rho_in).norm();
    ScfRecord rec{m, std::move(step.state), std::move(step.rho_out), energy, residual, std::nullopt};
    if (hook) rec.bounds = hook(rec);
    hist.final_residual = rec.residual;
    hist.records.push_back(std::move(rec));
    const PeriodicField& rho_out = hist.records.back().rho;
    if (hist.final_residual < cfg.density_tol) {
      hist.converged = true;
      break;
    }
    if (cfg.mixing == ScfConfig::Mixing::damped) {
      rho_in.coefficients() += cfg.beta * (rho_out.coefficients() - rho_in.coefficients());
    } else {
      rho_in.coefficients() =
          anderson.next(rho_in.coefficients(), rho_out.coefficients() - rho_in.coefficients());
    }
  }
  if (anderson.restarts() > 0) {
    hist.warnings.push_back(fmt::format("Anderson history restarted {} times", anderson.restarts()));
  }
  if (!hist.converged) {
    hist.warnings.push_back(fmt::format("SCF not converged after {} iterations (residual {:.3e})",
                                        cfg.max_iter, hist.final_residual));
  }
  return hist;
}

ScfHook bound_hook(const ModelSpec& model, const BzDiscretization& disc,
                   const CertifyOptions& options) {
  return [&model, &disc, options](const ScfRecord& rec) -> std::optional<BoundReport> {
    const MeanFieldHamiltonian h(model, rec.rho);
    return bz_error_components(h, rec.state, disc, model.n_el, model.convex(), options).report;
  };
}

}  // namespace pwcert
