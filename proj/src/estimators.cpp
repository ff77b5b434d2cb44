#include "pwcert/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pwcert/error.hpp"

namespace pwcert {

namespace {

constexpr std::array<Variant, 7> kVariants{Variant::eta_full, Variant::eta0,       Variant::eta1,
                                           Variant::eta0_g,   Variant::eta1_g,     Variant::eta0_g_opt,
                                           Variant::eta1_g_opt};

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::eta_full: return "eta_full";
    case Variant::eta0: return "eta0";
    case Variant::eta1: return "eta1";
    case Variant::eta0_g: return "eta0_g";
    case Variant::eta1_g: return "eta1_g";
    case Variant::eta0_g_opt: return "eta0_g_opt";
    case Variant::eta1_g_opt: return "eta1_g_opt";
  }
  return "eta0";
}

Variant variant_from_string(const std::string& name) {
  for (const auto v : kVariants) {
    if (to_string(v) == name) return v;
  }
  throw InvalidArgument("unknown estimator variant '" + name + "'");
}

const std::array<Variant, 7>& all_variants() { return kVariants; }

bool is_guaranteed_kind(Variant v) { return v != Variant::eta0 && v != Variant::eta1; }

int neumann_order(Variant v) {
  switch (v) {
    case Variant::eta_full: return -1;
    case Variant::eta0:
    case Variant::eta0_g:
    case Variant::eta0_g_opt: return 0;
    default: return 1;
  }
}

// ---------------------------------------------------------------------------
// Splitting

SplitOperator::SplitOperator(const MeanFieldHamiltonian& hamiltonian, BasisPtr coarse, BasisPtr ref,
                             double shift, bool factorize_coarse)
    : hamiltonian_(&hamiltonian), mask_(coarse, ref), shift_(shift) {
  const auto& kin = ref->kinetic();
  const double mean = hamiltonian.potential_mean();
  perp_floor_ = std::numeric_limits<double>::infinity();
  perp_diag_.resize(static_cast<Eigen::Index>(kin.size()));
  for (std::size_t i = 0; i < kin.size(); ++i) {
    perp_diag_[static_cast<Eigen::Index>(i)] = kin[i] + mean + shift;
    if (!mask_.inside()[i]) perp_floor_ = std::min(perp_floor_, kin[i]);
  }
  if (std::isfinite(perp_floor_) && perp_floor_ + mean + shift <= 0.0) {
    throw NotPositiveDefinite("perpendicular block of H0 is not positive");
  }
  if (factorize_coarse) {
    coarse_matrix_ = hamiltonian.dense_matrix(coarse, shift);
    coarse_llt_.emplace(coarse_matrix_);
    if (coarse_llt_->info() != Eigen::Success) {
      throw NotPositiveDefinite("coarse block A_N is not positive definite");
    }
  }
}

Eigen::VectorXcd SplitOperator::apply_A(const Eigen::VectorXcd& f) const {
  return hamiltonian_->apply(ref(), f, shift_);
}

Eigen::VectorXcd SplitOperator::apply_W(const Eigen::VectorXcd& f) const {
  // W f = V f - Pi_N V Pi_N f - <V> Pi_N^perp f
  const Eigen::VectorXcd fn = mask_.project(f);
  const Eigen::VectorXcd fp = f - fn;
  Eigen::VectorXcd out = hamiltonian_->apply_potential(ref(), f);
  out -= mask_.project(hamiltonian_->apply_potential(ref(), fn));
  out -= potential_mean() * fp;
  return out;
}

Eigen::VectorXcd SplitOperator::apply_H0(const Eigen::VectorXcd& f) const {
  const Eigen::VectorXcd fn = mask_.project(f);
  Eigen::VectorXcd out = mask_.project(apply_A(fn));
  out += perp_diag_.cwiseProduct(f - fn);
  return out;
}

Eigen::VectorXcd SplitOperator::apply_H0_inverse(const Eigen::VectorXcd& f) const {
  Eigen::VectorXcd out = mask_.complement(f).cwiseQuotient(perp_diag_.cast<std::complex<double>>());
  const Eigen::VectorXcd fc = mask_.restrict(f);
  if (fc.cwiseAbs().maxCoeff() > 0.0) {
    if (!coarse_llt_) throw InvalidArgument("coarse block of H0 was not factorized");
    out += mask_.embed(coarse_llt_->solve(fc));
  }
  return out;
}

Eigen::MatrixXcd SplitOperator::apply_H0_inverse(const Eigen::MatrixXcd& f) const {
  Eigen::MatrixXcd out(f.rows(), f.cols());
  for (Eigen::Index j = 0; j < f.cols(); ++j) out.col(j) = apply_H0_inverse(Eigen::VectorXcd(f.col(j)));
  return out;
}

// ---------------------------------------------------------------------------
// Residuals and eta

ResidualSet residuals(const SpectralSlice& slice, const SplitOperator& split) {
  if (slice.ref->size() != split.ref()->size() || slice.coarse->size() != split.coarse()->size()) {
    throw InvalidArgument("slice and splitting use different bases");
  }
  const SpectralSlice sl = slice.shift == split.shift() ? slice : slice.shifted(split.shift());
  const int n = sl.n_el;
  ResidualSet res;
  res.shift = split.shift();
  res.eps = sl.eigenvalues.head(n);
  res.eps_next = sl.eigenvalues[n];
  res.phi = sl.vectors.leftCols(n);
  res.r.resize(res.phi.rows(), n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXcd phi = res.phi.col(i);
    Eigen::VectorXcd r = res.eps[i] * phi - split.apply_A(phi);
    res.coarse_leak = std::max(res.coarse_leak, split.mask().project(r).norm());
    res.r.col(i) = split.mask().complement(r);
  }
  if (res.coarse_leak > 1e-8) {
    throw InconsistentState(
        fmt::format("residual has a coarse component of norm {:.3e}", res.coarse_leak));
  }
  return res;
}

double gap_constant(double eps_n, double eps_next) {
  if (!(eps_n > 0.0) || !(eps_next > eps_n)) {
    throw EstimatorUnavailable(
        fmt::format("relative gap undefined (eps_N = {:.6g}, eps_N+1 = {:.6g})", eps_n, eps_next));
  }
  return 1.0 / (1.0 - eps_n / eps_next);
}

namespace {

double eta_formula(const ResidualSet& res, const Eigen::MatrixXcd& x, double c_n) {
  const double eps_n = res.eps[res.n_el() - 1];
  double rx = 0.0;
  double xx = 0.0;
  for (int i = 0; i < res.n_el(); ++i) {
    rx += std::real(res.r.col(i).dot(x.col(i)));
    xx += x.col(i).squaredNorm();
  }
  return rx + 4.0 * eps_n * c_n * c_n * xx;
}

Eigen::VectorXcd pcg(const SplitOperator& split, const Eigen::VectorXcd& b, const SolveOptions& opt) {
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) return x;
  Eigen::VectorXcd r = b;
  Eigen::VectorXcd z = split.apply_H0_inverse(r);
  Eigen::VectorXcd p = z;
  std::complex<double> rz = r.dot(z);
  for (int it = 0; it < opt.cg_max_iter; ++it) {
    const Eigen::VectorXcd ap = split.apply_A(p);
    const std::complex<double> pap = p.dot(ap);
    if (std::real(pap) <= 0.0) throw NotPositiveDefinite("A is not positive definite");
    const std::complex<double> alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    if (r.norm() <= opt.cg_tol * bnorm) return x;
    z = split.apply_H0_inverse(r);
    const std::complex<double> rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw NonConvergence("preconditioned CG did not reach the requested tolerance");
}

}  // namespace

EtaResult eta_full(const ResidualSet& res, const SplitOperator& split, const SolveOptions& options) {
  EtaResult out;
  const int n = res.n_el();
  out.c_n = gap_constant(res.eps[n - 1], res.eps_next);
  if (split.ref()->size() <= options.dense_limit) {
    const Eigen::MatrixXcd a = split.hamiltonian().dense_matrix(split.ref(), split.shift());
    Eigen::LLT<Eigen::MatrixXcd> llt(a);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("A is not positive definite");
    out.chi = llt.solve(res.r);
  } else {
    out.chi.resize(res.r.rows(), n);
    for (int i = 0; i < n; ++i) out.chi.col(i) = pcg(split, res.r.col(i), options);
  }
  out.eta_sq = eta_formula(res, out.chi, out.c_n);
  return out;
}

EtaResult eta_truncated(const ResidualSet& res, const SplitOperator& split, int order) {
  if (order < 0) throw InvalidArgument("Neumann order must be nonnegative");
  EtaResult out;
  const int n = res.n_el();
  out.c_n = gap_constant(res.eps[n - 1], res.eps_next);
  Eigen::MatrixXcd term = split.apply_H0_inverse(res.r);
  out.h0inv_r_norms = term.colwise().norm().transpose();
  out.chi = term;
  for (int k = 1; k <= order; ++k) {
    for (int i = 0; i < n; ++i) {
      term.col(i) = -split.apply_H0_inverse(split.apply_W(term.col(i)));
    }
    out.chi += term;
  }
  out.eta_sq = eta_formula(res, out.chi, out.c_n);
  return out;
}

// ---------------------------------------------------------------------------
// Operator norm and remainders

namespace {

struct OpnormInputs {
  Eigen::MatrixXcd gram;  // R^* R before scaling
  Eigen::VectorXd eps;    // at shift `shift`
  double eps_next;
  double shift;
  double v_sup;
  double v_fluct;
  double v_mean;
  double perp_floor;
};

OpnormInputs opnorm_inputs(const ResidualSet& res, const SplitOperator& split) {
  const auto& h = split.hamiltonian();
  return {res.r.adjoint() * res.r, res.eps,           res.eps_next,         res.shift,
          h.potential_sup(),       h.fluctuation_sup(), h.potential_mean(), split.perp_kinetic_floor()};
}

std::optional<double> opnorm_at(const OpnormInputs& in, double shift, bool use_next) {
  const double ds = shift - in.shift;
  const Eigen::VectorXd eps = in.eps.array() + ds;
  if (eps.minCoeff() <= 0.0) return std::nullopt;
  const Eigen::VectorXd inv = eps.cwiseInverse();
  const Eigen::MatrixXcd m = inv.asDiagonal() * in.gram * inv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  const double r_term = std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
  const double denom = use_next ? in.eps_next + ds : eps[eps.size() - 1];
  if (denom <= 0.0) return std::nullopt;
  double q = r_term + in.v_sup / denom;
  if (std::isfinite(in.perp_floor)) {
    const double pd = in.perp_floor + in.v_mean + shift;
    if (pd <= 0.0) return std::nullopt;
    q += (in.v_fluct + in.v_sup) / pd;
  }
  return q;
}

}  // namespace

std::optional<double> opnorm_bound(const ResidualSet& res, const SplitOperator& split,
                                   bool use_next_eigenvalue) {
  return opnorm_at(opnorm_inputs(res, split), split.shift(), use_next_eigenvalue);
}

Eigen::VectorXd neumann_remainder(const Eigen::VectorXd& h0inv_r_norms, int order, double q) {
  if (!(q < 1.0) || q < 0.0) {
    throw EstimatorUnavailable(fmt::format("operator norm bound {:.4g} is not below 1", q));
  }
  return h0inv_r_norms * (std::pow(q, order + 1) / (1.0 - q));
}

double eta_guaranteed(const EtaResult& truncated, const ResidualSet& res, int order, double q) {
  const Eigen::VectorXd e = neumann_remainder(truncated.h0inv_r_norms, order, q);
  const double eps_n = res.eps[res.n_el() - 1];
  const double c2 = truncated.c_n * truncated.c_n;
  double extra = 0.0;
  for (int i = 0; i < res.n_el(); ++i) {
    const double chi_norm = truncated.chi.col(i).norm();
    extra += res.r.col(i).norm() * e[i] + 4.0 * eps_n * c2 * (2.0 * e[i] * chi_norm + e[i] * e[i]);
  }
  return truncated.eta_sq + extra;
}

// ---------------------------------------------------------------------------
// Energy error components

namespace {

long double mu_extended(const Eigen::VectorXd& shifted, double eta_sq, double shift) {
  long double sum = 0.0L;
  for (Eigen::Index i = 0; i < shifted.size(); ++i) sum += static_cast<long double>(shifted[i]);
  return (sum - static_cast<long double>(eta_sq)) / static_cast<long double>(shifted.size()) -
         static_cast<long double>(shift);
}

/// Lower bound of V_tot(x): <V_tot> - |Omega|^{-1/2} sum_{G != 0} |V_G|.
double potential_floor(const MeanFieldHamiltonian& h) {
  const PeriodicField& v = h.total_potential();
  const auto& miller = v.basis()->miller();
  double spread = 0.0;
  for (std::size_t i = 0; i < miller.size(); ++i) {
    if (miller[i] != Miller{0, 0, 0}) spread += std::abs(v.coefficients()[static_cast<Eigen::Index>(i)]);
  }
  return h.potential_mean() - spread / std::sqrt(v.basis()->lattice().volume());
}

}  // namespace

double mu_lower_bound(const Eigen::VectorXd& shifted_eigenvalues, double eta_sq, double shift) {
  return static_cast<double>(mu_extended(shifted_eigenvalues, eta_sq, shift));
}

ErrorComponents error_components(double trace_h_gamma_m, const Eigen::VectorXd& lambda_next,
                                 double eta_sq, double shift) {
  // Shift added in extended precision so that it cancels in err_disc.
  const auto n = static_cast<long double>(lambda_next.size());
  const auto s = static_cast<long double>(shift);
  long double sum = 0.0L;
  long double shifted = 0.0L;
  for (Eigen::Index i = 0; i < lambda_next.size(); ++i) {
    sum += static_cast<long double>(lambda_next[i]);
    shifted += static_cast<long double>(lambda_next[i]) + s;
  }
  const long double mu = (shifted - static_cast<long double>(eta_sq)) / n - s;
  ErrorComponents out;
  out.mu_lb = static_cast<double>(mu);
  out.err_disc = static_cast<double>(sum - n * mu);
  out.err_scf = static_cast<double>(static_cast<long double>(trace_h_gamma_m) - sum);
  const double tol = 1e-12 * std::max(1.0, lambda_next.cwiseAbs().sum());
  if (out.err_disc < -tol || out.err_scf < -tol) {
    throw InconsistentState(fmt::format("negative error component (disc {:.3e}, scf {:.3e})",
                                        out.err_disc, out.err_scf));
  }
  out.err_disc = std::max(out.err_disc, 0.0);
  out.err_scf = std::max(out.err_scf, 0.0);
  return out;
}

// ---------------------------------------------------------------------------
// Shift search

ShiftSearch optimize_shift(const std::function<ShiftTrial(double)>& evaluate, double lower,
                           const std::vector<double>& candidates) {
  ShiftSearch best;
  best.eta_sq = std::numeric_limits<double>::infinity();
  int evals = 0;
  auto trial = [&](double s) {
    ++evals;
    ShiftTrial t = evaluate(s);
    const bool ok = t.admissible && t.q < 1.0 && std::isfinite(t.eta_sq);
    if (ok && t.eta_sq < best.eta_sq) {
      best.shift = s;
      best.eta_sq = t.eta_sq;
      best.q = t.q;
    }
    return ok ? t.eta_sq : std::numeric_limits<double>::infinity();
  };

  // Find an admissible shift above `lower`.
  double step = std::max(1.0, std::abs(lower) * 1e-3);
  double hi = lower + step;
  bool found = false;
  for (int k = 0; k < 80 && !found; ++k) {
    if (std::isfinite(trial(hi))) {
      found = true;
    } else {
      step *= 2.0;
      hi = lower + step;
    }
  }
  for (double c : candidates) {
    if (c > lower) trial(c);
  }
  if (!found && !std::isfinite(best.eta_sq)) {
    throw EstimatorUnavailable("no shift satisfies the operator norm condition");
  }
  if (!found) hi = best.shift;

  // Boundary of the admissible set.
  double lo = lower;
  for (int k = 0; k < 100 && hi - lo > 1e-12 * (1.0 + std::abs(hi)); ++k) {
    const double mid = 0.5 * (lo + hi);
    if (std::isfinite(trial(mid))) hi = mid; else lo = mid;
  }
  const double boundary = lo;

  // Expand the upper end until eta_sq starts increasing.
  double t_hi = std::max(hi - boundary, 1e-6);
  double f_prev = trial(boundary + t_hi);
  for (int k = 0; k < 60; ++k) {
    const double f_next = trial(boundary + 2.0 * t_hi);
    t_hi *= 2.0;
    if (!(f_next < f_prev)) break;
    f_prev = f_next;
  }

  // Golden section in u = log(s - boundary).
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(t_hi * 1e-12);
  double b = std::log(t_hi);
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = trial(boundary + std::exp(x1));
  double f2 = trial(boundary + std::exp(x2));
  while (b - a > 1e-3) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = trial(boundary + std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = trial(boundary + std::exp(x2));
    }
  }
  best.evaluations = evals;
  return best;
}

// ---------------------------------------------------------------------------
// Per-fiber certification

double FiberCertificate::sum_lambda_next() const { return next.eigenvalues.head(next.n_el).sum() - next.n_el * next.shift; }

double default_shift(const SpectralSlice& slice) {
  const double eps1 = slice.eigenvalues[0] - slice.shift;
  return std::max(0.0, 0.1 - eps1);
}

double trace_hamiltonian(const MeanFieldHamiltonian& hamiltonian, const OrbitalSet& gamma) {
  double t = 0.0;
  for (int i = 0; i < gamma.count(); ++i) {
    const Eigen::VectorXcd phi = gamma.coefficients().col(i);
    t += std::real(phi.dot(hamiltonian.apply(gamma.basis(), phi)));
  }
  return t;
}

namespace {

struct GuaranteedAt {
  double eta_sq;
  double q;
};

GuaranteedAt guaranteed_at(const MeanFieldHamiltonian& h, const SpectralSlice& next, int order,
                           double shift, const CertifyOptions& opt) {
  const SplitOperator split(h, next.coarse, next.ref, shift, order >= 1);
  const ResidualSet res = residuals(next, split);
  const auto q = opnorm_bound(res, split, opt.opnorm_use_next_eigenvalue);
  if (!q) throw EstimatorUnavailable("operator norm bound undefined at this shift");
  const EtaResult tr = eta_truncated(res, split, order);
  return {eta_guaranteed(tr, res, order, *q), *q};
}

// Shift where the operator norm bound first drops to q_target, starting from s0.
double target_shift(const MeanFieldHamiltonian& h, const SpectralSlice& next, double s0,
                    const CertifyOptions& opt) {
  const SplitOperator split(h, next.coarse, next.ref, s0, false);
  const ResidualSet res = residuals(next, split);
  const OpnormInputs in = opnorm_inputs(res, split);
  auto below = [&](double s) {
    const auto q = opnorm_at(in, s, opt.opnorm_use_next_eigenvalue);
    return q && *q <= opt.q_target;
  };
  if (below(s0)) return s0;
  double lo = s0;
  double step = 1.0;
  double hi = s0 + step;
  int k = 0;
  while (!below(hi)) {
    if (++k > 80) throw EstimatorUnavailable("operator norm bound never reaches the target");
    lo = hi;
    step *= 2.0;
    hi = s0 + step;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-10 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (below(mid)) hi = mid; else lo = mid;
  }
  return hi;
}

}  // namespace

VariantValue evaluate_variant(const MeanFieldHamiltonian& hamiltonian, const SpectralSlice& next,
                              Variant variant, const CertifyOptions& options) {
  VariantValue out;
  out.variant = variant;
  const SpectralSlice base = next.shift == 0.0 ? next : next.shifted(0.0);
  const double s0 = default_shift(base);
  try {
    switch (variant) {
      case Variant::eta_full: {
        const bool big = base.ref->size() > options.solve.dense_limit;
        auto at = [&](double s) {
          const SplitOperator split(hamiltonian, base.coarse, base.ref, s, big);
          out.eta_sq = eta_full(residuals(base, split), split, options.solve).eta_sq;
          out.shift = s;
        };
        try {
          at(s0);
        } catch (const NotPositiveDefinite&) {
          // The reference spectrum reaches further down than eps_1 - 0.1.
          const double s1 = std::max(s0, 0.1 - potential_floor(hamiltonian));
          if (!(s1 > s0)) throw;
          at(s1);
        }
        break;
      }
      case Variant::eta0:
      case Variant::eta1: {
        const int order = neumann_order(variant);
        const SplitOperator split(hamiltonian, base.coarse, base.ref, s0, order >= 1);
        const ResidualSet res = residuals(base, split);
        out.eta_sq = eta_truncated(res, split, order).eta_sq;
        out.shift = s0;
        break;
      }
      case Variant::eta0_g:
      case Variant::eta1_g: {
        const int order = neumann_order(variant);
        const double sg = target_shift(hamiltonian, base, s0, options);
        const GuaranteedAt g = guaranteed_at(hamiltonian, base, order, sg, options);
        out.eta_sq = g.eta_sq;
        out.shift = sg;
        out.opnorm = g.q;
        break;
      }
      case Variant::eta0_g_opt:
      case Variant::eta1_g_opt: {
        const int order = neumann_order(variant);
        std::vector<double> candidates;
        try {
          candidates.push_back(target_shift(hamiltonian, base, s0, options));
        } catch (const EstimatorUnavailable&) {
        }
        const double eps1 = base.eigenvalues[0];
        double lower = -eps1;
        {
          const SplitOperator probe(hamiltonian, base.coarse, base.ref, s0, false);
          if (std::isfinite(probe.perp_kinetic_floor())) {
            lower = std::max(lower, -(probe.perp_kinetic_floor() + probe.potential_mean()));
          }
        }
        auto evaluate = [&](double s) {
          ShiftTrial t;
          try {
            const GuaranteedAt g = guaranteed_at(hamiltonian, base, order, s, options);
            t.admissible = true;
            t.q = g.q;
            t.eta_sq = g.eta_sq;
          } catch (const Error&) {
            t.admissible = false;
          }
          return t;
        };
        const ShiftSearch found = optimize_shift(evaluate, lower, candidates);
        out.eta_sq = found.eta_sq;
        out.shift = found.shift;
        out.opnorm = found.q;
        break;
      }
    }
    out.available = true;
  } catch (const Error& e) {
    out.available = false;
    out.note = e.what();
  }
  return out;
}

FiberCertificate certify_fiber(const MeanFieldHamiltonian& hamiltonian, const OrbitalSet& gamma_m,
                               const BasisPtr& coarse, const BasisPtr& ref, int n_el,
                               const CertifyOptions& options) {
  FiberCertificate cert;
  DiagonalizeOptions dopt;
  dopt.count = n_el + 1;
  dopt.gap_tol = options.gap_tol;
  cert.next = diagonalize_projected(hamiltonian, coarse, ref, n_el, 0.0, dopt);
  cert.trace_h_gamma = trace_hamiltonian(hamiltonian, gamma_m);
  for (const auto v : options.variants) {
    cert.values.push_back(evaluate_variant(hamiltonian, cert.next, v, options));
  }
  return cert;
}

const VariantBound* BoundReport::find(Variant v) const {
  for (const auto& b : bounds) {
    if (b.variant == v) return &b;
  }
  return nullptr;
}

BoundReport make_report(const std::vector<FiberCertificate>& fibers,
                        const std::vector<double>& weights, bool convex) {
  if (fibers.empty() || fibers.size() != weights.size()) {
    throw InvalidArgument("one weight per fiber certificate required");
  }
  BoundReport report;
  const std::size_t nv = fibers.front().values.size();
  for (const auto& f : fibers) {
    if (f.values.size() != nv) throw InvalidArgument("fibers evaluated different variants");
  }
  for (std::size_t j = 0; j < nv; ++j) {
    VariantBound b;
    b.variant = fibers.front().values[j].variant;
    b.shift = fibers.front().values[j].shift;
    b.available = true;
    for (std::size_t k = 0; k < fibers.size(); ++k) {
      const VariantValue& v = fibers[k].values[j];
      if (!v.available) {
        b.available = false;
        b.note = v.note;
        continue;
      }
      if (v.opnorm) b.opnorm = std::max(b.opnorm.value_or(0.0), *v.opnorm);
      if (!b.available) continue;
      const SpectralSlice& next = fibers[k].next;
      const Eigen::VectorXd lambda = next.eigenvalues.head(next.n_el).array() - next.shift;
      const ErrorComponents ec = error_components(fibers[k].trace_h_gamma, lambda, v.eta_sq, v.shift);
      b.eta_sq += weights[k] * v.eta_sq;
      b.err_disc += weights[k] * ec.err_disc;
      b.err_scf += weights[k] * ec.err_scf;
      b.mu_lb += weights[k] * ec.mu_lb;
    }
    if (!b.available) {
      b.eta_sq = b.err_disc = b.err_scf = b.mu_lb = 0.0;
    }
    b.guaranteed = b.available && convex && is_guaranteed_kind(b.variant);
    report.bounds.push_back(std::move(b));
  }
  double scf = 0.0;
  for (std::size_t k = 0; k < fibers.size(); ++k) {
    const SpectralSlice& next = fibers[k].next;
    const Eigen::VectorXd lambda = next.eigenvalues.head(next.n_el).array() - next.shift;
    scf += weights[k] * error_components(fibers[k].trace_h_gamma, lambda, 0.0, 0.0).err_scf;
  }
  report.err_scf = scf;
  return report;
}

}  // namespace pwcert
