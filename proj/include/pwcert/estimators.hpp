#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pwcert/linear_solver.hpp"
#include "pwcert/model.hpp"

namespace pwcert {

enum class Variant { eta_full, eta0, eta1, eta0_g, eta1_g, eta0_g_opt, eta1_g_opt };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);
const std::array<Variant, 7>& all_variants();
/// Variants that dominate eta^2 mathematically (given convexity and q < 1).
bool is_guaranteed_kind(Variant v);
/// Neumann order L of a truncated variant, -1 for eta_full.
int neumann_order(Variant v);

/// A = H + s split as H0 + W with respect to V_N (coarse) inside the
/// reference space:
///
///   H0 = Pi_N A Pi_N  +  Pi_N^perp (-Delta/2 + <V_tot> + s) Pi_N^perp,
///   W  = Pi_N^perp V Pi_N + Pi_N V Pi_N^perp + Pi_N^perp (V - <V_tot>) Pi_N^perp.
///
/// The coarse block is factorized only on request; without it H0^{-1} can
/// only be applied to vectors supported in V_N^perp.
class SplitOperator {
 public:
  SplitOperator(const MeanFieldHamiltonian& hamiltonian, BasisPtr coarse, BasisPtr ref,
                double shift, bool factorize_coarse = true);

  const MeanFieldHamiltonian& hamiltonian() const { return *hamiltonian_; }
  const SubspaceMask& mask() const { return mask_; }
  const BasisPtr& coarse() const { return mask_.sub(); }
  const BasisPtr& ref() const { return mask_.super(); }
  double shift() const { return shift_; }
  /// <V_tot> (without the shift).
  double potential_mean() const { return hamiltonian_->potential_mean(); }
  /// Smallest |G+k|^2/2 over the reference modes outside V_N (+inf if none).
  double perp_kinetic_floor() const { return perp_floor_; }
  /// |G+k|^2/2 + <V_tot> + s on every reference mode.
  const Eigen::VectorXd& perp_diagonal() const { return perp_diag_; }
  bool has_coarse_factorization() const { return coarse_llt_.has_value(); }

  Eigen::VectorXcd apply_A(const Eigen::VectorXcd& f) const;
  Eigen::VectorXcd apply_W(const Eigen::VectorXcd& f) const;
  Eigen::VectorXcd apply_H0(const Eigen::VectorXcd& f) const;
  Eigen::VectorXcd apply_H0_inverse(const Eigen::VectorXcd& f) const;
  Eigen::MatrixXcd apply_H0_inverse(const Eigen::MatrixXcd& f) const;

 private:
  const MeanFieldHamiltonian* hamiltonian_;
  SubspaceMask mask_;
  double shift_;
  double perp_floor_;
  Eigen::VectorXd perp_diag_;
  Eigen::MatrixXcd coarse_matrix_;
  std::optional<Eigen::LLT<Eigen::MatrixXcd>> coarse_llt_;
};

/// r_i = eps_i phi_i - A phi_i in the reference basis, eps_i shifted.
struct ResidualSet {
  Eigen::MatrixXcd r;
  Eigen::MatrixXcd phi;
  Eigen::VectorXd eps;
  /// Shifted eps_{N_el+1,N}, used as the lower bound of the next exact eigenvalue.
  double eps_next = 0.0;
  double shift = 0.0;
  /// Largest coarse-space residual norm found before zeroing it.
  double coarse_leak = 0.0;

  int n_el() const { return static_cast<int>(eps.size()); }
  Eigen::VectorXd norms() const { return r.colwise().norm().transpose(); }
};

/// Throws InconsistentState when the coarse part of a residual exceeds 1e-8.
ResidualSet residuals(const SpectralSlice& slice, const SplitOperator& split);

/// c_N = (1 - eps_N / eps_next)^{-1}; throws EstimatorUnavailable unless
/// 0 < eps_N < eps_next.
double gap_constant(double eps_n, double eps_next);

/// Per-orbital data of an eta evaluation.
struct EtaResult {
  double eta_sq = 0.0;
  double c_n = 0.0;
  /// Approximations chi_i of A^{-1} r_i (exact for eta_full).
  Eigen::MatrixXcd chi;
  /// ||H0^{-1} r_i|| (empty for eta_full).
  Eigen::VectorXd h0inv_r_norms;
};

struct SolveOptions {
  /// Reference sizes up to this use a dense Cholesky factorization.
  std::size_t dense_limit = 4096;
  double cg_tol = 1e-12;
  int cg_max_iter = 2000;
};

/// sum <r_i, x_i> + 4 eps_N c_N^2 sum ||x_i||^2 with x_i = A^{-1} r_i.
EtaResult eta_full(const ResidualSet& res, const SplitOperator& split, const SolveOptions& options = {});
/// Same formula with x_i replaced by the Neumann partial sum of order L.
EtaResult eta_truncated(const ResidualSet& res, const SplitOperator& split, int order);

/// Upper bound of ||H0^{-1} W||; nullopt when a denominator is not positive.
/// With use_next_eigenvalue the coarse term divides by eps_{N_el+1,N}.
std::optional<double> opnorm_bound(const ResidualSet& res, const SplitOperator& split,
                                   bool use_next_eigenvalue = false);

/// e~_i = q^{L+1} ||H0^{-1} r_i|| / (1 - q); throws EstimatorUnavailable when q >= 1.
Eigen::VectorXd neumann_remainder(const Eigen::VectorXd& h0inv_r_norms, int order, double q);

/// eta_L^2 + sum_i [ ||r_i|| e~_i + 4 eps_N c_N^2 (2 e~_i ||chi_i|| + e~_i^2) ].
double eta_guaranteed(const EtaResult& truncated, const ResidualSet& res, int order, double q);

/// mu = (sum eps_i - eta^2) / N_el - shift, evaluated in extended precision.
double mu_lower_bound(const Eigen::VectorXd& shifted_eigenvalues, double eta_sq, double shift);

struct ErrorComponents {
  double err_disc = 0.0;
  double err_scf = 0.0;
  double mu_lb = 0.0;
};

/// err_disc = sum lambda_{m+1} - N_el mu, err_scf = Tr(H gamma_m) - sum lambda_{m+1}
/// (unshifted lambda). Throws InconsistentState if either is below -1e-12
/// relative to the eigenvalue scale; tiny negative values are reported as 0.
ErrorComponents error_components(double trace_h_gamma_m, const Eigen::VectorXd& lambda_next,
                                 double eta_sq, double shift);

/// Outcome of an estimator at one trial shift.
struct ShiftTrial {
  bool admissible = false;
  double q = 0.0;
  double eta_sq = 0.0;
};

struct ShiftSearch {
  double shift = 0.0;
  double eta_sq = 0.0;
  double q = 0.0;
  int evaluations = 0;
};

/// Minimizes eta_sq(s) over shifts above `lower` with q(s) < 1. The
/// admissible boundary is located by doubling and bisection, then a
/// golden-section search in log(s - boundary) runs to 1e-3 relative width.
/// Every shift in `candidates` is also tried. Throws EstimatorUnavailable
/// when no admissible shift is found.
ShiftSearch optimize_shift(const std::function<ShiftTrial(double)>& evaluate, double lower,
                           const std::vector<double>& candidates = {});

struct CertifyOptions {
  std::vector<Variant> variants{all_variants().begin(), all_variants().end()};
  double gap_tol = 1e-8;
  /// Guaranteed variants without optimization use the default shift if
  /// q <= q_target there, and otherwise the shift where q = q_target.
  double q_target = 0.5;
  bool opnorm_use_next_eigenvalue = false;
  SolveOptions solve;
};

/// One estimator evaluated on one fiber.
struct VariantValue {
  Variant variant = Variant::eta0;
  bool available = false;
  std::string note;
  double eta_sq = 0.0;
  double shift = 0.0;
  std::optional<double> opnorm;
};

/// Estimator input for one fiber at SCF iterate m: the next Aufbau state of
/// H_{rho_m} in V_N and Tr(H_{rho_m} gamma_m).
struct FiberCertificate {
  SpectralSlice next;
  double trace_h_gamma = 0.0;
  std::vector<VariantValue> values;

  double sum_lambda_next() const;
};

/// Default shift max(0, 0.1 - eps_1).
double default_shift(const SpectralSlice& slice);

/// eta^2 of a single variant for the slice `next` of `hamiltonian`, including
/// the whole setup (splitting, residuals, solves, shift search).
VariantValue evaluate_variant(const MeanFieldHamiltonian& hamiltonian, const SpectralSlice& next,
                              Variant variant, const CertifyOptions& options = {});

/// Diagonalizes H in V_N, evaluates Tr(H gamma_m) and every requested variant.
FiberCertificate certify_fiber(const MeanFieldHamiltonian& hamiltonian, const OrbitalSet& gamma_m,
                               const BasisPtr& coarse, const BasisPtr& ref, int n_el,
                               const CertifyOptions& options = {});

/// Tr(H gamma) = sum_i <phi_i, H phi_i>.
double trace_hamiltonian(const MeanFieldHamiltonian& hamiltonian, const OrbitalSet& gamma);

struct VariantBound {
  Variant variant = Variant::eta0;
  bool available = false;
  std::string note;
  double eta_sq = 0.0;
  double mu_lb = 0.0;
  double err_disc = 0.0;
  double err_scf = 0.0;
  /// Shift of the first fiber.
  double shift = 0.0;
  /// Largest opnorm bound over fibers.
  std::optional<double> opnorm;
  bool guaranteed = false;
};

struct BoundReport {
  double err_scf = 0.0;
  std::vector<VariantBound> bounds;

  const VariantBound* find(Variant v) const;
};

/// Weighted aggregation of fiber certificates (weights sum to one). Every
/// fiber must share the same variant list.
BoundReport make_report(const std::vector<FiberCertificate>& fibers,
                        const std::vector<double>& weights, bool convex);

}  // namespace pwcert
