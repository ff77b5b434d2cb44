#include "pwcert/linear_solver.hpp"

#include <fmt/format.h>

#include "pwcert/error.hpp"

namespace pwcert {

SpectralSlice SpectralSlice::shifted(double new_shift) const {
  SpectralSlice s = *this;
  s.eigenvalues.array() += new_shift - shift;
  s.shift = new_shift;
  return s;
}

OrbitalSet SpectralSlice::occupied() const {
  Eigen::VectorXd e = eigenvalues.head(n_el).array() - shift;
  return OrbitalSet(ref, coarse, vectors.leftCols(n_el), std::move(e));
}

SpectralSlice diagonalize_projected(const MeanFieldHamiltonian& hamiltonian, const BasisPtr& coarse,
                                    const BasisPtr& ref, int n_el, double shift,
                                    const DiagonalizeOptions& options) {
  if (n_el < 1) throw InvalidArgument("at least one electron required");
  const auto n = static_cast<int>(coarse->size());
  int count = options.count > n_el ? options.count : n_el + 1;
  if (n < n_el + 1) {
    throw InvalidArgument(fmt::format("coarse basis has {} planewaves, {} needed", n, n_el + 1));
  }
  count = std::min(count, n);
  const SubspaceMask mask(coarse, ref);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian.dense_matrix(coarse, shift));
  if (solver.info() != Eigen::Success) throw InconsistentState("dense eigensolver failed");

  SpectralSlice slice;
  slice.ref = ref;
  slice.coarse = coarse;
  slice.shift = shift;
  slice.n_el = n_el;
  slice.eigenvalues = solver.eigenvalues().head(count);
  slice.vectors = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(ref->size()), count);
  for (int j = 0; j < count; ++j) {
    Eigen::VectorXcd v = solver.eigenvectors().col(j);
    // First coefficient of (numerically) maximal modulus; ties are common
    // because c_G and c_{-G} have equal modulus for real potentials.
    const double vmax = v.cwiseAbs().maxCoeff();
    Eigen::Index imax = 0;
    while (std::abs(v[imax]) < vmax * (1.0 - 1e-6)) ++imax;
    v *= std::conj(v[imax]) / std::abs(v[imax]);
    v[imax] = std::abs(v[imax]);
    slice.vectors.col(j) = mask.embed(v);
  }
  if (slice.gap() < options.gap_tol) {
    throw DegenerateFermiLevel(fmt::format("gap {:.3e} Ha at N_el = {} is below {:.1e}",
                                           slice.gap(), n_el, options.gap_tol));
  }
  return slice;
}

SpectralSlice diagonalize_projected(const ModelSpec& model, const PeriodicField& rho, double shift,
                                    const BasisPtr& coarse, const BasisPtr& ref,
                                    const DiagonalizeOptions& options) {
  return diagonalize_projected(MeanFieldHamiltonian(model, rho), coarse, ref, model.n_el, shift,
                               options);
}

}  // namespace pwcert
