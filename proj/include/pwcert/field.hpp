#pragma once

#include <complex>

#include <Eigen/Dense>

#include "pwcert/basis.hpp"

namespace pwcert {

/// Values of a periodic function at the FFT grid points x_j (row-major).
struct GridFunction {
  GridShape shape{1, 1, 1};
  Eigen::ArrayXcd values;
};

/// Periodic function u = sum_G c_G e_G with e_G(x) = |Omega|^{-1/2} e^{i(G+k).x},
/// stored as the Fourier coefficients aligned with the basis G-vectors.
/// For k != 0 only the cell-periodic part is represented on the grid.
class PeriodicField {
 public:
  PeriodicField(BasisPtr basis, Eigen::VectorXcd coefficients);
  static PeriodicField zeros(BasisPtr basis);

  const BasisPtr& basis() const { return basis_; }
  const Eigen::VectorXcd& coefficients() const { return coeffs_; }
  Eigen::VectorXcd& coefficients() { return coeffs_; }

  /// L2 norm over the cell; equals the Euclidean norm of the coefficients.
  double norm() const { return coeffs_.norm(); }
  /// L2 inner product <this, other>, conjugate-linear in this.
  std::complex<double> dot(const PeriodicField& other) const;
  /// Coefficient of e_G for a Miller index (zero when outside the basis).
  std::complex<double> coefficient(const Miller& n) const;
  /// coeff(-G) == conj(coeff(G)) up to tol (relative to the largest coefficient).
  bool is_real(double tol = 1e-12) const;

  PeriodicField& operator+=(const PeriodicField& other);
  PeriodicField& operator-=(const PeriodicField& other);
  PeriodicField& operator*=(double s);

 private:
  BasisPtr basis_;
  Eigen::VectorXcd coeffs_;
};

PeriodicField operator+(PeriodicField a, const PeriodicField& b);
PeriodicField operator-(PeriodicField a, const PeriodicField& b);
PeriodicField operator*(double s, PeriodicField a);

/// Evaluates a coefficient vector of `basis` on its grid.
GridFunction to_real(const BasisPtr& basis, const Eigen::VectorXcd& coeffs);
GridFunction to_real(const PeriodicField& f);
/// Fourier coefficients on `basis` of a grid function; modes outside the basis are dropped.
Eigen::VectorXcd to_fourier_coefficients(const GridFunction& g, const BasisPtr& basis);
PeriodicField to_fourier(const GridFunction& g, const BasisPtr& basis);

/// Orthogonal projection onto the span of `target` (copy shared modes, drop the rest).
PeriodicField project(const PeriodicField& f, const BasisPtr& target);

/// (sum_G (1 + |G+k|^2/2)^s |c_G|^2)^{1/2}.
double sobolev_norm(const PeriodicField& f, double s);

/// Integral over the cell by grid quadrature (exact for trigonometric
/// polynomials resolved by the grid).
double integrate_real(const GridFunction& g, const Lattice& lattice);

}  // namespace pwcert
