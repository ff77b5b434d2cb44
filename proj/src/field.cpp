#include "pwcert/field.hpp"

#include <cmath>

#include "fft.hpp"
#include "pwcert/error.hpp"

namespace pwcert {

PeriodicField::PeriodicField(BasisPtr basis, Eigen::VectorXcd coefficients)
    : basis_(std::move(basis)), coeffs_(std::move(coefficients)) {
  if (!basis_) throw InvalidArgument("field without basis");
  if (static_cast<std::size_t>(coeffs_.size()) != basis_->size()) {
    throw InvalidArgument("coefficient vector does not match basis size");
  }
}

PeriodicField PeriodicField::zeros(BasisPtr basis) {
  const auto n = static_cast<Eigen::Index>(basis->size());
  return PeriodicField(std::move(basis), Eigen::VectorXcd::Zero(n));
}

std::complex<double> PeriodicField::dot(const PeriodicField& other) const {
  if (basis_ != other.basis_ && !basis_->compatible_with(*other.basis_)) {
    throw InvalidArgument("inner product of fields on incompatible bases");
  }
  if (basis_ == other.basis_ || basis_->miller() == other.basis_->miller()) {
    return coeffs_.dot(other.coeffs_);
  }
  return coeffs_.dot(project(other, basis_).coefficients());
}

std::complex<double> PeriodicField::coefficient(const Miller& n) const {
  const auto i = basis_->index_of(n);
  return i < 0 ? std::complex<double>(0.0) : coeffs_[i];
}

bool PeriodicField::is_real(double tol) const {
  if (basis_->kshift().norm() > 0.0) return false;
  const double scale = std::max(coeffs_.cwiseAbs().maxCoeff(), 1e-300);
  const auto& ms = basis_->miller();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const Miller neg{-ms[i][0], -ms[i][1], -ms[i][2]};
    const auto j = basis_->index_of(neg);
    const std::complex<double> partner = j < 0 ? 0.0 : std::conj(coeffs_[j]);
    if (std::abs(coeffs_[static_cast<Eigen::Index>(i)] - partner) > tol * scale) return false;
  }
  return true;
}

PeriodicField& PeriodicField::operator+=(const PeriodicField& other) {
  if (other.basis_ != basis_ && other.basis_->miller() != basis_->miller()) {
    throw InvalidArgument("sum of fields on different bases");
  }
  coeffs_ += other.coeffs_;
  return *this;
}

PeriodicField& PeriodicField::operator-=(const PeriodicField& other) {
  if (other.basis_ != basis_ && other.basis_->miller() != basis_->miller()) {
    throw InvalidArgument("difference of fields on different bases");
  }
  coeffs_ -= other.coeffs_;
  return *this;
}

PeriodicField& PeriodicField::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
PeriodicField operator*(double s, PeriodicField a) { return a *= s; }

GridFunction to_real(const BasisPtr& basis, const Eigen::VectorXcd& coeffs) {
  if (static_cast<std::size_t>(coeffs.size()) != basis->size()) {
    throw InvalidArgument("coefficient vector does not match basis size");
  }
  GridFunction g;
  g.shape = basis->grid();
  g.values = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(grid_points(g.shape)));
  const auto& off = basis->grid_offsets();
  for (std::size_t i = 0; i < off.size(); ++i) {
    g.values[static_cast<Eigen::Index>(off[i])] = coeffs[static_cast<Eigen::Index>(i)];
  }
  detail::fft_inplace(g.shape, g.values.data(), +1);
  g.values /= std::sqrt(basis->lattice().volume());
  return g;
}

GridFunction to_real(const PeriodicField& f) { return to_real(f.basis(), f.coefficients()); }

Eigen::VectorXcd to_fourier_coefficients(const GridFunction& g, const BasisPtr& basis) {
  if (g.shape != basis->grid() ||
      static_cast<std::size_t>(g.values.size()) != grid_points(g.shape)) {
    throw InvalidArgument("grid function shape does not match the basis grid");
  }
  Eigen::ArrayXcd work = g.values;
  detail::fft_inplace(g.shape, work.data(), -1);
  const double scale =
      std::sqrt(basis->lattice().volume()) / static_cast<double>(grid_points(g.shape));
  Eigen::VectorXcd c(static_cast<Eigen::Index>(basis->size()));
  const auto& off = basis->grid_offsets();
  for (std::size_t i = 0; i < off.size(); ++i) {
    c[static_cast<Eigen::Index>(i)] = work[static_cast<Eigen::Index>(off[i])] * scale;
  }
  return c;
}

PeriodicField to_fourier(const GridFunction& g, const BasisPtr& basis) {
  return PeriodicField(basis, to_fourier_coefficients(g, basis));
}

PeriodicField project(const PeriodicField& f, const BasisPtr& target) {
  const auto& src = *f.basis();
  if (!(src.lattice() == target->lattice()) ||
      (src.kshift() - target->kshift()).norm() > 1e-14 * (1.0 + src.kshift().norm())) {
    throw InvalidArgument("projection between bases with different lattices or k-shifts");
  }
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(target->size()));
  const auto& ms = target->miller();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto j = src.index_of(ms[i]);
    if (j >= 0) c[static_cast<Eigen::Index>(i)] = f.coefficients()[j];
  }
  return PeriodicField(target, std::move(c));
}

double sobolev_norm(const PeriodicField& f, double s) {
  const auto& kin = f.basis()->kinetic();
  double acc = 0.0;
  for (std::size_t i = 0; i < kin.size(); ++i) {
    acc += std::pow(1.0 + kin[i], s) * std::norm(f.coefficients()[static_cast<Eigen::Index>(i)]);
  }
  return std::sqrt(acc);
}

double integrate_real(const GridFunction& g, const Lattice& lattice) {
  return g.values.real().sum() * lattice.volume() / static_cast<double>(g.values.size());
}

}  // namespace pwcert
