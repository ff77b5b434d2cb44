#include "pwcert/lattice.hpp"

#include <cmath>
#include <numbers>

#include "pwcert/error.hpp"

namespace pwcert {

Lattice::Lattice(int dimension, const Eigen::Matrix3d& vectors) : dimension_(dimension) {
  if (dimension < 1 || dimension > 3) {
    throw InvalidArgument("lattice dimension must be 1, 2 or 3");
  }
  vectors_ = Eigen::Matrix3d::Identity();
  vectors_.topLeftCorner(dimension, dimension) = vectors.topLeftCorner(dimension, dimension);
  const double det = vectors_.topLeftCorner(dimension, dimension).determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12) {
    throw InvalidArgument("singular lattice: cell vectors are linearly dependent");
  }
  volume_ = std::abs(det);
  reciprocal_ = 2.0 * std::numbers::pi * vectors_.inverse().transpose();
}

Lattice Lattice::line(double length) {
  Eigen::Matrix3d v = Eigen::Matrix3d::Identity();
  v(0, 0) = length;
  return Lattice(1, v);
}

Eigen::Vector3d Lattice::cartesian(const Miller& n) const {
  return reciprocal_ * Eigen::Vector3d(n[0], n[1], n[2]);
}

Eigen::Vector3d Lattice::cartesian_k(const Eigen::Vector3d& fractional) const {
  Eigen::Vector3d f = fractional;
  for (int d = dimension_; d < 3; ++d) f[d] = 0.0;
  return reciprocal_ * f;
}

}  // namespace pwcert
