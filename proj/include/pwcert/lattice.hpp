#pragma once

#include <array>

#include <Eigen/Dense>

namespace pwcert {

/// Integer coordinates of a reciprocal lattice vector, G = sum_j n_j b_j.
using Miller = std::array<int, 3>;

/// Periodic lattice in 1, 2 or 3 dimensions (lengths in Bohr).
///
/// Cell vectors are the columns of a 3x3 matrix. Only the leading
/// dimension x dimension block is physical; the remaining directions are
/// padded with unit vectors so that reciprocal quantities stay well defined,
/// and Miller indices along them are always zero.
class Lattice {
 public:
  Lattice(int dimension, const Eigen::Matrix3d& vectors);

  /// The segment (0, length) with periodic boundary conditions.
  static Lattice line(double length);

  int dimension() const { return dimension_; }
  const Eigen::Matrix3d& vectors() const { return vectors_; }
  /// Reciprocal vectors b_j as columns, a_i . b_j = 2 pi delta_ij.
  const Eigen::Matrix3d& reciprocal() const { return reciprocal_; }
  /// Measure |Omega| of the unit cell (Bohr^dimension).
  double volume() const { return volume_; }

  Eigen::Vector3d cartesian(const Miller& n) const;
  /// Cartesian reciprocal vector from fractional reciprocal coordinates.
  Eigen::Vector3d cartesian_k(const Eigen::Vector3d& fractional) const;

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.dimension_ == b.dimension_ && a.vectors_ == b.vectors_;
  }

 private:
  int dimension_;
  Eigen::Matrix3d vectors_;
  Eigen::Matrix3d reciprocal_;
  double volume_;
};

}  // namespace pwcert
