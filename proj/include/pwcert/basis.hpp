#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pwcert/lattice.hpp"

namespace pwcert {

/// FFT grid dimensions; unused directions have size 1.
using GridShape = std::array<int, 3>;

inline std::size_t grid_points(const GridShape& g) {
  return static_cast<std::size_t>(g[0]) * g[1] * g[2];
}

/// Smallest grid on which products of two orbitals (densities) and products of
/// a density-sphere potential with an orbital are alias-free inside their
/// target spheres, for every k-shift listed.
///
/// Along each direction the size is at least D + 2K + 1, where K is the
/// largest orbital Miller index and D the largest index of the doubled-radius
/// density sphere (and at least 2D + 1 so that the density sphere itself fits);
/// for k = 0 this is the familiar 4 N_max + 1.
GridShape alias_free_grid(const Lattice& lattice, double ecut,
                          std::span<const Eigen::Vector3d> kshifts);

/// Planewave basis {e_G : |G + k|^2 / 2 <= ecut} on a fixed FFT grid.
///
/// G-vectors are stored in lexicographic order of their Miller indices.
/// Instances are immutable and shared through std::shared_ptr so that fields
/// can cheaply refer to the basis they live on.
class PlanewaveBasis {
 public:
  /// Enumerates the cutoff sphere. Without an explicit grid the alias-free
  /// grid for this cutoff and k-shift is used.
  static std::shared_ptr<const PlanewaveBasis> build(
      const Lattice& lattice, double ecut,
      const Eigen::Vector3d& kshift = Eigen::Vector3d::Zero(),
      std::optional<GridShape> grid = std::nullopt);

  const Lattice& lattice() const { return lattice_; }
  double ecut() const { return ecut_; }
  /// Cartesian k-shift.
  const Eigen::Vector3d& kshift() const { return kshift_; }
  const GridShape& grid() const { return grid_; }

  std::size_t size() const { return miller_.size(); }
  const std::vector<Miller>& miller() const { return miller_; }
  /// Cartesian G (without k).
  Eigen::Vector3d gvector(std::size_t i) const { return lattice_.cartesian(miller_[i]); }
  /// |G + k|^2 / 2 for each basis function.
  const std::vector<double>& kinetic() const { return kinetic_; }
  /// Flat offset of each G-vector in the FFT grid (row-major, wrapped indices).
  const std::vector<std::size_t>& grid_offsets() const { return offsets_; }

  /// Position of a Miller index in this basis, or -1.
  std::ptrdiff_t index_of(const Miller& n) const;

  /// Same lattice, k-shift and grid: fields can be copied between the bases.
  bool compatible_with(const PlanewaveBasis& other) const;
  /// Largest absolute Miller index along each direction.
  std::array<int, 3> max_miller() const;

 private:
  PlanewaveBasis(const Lattice& lattice, double ecut, const Eigen::Vector3d& kshift,
                 const GridShape& grid, std::vector<Miller> miller);

  Lattice lattice_;
  double ecut_;
  Eigen::Vector3d kshift_;
  GridShape grid_;
  std::vector<Miller> miller_;
  std::vector<double> kinetic_;
  std::vector<std::size_t> offsets_;
  std::vector<std::ptrdiff_t> lookup_;  // grid offset -> basis index
};

using BasisPtr = std::shared_ptr<const PlanewaveBasis>;

/// The density sphere |G| <= 2 sqrt(2 ecut) (k = 0) on the given grid. It holds
/// every Fourier mode of a product of two functions of the ecut sphere.
BasisPtr density_basis(const Lattice& lattice, double ecut, const GridShape& grid);

/// Index map of a sub-sphere inside a larger compatible sphere.
class SubspaceMask {
 public:
  SubspaceMask(const BasisPtr& sub, const BasisPtr& super);

  const BasisPtr& sub() const { return sub_; }
  const BasisPtr& super() const { return super_; }
  /// For each sub index, its position in the super basis.
  const std::vector<Eigen::Index>& positions() const { return positions_; }
  /// For each super index, whether it belongs to the sub basis.
  const std::vector<char>& inside() const { return inside_; }

  Eigen::VectorXcd embed(const Eigen::VectorXcd& sub_coeffs) const;
  Eigen::VectorXcd restrict(const Eigen::VectorXcd& super_coeffs) const;
  /// Zeroes the sub-basis coefficients of a super-basis vector (Pi_N^perp).
  Eigen::VectorXcd complement(const Eigen::VectorXcd& super_coeffs) const;
  /// Keeps only the sub-basis coefficients of a super-basis vector (Pi_N).
  Eigen::VectorXcd project(const Eigen::VectorXcd& super_coeffs) const;

 private:
  BasisPtr sub_;
  BasisPtr super_;
  std::vector<Eigen::Index> positions_;
  std::vector<char> inside_;
};

}  // namespace pwcert
