#include "pwcert/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pwcert/error.hpp"

namespace pwcert {

namespace {

int fft_friendly_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

std::size_t wrap(int n, int size) {
  const int w = ((n % size) + size) % size;
  return static_cast<std::size_t>(w);
}

// Enumerates {n : |G_n + k|^2 / 2 <= ecut} in lexicographic order.
std::vector<Miller> enumerate_sphere(const Lattice& lattice, double ecut,
                                     const Eigen::Vector3d& kshift) {
  const double radius = std::sqrt(2.0 * ecut) + kshift.norm();
  std::array<int, 3> bound{0, 0, 0};
  for (int d = 0; d < lattice.dimension(); ++d) {
    const double len = lattice.vectors().col(d).norm();
    bound[d] = static_cast<int>(std::floor(len * radius / (2.0 * std::numbers::pi))) + 1;
  }
  std::vector<Miller> out;
  for (int a = -bound[0]; a <= bound[0]; ++a) {
    for (int b = -bound[1]; b <= bound[1]; ++b) {
      for (int c = -bound[2]; c <= bound[2]; ++c) {
        const Miller n{a, b, c};
        const Eigen::Vector3d q = lattice.cartesian(n) + kshift;
        if (0.5 * q.squaredNorm() <= ecut) out.push_back(n);
      }
    }
  }
  return out;
}

std::array<int, 3> max_abs(const std::vector<Miller>& ms) {
  std::array<int, 3> m{0, 0, 0};
  for (const auto& n : ms) {
    for (int d = 0; d < 3; ++d) m[d] = std::max(m[d], std::abs(n[d]));
  }
  return m;
}

constexpr double kDensitySlack = 1e-12;

}  // namespace

GridShape alias_free_grid(const Lattice& lattice, double ecut,
                          std::span<const Eigen::Vector3d> kshifts) {
  if (!(ecut > 0.0)) throw InvalidArgument("energy cutoff must be positive");
  std::array<int, 3> orbital{0, 0, 0};
  const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  std::span<const Eigen::Vector3d> ks = kshifts.empty() ? std::span(&zero, 1) : kshifts;
  for (const auto& k : ks) {
    const auto m = max_abs(enumerate_sphere(lattice, ecut, k));
    for (int d = 0; d < 3; ++d) orbital[d] = std::max(orbital[d], m[d]);
  }
  const auto dens = max_abs(enumerate_sphere(lattice, 4.0 * ecut * (1.0 + kDensitySlack), zero));
  GridShape g{1, 1, 1};
  for (int d = 0; d < lattice.dimension(); ++d) {
    g[d] = fft_friendly_size(std::max(dens[d] + 2 * orbital[d] + 1, 2 * dens[d] + 1));
  }
  return g;
}

PlanewaveBasis::PlanewaveBasis(const Lattice& lattice, double ecut, const Eigen::Vector3d& kshift,
                               const GridShape& grid, std::vector<Miller> miller)
    : lattice_(lattice), ecut_(ecut), kshift_(kshift), grid_(grid), miller_(std::move(miller)) {
  kinetic_.reserve(miller_.size());
  offsets_.reserve(miller_.size());
  lookup_.assign(grid_points(grid_), -1);
  for (std::size_t i = 0; i < miller_.size(); ++i) {
    const auto& n = miller_[i];
    kinetic_.push_back(0.5 * (lattice_.cartesian(n) + kshift_).squaredNorm());
    const std::size_t off =
        (wrap(n[0], grid_[0]) * grid_[1] + wrap(n[1], grid_[1])) * grid_[2] + wrap(n[2], grid_[2]);
    offsets_.push_back(off);
    lookup_[off] = static_cast<std::ptrdiff_t>(i);
  }
}

std::shared_ptr<const PlanewaveBasis> PlanewaveBasis::build(const Lattice& lattice, double ecut,
                                                            const Eigen::Vector3d& kshift,
                                                            std::optional<GridShape> grid) {
  if (!(ecut > 0.0)) throw InvalidArgument("energy cutoff must be positive");
  Eigen::Vector3d k = kshift;
  for (int d = lattice.dimension(); d < 3; ++d) k[d] = 0.0;
  auto miller = enumerate_sphere(lattice, ecut, k);
  GridShape g = grid ? *grid : alias_free_grid(lattice, ecut, std::span(&k, 1));
  const auto m = max_abs(miller);
  for (int d = 0; d < 3; ++d) {
    if (g[d] < 1 || 2 * m[d] + 1 > g[d]) {
      throw InvalidArgument("FFT grid too small for the requested cutoff sphere");
    }
  }
  return std::shared_ptr<const PlanewaveBasis>(
      new PlanewaveBasis(lattice, ecut, k, g, std::move(miller)));
}

std::ptrdiff_t PlanewaveBasis::index_of(const Miller& n) const {
  for (int d = 0; d < 3; ++d) {
    if (2 * std::abs(n[d]) + 1 > grid_[d]) return -1;
  }
  const std::size_t off =
      (wrap(n[0], grid_[0]) * grid_[1] + wrap(n[1], grid_[1])) * grid_[2] + wrap(n[2], grid_[2]);
  const auto idx = lookup_[off];
  if (idx < 0 || miller_[static_cast<std::size_t>(idx)] != n) return -1;
  return idx;
}

bool PlanewaveBasis::compatible_with(const PlanewaveBasis& other) const {
  return lattice_ == other.lattice_ && grid_ == other.grid_ &&
         (kshift_ - other.kshift_).norm() <= 1e-14 * (1.0 + kshift_.norm());
}

std::array<int, 3> PlanewaveBasis::max_miller() const { return max_abs(miller_); }

BasisPtr density_basis(const Lattice& lattice, double ecut, const GridShape& grid) {
  return PlanewaveBasis::build(lattice, 4.0 * ecut * (1.0 + kDensitySlack),
                               Eigen::Vector3d::Zero(), grid);
}

SubspaceMask::SubspaceMask(const BasisPtr& sub, const BasisPtr& super) : sub_(sub), super_(super) {
  if (!sub->compatible_with(*super)) {
    throw InvalidArgument("sub-basis and super-basis differ in lattice, k-shift or grid");
  }
  inside_.assign(super->size(), 0);
  positions_.reserve(sub->size());
  for (const auto& n : sub->miller()) {
    const auto j = super->index_of(n);
    if (j < 0) throw InvalidArgument("sub-basis is not contained in the super-basis");
    positions_.push_back(j);
    inside_[static_cast<std::size_t>(j)] = 1;
  }
}

Eigen::VectorXcd SubspaceMask::embed(const Eigen::VectorXcd& sub_coeffs) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(super_->size()));
  for (std::size_t i = 0; i < positions_.size(); ++i) out[positions_[i]] = sub_coeffs[i];
  return out;
}

Eigen::VectorXcd SubspaceMask::restrict(const Eigen::VectorXcd& super_coeffs) const {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(positions_.size()));
  for (std::size_t i = 0; i < positions_.size(); ++i) out[i] = super_coeffs[positions_[i]];
  return out;
}

Eigen::VectorXcd SubspaceMask::complement(const Eigen::VectorXcd& super_coeffs) const {
  Eigen::VectorXcd out = super_coeffs;
  for (auto j : positions_) out[j] = 0.0;
  return out;
}

Eigen::VectorXcd SubspaceMask::project(const Eigen::VectorXcd& super_coeffs) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(super_coeffs.size());
  for (auto j : positions_) out[j] = super_coeffs[j];
  return out;
}

}  // namespace pwcert
