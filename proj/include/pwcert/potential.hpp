#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "pwcert/field.hpp"

namespace pwcert {

/// Recipe for an external potential; enough to rebuild it on any grid.
struct PotentialDescriptor {
  enum class Kind { zero, constant, cosine, random1d };

  Kind kind = Kind::zero;
  /// constant: value of V; cosine: offset added to the cosine.
  double value = 0.0;
  /// cosine: V = value + amplitude cos(G_mode . x); random1d: range of omega_G.
  double amplitude = 10.0;
  /// cosine: Miller index of G_mode.
  Miller mode{1, 0, 0};
  /// random1d only.
  std::uint64_t seed = 0;
  double decay = 1.1;
  double mode_cutoff = 100.0;

  friend bool operator==(const PotentialDescriptor&, const PotentialDescriptor&) = default;
};

std::string to_string(PotentialDescriptor::Kind kind);
PotentialDescriptor::Kind potential_kind_from_string(const std::string& name);

/// Real-valued external potential V (Hartree) given by its Fourier
/// coefficients on a density sphere.
struct ExternalPotential {
  PeriodicField field;
  PotentialDescriptor descriptor;
};

/// Random 1D potential with hat V_0 = 1, hat V_G = omega_G / |G|^decay for
/// 0 < |G| <= mode_cutoff and 1 / |G|^decay beyond, omega_G ~ U(-amplitude, amplitude).
///
/// omega_G is drawn for G > 0 in increasing order of G from a mt19937_64
/// stream seeded with `seed`; hat V_{-G} = conj(hat V_G) keeps V real. The
/// draws do not depend on the basis, so every cutoff sees the same potential.
ExternalPotential random_potential_1d(const BasisPtr& basis, std::uint64_t seed,
                                      double amplitude = 10.0, double decay = 1.1,
                                      double mode_cutoff = 100.0);

ExternalPotential make_potential(const PotentialDescriptor& desc, const BasisPtr& basis);

}  // namespace pwcert
