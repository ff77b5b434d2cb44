#include "pwcert/potential.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pwcert/error.hpp"

namespace pwcert {

std::string to_string(PotentialDescriptor::Kind kind) {
  switch (kind) {
    case PotentialDescriptor::Kind::zero: return "zero";
    case PotentialDescriptor::Kind::constant: return "constant";
    case PotentialDescriptor::Kind::cosine: return "cosine";
    case PotentialDescriptor::Kind::random1d: return "random1d";
  }
  return "zero";
}

PotentialDescriptor::Kind potential_kind_from_string(const std::string& name) {
  if (name == "zero") return PotentialDescriptor::Kind::zero;
  if (name == "constant") return PotentialDescriptor::Kind::constant;
  if (name == "cosine") return PotentialDescriptor::Kind::cosine;
  if (name == "random1d") return PotentialDescriptor::Kind::random1d;
  throw InvalidArgument("unknown potential kind '" + name + "'");
}

namespace {

// Uniform on [-a, a) from the top 53 bits; mt19937_64 output is fixed by the
// standard, so the sequence is portable across standard libraries.
double uniform_symmetric(std::mt19937_64& rng, double a) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return a * (2.0 * u - 1.0);
}

}  // namespace

ExternalPotential random_potential_1d(const BasisPtr& basis, std::uint64_t seed, double amplitude,
                                      double decay, double mode_cutoff) {
  const auto& lattice = basis->lattice();
  if (lattice.dimension() != 1) {
    throw InvalidArgument("random_potential_1d requires a one-dimensional lattice");
  }
  const double g1 = lattice.reciprocal()(0, 0);
  const int n_random = static_cast<int>(std::floor(mode_cutoff / std::abs(g1)));
  std::mt19937_64 rng(seed);
  std::vector<double> omega(static_cast<std::size_t>(std::max(n_random, 0)) + 1, 0.0);
  for (int n = 1; n <= n_random; ++n) omega[static_cast<std::size_t>(n)] = uniform_symmetric(rng, amplitude);

  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
  const auto& ms = basis->miller();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const int n = ms[i][0];
    if (n == 0) {
      c[static_cast<Eigen::Index>(i)] = 1.0;
      continue;
    }
    const double g = std::abs(n * g1);
    const int an = std::abs(n);
    const double w = an <= n_random ? omega[static_cast<std::size_t>(an)] : 1.0;
    // Real omega makes hat V_{-G} = hat V_G = conj(hat V_G).
    c[static_cast<Eigen::Index>(i)] = w / std::pow(g, decay);
  }
  PotentialDescriptor d;
  d.kind = PotentialDescriptor::Kind::random1d;
  d.seed = seed;
  d.amplitude = amplitude;
  d.decay = decay;
  d.mode_cutoff = mode_cutoff;
  return {PeriodicField(basis, std::move(c)), d};
}

ExternalPotential make_potential(const PotentialDescriptor& desc, const BasisPtr& basis) {
  const double sqrt_vol = std::sqrt(basis->lattice().volume());
  PeriodicField f = PeriodicField::zeros(basis);
  switch (desc.kind) {
    case PotentialDescriptor::Kind::zero:
      break;
    case PotentialDescriptor::Kind::constant: {
      const auto i0 = basis->index_of({0, 0, 0});
      f.coefficients()[i0] = desc.value * sqrt_vol;
      break;
    }
    case PotentialDescriptor::Kind::cosine: {
      const auto i0 = basis->index_of({0, 0, 0});
      f.coefficients()[i0] = desc.value * sqrt_vol;
      const Miller neg{-desc.mode[0], -desc.mode[1], -desc.mode[2]};
      const auto ip = basis->index_of(desc.mode);
      const auto in = basis->index_of(neg);
      if (ip < 0 || in < 0) throw InvalidArgument("cosine mode outside the potential basis");
      f.coefficients()[ip] += 0.5 * desc.amplitude * sqrt_vol;
      f.coefficients()[in] += 0.5 * desc.amplitude * sqrt_vol;
      break;
    }
    case PotentialDescriptor::Kind::random1d:
      return random_potential_1d(basis, desc.seed, desc.amplitude, desc.decay, desc.mode_cutoff);
  }
  return {std::move(f), desc};
}

}  // namespace pwcert
