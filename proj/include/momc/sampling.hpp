#pragma once

// Counter-based sampling of independent uniform inputs and the nested
// sample-count schedule shared by the estimator levels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "momc/errors.hpp"

namespace momc {

struct UniformDim {
  double lower = -1.0;
  double upper = 1.0;
};

struct DistributionSpec {
  std::vector<UniformDim> dims;

  std::size_t dimension() const { return dims.size(); }

  void validate() const {
    if (dims.empty()) throw ConfigError("distribution needs at least one dimension");
    for (const UniformDim& d : dims) {
      if (!(d.lower < d.upper) || !std::isfinite(d.lower) || !std::isfinite(d.upper)) {
        throw ConfigError("uniform bounds must satisfy a < b");
      }
    }
  }
};

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform [0, 1) variate keyed by (seed, k, dim), with 53 random bits.
inline double counter_uniform(std::uint64_t seed, std::uint64_t k, std::uint64_t dim) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ k);
  h = mix64(h ^ (dim * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

struct SampleHierarchy {
  std::uint64_t seed = 0;
  DistributionSpec dist;
  std::vector<std::size_t> counts;  ///< samples drawn per level (largest first)

  std::size_t max_count() const {
    std::size_t m = 0;
    for (std::size_t c : counts) m = std::max(m, c);
    return m;
  }
};

/// Sample k of the hierarchy; a pure function of (seed, k).
inline std::vector<double> sample(std::uint64_t seed, const DistributionSpec& dist,
                                  std::size_t k) {
  std::vector<double> z(dist.dimension());
  for (std::size_t d = 0; d < z.size(); ++d) {
    const double u = counter_uniform(seed, k, d);
    z[d] = dist.dims[d].lower + (dist.dims[d].upper - dist.dims[d].lower) * u;
  }
  return z;
}

inline std::vector<double> sample(const SampleHierarchy& h, std::size_t k) {
  if (k >= h.max_count()) {
    throw DomainError("sample index " + std::to_string(k) + " beyond hierarchy size " +
                      std::to_string(h.max_count()));
  }
  return sample(h.seed, h.dist, k);
}

/// Seed of replication r, decorrelated from the base seed.
inline std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t r) {
  return mix64(seed + mix64(r + 0x632be59bd9b4e019ULL));
}

/// Sample counts for costs ordered cheapest first: M_l = M_{l+1} (1 + r_l)
/// with r_l = max(1, ceil(C_{l+1}/C_l) - 1). Counts are returned in the same
/// order as the costs.
inline std::vector<std::size_t> allocate_samples(std::size_t m_top,
                                                 const std::vector<double>& costs) {
  if (costs.empty()) throw ConfigError("allocate_samples needs at least one cost");
  if (m_top < 2) throw ConfigError("top-level sample count must be at least 2");
  for (std::size_t l = 0; l < costs.size(); ++l) {
    if (!(costs[l] > 0.0)) throw ConfigError("level costs must be positive");
    if (l > 0 && costs[l] < costs[l - 1]) {
      throw ConfigError("level costs must be nondecreasing from cheapest to most expensive");
    }
  }
  std::vector<std::size_t> m(costs.size());
  m.back() = m_top;
  for (std::size_t l = costs.size() - 1; l-- > 0;) {
    // Small tolerance so exact ratios are not pushed up by rounding.
    const double ratio = costs[l + 1] / costs[l];
    const auto up = static_cast<std::size_t>(std::ceil(ratio - 1e-12));
    const std::size_t r = std::max<std::size_t>(1, up > 0 ? up - 1 : 0);
    m[l] = m[l + 1] * (1 + r);
  }
  return m;
}

}  // namespace momc
