#pragma once

// Monte Carlo type estimators on sample matrices (rows = samples, columns =
// cells): plain MC, recursive multi-order control variates (with an optional
// reduced-model bottom level), multilevel MC on nested grids, and the
// statistical error diagnostics of the hierarchy.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "momc/errors.hpp"
#include "momc/mesh.hpp"

namespace momc {

using Profile = std::vector<double>;
using SampleSet = std::vector<Profile>;

struct Moments {
  Profile mean;
  Profile variance;
};

inline std::size_t profile_size(const SampleSet& s) {
  if (s.empty()) throw DimensionError("empty sample set");
  const std::size_t n = s.front().size();
  for (const Profile& p : s) {
    if (p.size() != n) throw DimensionError("sample profiles differ in length");
  }
  return n;
}

inline void check_prefix(const SampleSet& s, std::size_t m, const char* what) {
  if (m == 0) throw DomainError(std::string(what) + ": zero samples");
  if (m > s.size()) {
    throw DimensionError(std::string(what) + ": asks for " + std::to_string(m) +
                         " samples, only " + std::to_string(s.size()) + " available");
  }
}

/// Cellwise mean of the first m samples.
inline Profile sample_mean(const SampleSet& s, std::size_t m) {
  check_prefix(s, m, "sample_mean");
  const std::size_t n = profile_size(s);
  Profile out(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) out[i] += s[k][i];
  }
  for (double& v : out) v /= static_cast<double>(m);
  return out;
}

/// Unbiased cellwise covariance of the first m samples of a and b.
inline Profile sample_cov(const SampleSet& a, const SampleSet& b, std::size_t m) {
  if (m < 2) throw DomainError("covariance needs at least 2 samples");
  check_prefix(a, m, "sample_cov");
  check_prefix(b, m, "sample_cov");
  const std::size_t n = profile_size(a);
  if (profile_size(b) != n) throw DimensionError("sample_cov: profiles differ in length");
  const Profile ma = sample_mean(a, m);
  const Profile mb = sample_mean(b, m);
  Profile out(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) out[i] += (a[k][i] - ma[i]) * (b[k][i] - mb[i]);
  }
  for (double& v : out) v /= static_cast<double>(m - 1);
  return out;
}

inline Profile sample_var(const SampleSet& a, std::size_t m) { return sample_cov(a, a, m); }

/// Plain Monte Carlo moments; the variance is zero for a single sample.
inline Moments mc_estimate(const SampleSet& s, std::size_t m) {
  Moments out{sample_mean(s, m), {}};
  out.variance = m >= 2 ? sample_var(s, m) : Profile(out.mean.size(), 0.0);
  return out;
}

inline Moments mc_estimate(const SampleSet& s) { return mc_estimate(s, s.size()); }

enum class AlphaMode { per_cell, scalar, zero };

inline const char* to_string(AlphaMode a) {
  switch (a) {
    case AlphaMode::per_cell: return "per_cell";
    case AlphaMode::scalar: return "scalar";
    case AlphaMode::zero: return "zero";
  }
  return "?";
}

inline AlphaMode parse_alpha_mode(const std::string& s) {
  if (s == "per_cell") return AlphaMode::per_cell;
  if (s == "scalar") return AlphaMode::scalar;
  if (s == "zero") return AlphaMode::zero;
  throw ConfigError("unknown alpha mode '" + s + "'");
}

inline constexpr double kVarianceFloorRel = 1e-14;
inline constexpr double kVarianceFloorAbs = 1e-30;

/// alpha = Cov / Var[low] cellwise, zero where Var[low] is negligible, and
/// clamped to the Cauchy-Schwarz interval |alpha| <= sd(high) / sd(low).
inline Profile alpha_quasi_optimal(const Profile& cov, const Profile& var_low,
                                   const Profile& var_high, AlphaMode mode = AlphaMode::per_cell) {
  const std::size_t n = cov.size();
  if (var_low.size() != n || var_high.size() != n) {
    throw DimensionError("alpha_quasi_optimal: field sizes differ");
  }
  Profile alpha(n, 0.0);
  if (mode == AlphaMode::zero) return alpha;
  double vmax = 0.0;
  for (double v : var_low) vmax = std::max(vmax, v);
  const double floor = std::max(kVarianceFloorRel * vmax, kVarianceFloorAbs);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(var_low[i] > floor)) continue;
    const double bound = std::sqrt(std::max(var_high[i], 0.0) / var_low[i]);
    alpha[i] = std::clamp(cov[i] / var_low[i], -bound, bound);
  }
  if (mode == AlphaMode::scalar) {
    double s = 0.0;
    for (double a : alpha) s += a;
    std::fill(alpha.begin(), alpha.end(), s / static_cast<double>(n));
  }
  return alpha;
}

/// Two-level control variate: E_{M_L}[u_L] - alpha (E_{M_L}[u_{L-1}] - E_{M_{L-1}}[u_{L-1}]).
/// `low` holds M_{L-1} samples whose first M_L share inputs with `high`.
inline Profile momc_two_level(const SampleSet& high, const SampleSet& low, const Profile& alpha) {
  const std::size_t ml = high.size();
  if (low.size() < ml) throw DimensionError("low level needs at least as many samples as high");
  const Profile eh = sample_mean(high, ml);
  const Profile el_short = sample_mean(low, ml);
  const Profile el_long = sample_mean(low, low.size());
  if (alpha.size() != eh.size()) throw DimensionError("alpha field size mismatch");
  Profile out(eh.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = eh[i] - alpha[i] * (el_short[i] - el_long[i]);
  }
  return out;
}

struct MomentField {
  Profile mean;
  Profile variance;
  std::vector<Profile> alpha;  ///< alpha[l] couples level l to l-1 (alpha[0] empty)
  std::vector<std::size_t> counts;
  double cost = 0.0;
};

/// Recursive control-variate estimator. Levels are ordered cheapest first
/// and nested: level l holds M_l samples, the first of which share inputs
/// with the first M_l samples of level l-1 (M_0 >= M_1 >= ...). The variance
/// is estimated by the same recursion on sample variances with weight alpha^2.
inline MomentField momc_recursive(const std::vector<SampleSet>& levels,
                                  const std::vector<double>& costs,
                                  AlphaMode mode = AlphaMode::per_cell) {
  if (levels.empty()) throw DomainError("momc_recursive needs at least one level");
  if (costs.size() != levels.size()) throw DimensionError("one cost per level required");
  const std::size_t n = profile_size(levels.front());
  MomentField out;
  out.alpha.resize(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (profile_size(levels[l]) != n) throw DimensionError("levels differ in profile length");
    if (l > 0 && levels[l].size() > levels[l - 1].size()) {
      throw DimensionError("sample counts must not increase towards the top level");
    }
    out.counts.push_back(levels[l].size());
    out.cost += static_cast<double>(levels[l].size()) * costs[l];
  }
  Moments base = mc_estimate(levels.front());
  out.mean = base.mean;
  out.variance = base.variance;
  for (std::size_t l = 1; l < levels.size(); ++l) {
    const SampleSet& hi = levels[l];
    const SampleSet& lo = levels[l - 1];
    const std::size_t m = hi.size();
    const Profile mh = sample_mean(hi, m);
    const Profile ml = sample_mean(lo, m);
    Profile alpha(n, 0.0);
    Profile vh(n, 0.0), vl(n, 0.0);
    if (m >= 2) {
      vh = sample_var(hi, m);
      vl = sample_var(lo, m);
      alpha = alpha_quasi_optimal(sample_cov(hi, lo, m), vl, vh, mode);
    }
    for (std::size_t i = 0; i < n; ++i) {
      out.mean[i] = mh[i] - alpha[i] * (ml[i] - out.mean[i]);
      const double g = alpha[i] * alpha[i];
      out.variance[i] = std::max(0.0, vh[i] - g * (vl[i] - out.variance[i]));
    }
    out.alpha[l] = std::move(alpha);
  }
  return out;
}

/// Recursive estimator with the reduced model as the cheapest level.
inline MomentField apmomc_bifidelity(const SampleSet& reduced, const std::vector<SampleSet>& levels,
                                     double reduced_cost, const std::vector<double>& costs,
                                     AlphaMode mode = AlphaMode::per_cell) {
  std::vector<SampleSet> all;
  all.reserve(levels.size() + 1);
  all.push_back(reduced);
  for (const SampleSet& s : levels) all.push_back(s);
  std::vector<double> c{reduced_cost};
  c.insert(c.end(), costs.begin(), costs.end());
  return momc_recursive(all, c, mode);
}

/// Multilevel MC on nested grids. Level l holds solutions on a grid 2x finer
/// than level l-1 and M_l samples sharing inputs with the first M_l of level
/// l-1. Coarse profiles are injected onto the finest grid.
inline MomentField mlmc_estimate(const std::vector<SampleSet>& levels,
                                 const std::vector<double>& costs) {
  if (levels.empty()) throw DomainError("mlmc_estimate needs at least one level");
  if (costs.size() != levels.size()) throw DimensionError("one cost per level required");
  const std::size_t nf = profile_size(levels.back());
  MomentField out;
  out.alpha.resize(levels.size());
  out.mean.assign(nf, 0.0);
  out.variance.assign(nf, 0.0);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const std::size_t nl = profile_size(levels[l]);
    if (nf % nl != 0) throw DimensionError("MLMC grids are not nested");
    if (l > 0) {
      const std::size_t nc = profile_size(levels[l - 1]);
      if (nl != nc && nl != 2 * nc) throw DimensionError("MLMC grids must refine by 1 or 2");
      if (levels[l].size() > levels[l - 1].size()) {
        throw DimensionError("sample counts must not increase towards the top level");
      }
    }
    out.counts.push_back(levels[l].size());
    out.cost += static_cast<double>(levels[l].size()) * costs[l];
  }
  auto lift = [&](const Profile& p) { return prolongate(p, nf / p.size()); };
  const Moments base = mc_estimate(levels.front());
  out.mean = lift(base.mean);
  out.variance = lift(base.variance);
  for (std::size_t l = 1; l < levels.size(); ++l) {
    const std::size_t m = levels[l].size();
    const Moments hi = mc_estimate(levels[l], m);
    const Moments lo = mc_estimate(levels[l - 1], m);
    const Profile mh = lift(hi.mean), ml = lift(lo.mean);
    const Profile vh = lift(hi.variance), vl = lift(lo.variance);
    for (std::size_t i = 0; i < nf; ++i) {
      out.mean[i] += mh[i] - ml[i];
      out.variance[i] += vh[i] - vl[i];
    }
  }
  for (double& v : out.variance) v = std::max(v, 0.0);
  return out;
}

struct HierarchyDiagnostics {
  std::vector<double> sigma;  ///< ||(1 - rho^2)^{1/2} sd(u_l)||_1 (sd(u_1) on the first level)
  std::vector<double> tau;    ///< ||rho sd(u_l)||_1
  std::vector<double> xi;     ///< prod_{j > l} tau_j, 1 on the top level
  std::vector<double> rho_mean;  ///< cell-averaged correlation with the level below
  double bound = 0.0;         ///< sum_l xi_l sigma_l / sqrt(M_l)
};

/// Error-bound ingredients of a nested hierarchy (levels cheapest first).
inline HierarchyDiagnostics hierarchy_diagnostics(const std::vector<SampleSet>& levels, double dx) {
  if (levels.empty()) throw DomainError("diagnostics need at least one level");
  const std::size_t nl = levels.size();
  HierarchyDiagnostics d;
  d.sigma.assign(nl, 0.0);
  d.tau.assign(nl, 0.0);
  d.xi.assign(nl, 1.0);
  d.rho_mean.assign(nl, 0.0);
  for (std::size_t l = 0; l < nl; ++l) {
    const std::size_t m = levels[l].size();
    if (m < 2) throw DomainError("diagnostics need at least 2 samples per level");
    const Profile vh = sample_var(levels[l], m);
    const std::size_t n = vh.size();
    if (l == 0) {
      for (double v : vh) d.sigma[l] += std::sqrt(std::max(v, 0.0));
      d.sigma[l] *= dx;
      continue;
    }
    const Profile vl = sample_var(levels[l - 1], m);
    const Profile cv = sample_cov(levels[l], levels[l - 1], m);
    double rsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double rho = 0.0;
      if (vh[i] > 0.0 && vl[i] > 0.0) rho = std::clamp(cv[i] / std::sqrt(vh[i] * vl[i]), -1.0, 1.0);
      const double sd = std::sqrt(std::max(vh[i], 0.0));
      d.sigma[l] += std::sqrt(std::max(0.0, 1.0 - rho * rho)) * sd;
      d.tau[l] += std::abs(rho) * sd;
      rsum += rho;
    }
    d.sigma[l] *= dx;
    d.tau[l] *= dx;
    d.rho_mean[l] = rsum / static_cast<double>(n);
  }
  for (std::size_t l = nl; l-- > 0;) {
    d.xi[l] = l + 1 < nl ? d.xi[l + 1] * d.tau[l + 1] : 1.0;
  }
  for (std::size_t l = 0; l < nl; ++l) {
    d.bound += d.xi[l] * d.sigma[l] / std::sqrt(static_cast<double>(levels[l].size()));
  }
  return d;
}

}  // namespace momc
