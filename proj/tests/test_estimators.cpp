#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "momc/estimators.hpp"
#include "momc/sampling.hpp"

using namespace momc;

namespace {

SampleSet random_set(std::size_t m, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(1.0, 2.0);
  SampleSet s(m, Profile(n));
  for (Profile& p : s) {
    for (double& v : p) v = g(rng);
  }
  return s;
}

/// Correlated pair (high, low) with corr(high, low) = rho and unit variances.
void correlated(std::size_t m, double rho, std::uint64_t seed, SampleSet& hi, SampleSet& lo) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  hi.assign(m, Profile(1));
  lo.assign(m, Profile(1));
  for (std::size_t k = 0; k < m; ++k) {
    const double a = g(rng), b = g(rng);
    lo[k][0] = a;
    hi[k][0] = 3.0 + rho * a + std::sqrt(1.0 - rho * rho) * b;
  }
}

}  // namespace

TEST(Moments, MatchTwoPassFormulas) {
  const SampleSet s = random_set(37, 5, 1);
  const Moments m = mc_estimate(s);
  for (std::size_t i = 0; i < 5; ++i) {
    double mean = 0.0;
    for (const Profile& p : s) mean += p[i];
    mean /= 37.0;
    double var = 0.0;
    for (const Profile& p : s) var += (p[i] - mean) * (p[i] - mean);
    var /= 36.0;
    EXPECT_NEAR(m.mean[i], mean, 1e-13);
    EXPECT_NEAR(m.variance[i], var, 1e-12);
  }
  EXPECT_THROW(sample_cov(s, s, 1), DomainError);
  EXPECT_EQ(mc_estimate(s, 1).variance[0], 0.0);
}

TEST(Moments, PrefixAndShapeChecks) {
  const SampleSet s = random_set(10, 3, 2);
  EXPECT_THROW(sample_mean(s, 11), DimensionError);
  SampleSet ragged = s;
  ragged[4].push_back(0.0);
  EXPECT_THROW(mc_estimate(ragged), DimensionError);
}

TEST(Alpha, QuasiOptimalAndClamped) {
  const Profile a = alpha_quasi_optimal({0.5, 2.0, 1.0}, {1.0, 1.0, 0.0}, {1.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(a[0], 0.5);
  EXPECT_DOUBLE_EQ(a[1], 1.0);  // Cauchy-Schwarz bound sd_high / sd_low
  EXPECT_DOUBLE_EQ(a[2], 0.0);  // degenerate low variance
  const Profile z = alpha_quasi_optimal({0.5, 2.0}, {1.0, 1.0}, {1.0, 1.0}, AlphaMode::zero);
  EXPECT_EQ(z, Profile({0.0, 0.0}));
  const Profile sc = alpha_quasi_optimal({0.5, 0.1}, {1.0, 1.0}, {1.0, 1.0}, AlphaMode::scalar);
  EXPECT_DOUBLE_EQ(sc[0], sc[1]);
  EXPECT_NEAR(sc[0], 0.3, 1e-15);
  EXPECT_EQ(parse_alpha_mode(to_string(AlphaMode::scalar)), AlphaMode::scalar);
}

TEST(Momc, ZeroAlphaReducesToMonteCarlo) {
  const SampleSet lo = random_set(40, 4, 3), hi = random_set(10, 4, 4);
  const MomentField f = momc_recursive({lo, hi}, {1.0, 4.0}, AlphaMode::zero);
  const Moments m = mc_estimate(hi);
  EXPECT_EQ(f.mean, m.mean);
  EXPECT_EQ(f.variance, m.variance);
  EXPECT_EQ(f.counts, (std::vector<std::size_t>{40, 10}));
  EXPECT_DOUBLE_EQ(f.cost, 80.0);
}

TEST(Momc, IdenticalLevelsGiveTheCheapMean) {
  const SampleSet lo = random_set(40, 3, 5);
  const SampleSet hi(lo.begin(), lo.begin() + 10);
  const MomentField f = momc_recursive({lo, hi}, {1.0, 2.0});
  const Moments m = mc_estimate(lo);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(f.alpha[1][i], 1.0, 1e-12);
    EXPECT_NEAR(f.mean[i], m.mean[i], 1e-12);
  }
}

TEST(Momc, TwoLevelFormulaMatchesRecursion) {
  const SampleSet lo = random_set(30, 2, 6), hi = random_set(10, 2, 7);
  const Profile alpha{0.3, -0.2};
  const Profile two = momc_two_level(hi, lo, alpha);
  for (std::size_t i = 0; i < 2; ++i) {
    double eh = 0.0, el_short = 0.0, el_long = 0.0;
    for (std::size_t k = 0; k < 10; ++k) {
      eh += hi[k][i] / 10.0;
      el_short += lo[k][i] / 10.0;
    }
    for (std::size_t k = 0; k < 30; ++k) el_long += lo[k][i] / 30.0;
    EXPECT_NEAR(two[i], eh - alpha[i] * (el_short - el_long), 1e-13);
  }
}

TEST(Momc, CountsMustBeNested) {
  const SampleSet lo = random_set(5, 2, 8), hi = random_set(10, 2, 9);
  EXPECT_THROW(momc_recursive({lo, hi}, {1.0, 2.0}), DimensionError);
  EXPECT_THROW(momc_recursive({lo, lo}, {1.0}), DimensionError);
}

TEST(Momc, VarianceMatchesTheoryForSyntheticPairs) {
  // Var[E] = (1 - r/(1+r) rho^2) Var[u_L] / M_L with M_{L-1} = (1+r) M_L.
  const std::size_t ml = 20, r = 3, reps = 4000;
  for (double rho : {0.5, 0.9}) {
    std::vector<double> est;
    for (std::size_t k = 0; k < reps; ++k) {
      SampleSet hi, lo;
      correlated((1 + r) * ml, rho, 1000 + k, hi, lo);
      hi.resize(ml);
      est.push_back(momc_recursive({lo, hi}, {1.0, 4.0}).mean[0]);
    }
    const double mean = std::accumulate(est.begin(), est.end(), 0.0) / reps;
    double var = 0.0;
    for (double e : est) var += (e - mean) * (e - mean);
    var /= reps - 1;
    const double theory = (1.0 - double(r) / (1 + r) * rho * rho) / ml;
    EXPECT_NEAR(mean, 3.0, 5.0 * std::sqrt(theory / reps));
    // Estimated alpha adds O(1/M) excess variance; 15% covers it at M_L = 20.
    EXPECT_NEAR(var / theory, 1.0, 0.15) << "rho " << rho;
  }
}

TEST(Mlmc, TelescopesAcrossGrids) {
  // Level 0 on 2 cells, level 1 on 4 cells with nested samples.
  SampleSet l0{{1.0, 3.0}, {2.0, 5.0}, {0.0, 1.0}, {1.0, 1.0}};
  SampleSet l1{{1.5, 0.5, 3.0, 3.0}, {2.0, 2.0, 6.0, 4.0}};
  const MomentField f = mlmc_estimate({l0, l1}, {1.0, 4.0});
  const double coarse0 = (1.0 + 2.0 + 0.0 + 1.0) / 4.0;
  const double coarse0_short = 1.5;
  EXPECT_NEAR(f.mean[0], coarse0 + (1.5 + 2.0) / 2.0 - coarse0_short, 1e-15);
  EXPECT_NEAR(f.mean[1], coarse0 + (0.5 + 2.0) / 2.0 - coarse0_short, 1e-15);
  EXPECT_DOUBLE_EQ(f.cost, 4.0 + 8.0);
  for (double v : f.variance) EXPECT_GE(v, 0.0);
  SampleSet bad{{1.0, 2.0, 3.0}};
  EXPECT_THROW(mlmc_estimate({l0, bad}, {1.0, 2.0}), DimensionError);
}

TEST(BiFidelity, PrependsReducedLevel) {
  const SampleSet red = random_set(80, 3, 10), l1 = random_set(20, 3, 11), l2 = random_set(5, 3, 12);
  const MomentField a = apmomc_bifidelity(red, {l1, l2}, 0.25, {1.0, 4.0});
  const MomentField b = momc_recursive({red, l1, l2}, {0.25, 1.0, 4.0});
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_DOUBLE_EQ(a.cost, 80 * 0.25 + 20 + 20);
}

TEST(Diagnostics, PerfectCorrelationKillsSigma) {
  const SampleSet lo = random_set(50, 4, 13);
  SampleSet hi(lo.begin(), lo.begin() + 10);
  for (Profile& p : hi) {
    for (double& v : p) v = 2.0 * v + 1.0;
  }
  const HierarchyDiagnostics d = hierarchy_diagnostics({lo, hi}, 0.25);
  EXPECT_NEAR(d.sigma[1], 0.0, 1e-6);
  EXPECT_NEAR(d.rho_mean[1], 1.0, 1e-12);
  EXPECT_NEAR(d.xi[0], d.tau[1], 1e-15);
  EXPECT_EQ(d.xi[1], 1.0);
  EXPECT_NEAR(d.bound, d.xi[0] * d.sigma[0] / std::sqrt(50.0) + d.sigma[1] / std::sqrt(10.0), 1e-15);
}
