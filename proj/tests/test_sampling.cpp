#include <gtest/gtest.h>

#include <cmath>

#include "momc/sampling.hpp"

using namespace momc;

namespace {

DistributionSpec unit() {
  DistributionSpec d;
  d.dims = {{-1.0, 1.0}};
  return d;
}

}  // namespace

TEST(Sampling, CounterBasedAndReproducible) {
  const DistributionSpec d = unit();
  EXPECT_EQ(sample(42, d, 7), sample(42, d, 7));
  EXPECT_NE(sample(42, d, 7), sample(43, d, 7));
  EXPECT_NE(sample(42, d, 7), sample(42, d, 8));
  // Drawing out of order gives the same values.
  const double late = sample(5, d, 999)[0];
  for (std::size_t k = 0; k < 999; ++k) sample(5, d, k);
  EXPECT_EQ(sample(5, d, 999)[0], late);
}

TEST(Sampling, UniformMomentsWithinClt) {
  DistributionSpec d;
  d.dims = {{2.0, 5.0}, {-1.0, 0.0}};
  const std::size_t n = 200000;
  double s0 = 0.0, s1 = 0.0, q0 = 0.0, cross = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::vector<double> z = sample(17, d, k);
    ASSERT_GE(z[0], 2.0);
    ASSERT_LT(z[0], 5.0);
    s0 += z[0];
    s1 += z[1];
    q0 += (z[0] - 3.5) * (z[0] - 3.5);
    cross += (z[0] - 3.5) * (z[1] + 0.5);
  }
  // Mean 3.5, variance 9/12; 5 standard errors.
  EXPECT_NEAR(s0 / n, 3.5, 5.0 * std::sqrt(0.75 / n));
  EXPECT_NEAR(s1 / n, -0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(q0 / n, 0.75, 0.01);
  EXPECT_NEAR(cross / n, 0.0, 5.0 * std::sqrt(0.75 / 12.0 / n));
}

TEST(Sampling, HierarchyRangeCheck) {
  SampleHierarchy h{1, unit(), {40, 10}};
  EXPECT_NO_THROW(sample(h, 39));
  EXPECT_THROW(sample(h, 40), DomainError);
  EXPECT_EQ(sample(h, 3), sample(1, unit(), 3));
}

TEST(Sampling, DistributionValidation) {
  DistributionSpec d;
  EXPECT_THROW(d.validate(), ConfigError);
  d.dims = {{1.0, 1.0}};
  EXPECT_THROW(d.validate(), ConfigError);
}

TEST(Allocation, RatioRule) {
  // Burgers costs 1, 4, 9: r = ceil(9/4) - 1 = 2, then ceil(4/1) - 1 = 3.
  EXPECT_EQ(allocate_samples(10, {1.0, 4.0, 9.0}), (std::vector<std::size_t>{120, 30, 10}));
  // Equal costs still take one extra batch.
  EXPECT_EQ(allocate_samples(8, {2.0, 2.0}), (std::vector<std::size_t>{16, 8}));
  EXPECT_EQ(allocate_samples(5, {3.0}), (std::vector<std::size_t>{5}));
  // SWE 3, 12, 60: r = 4 and 3.
  EXPECT_EQ(allocate_samples(2, {3.0, 12.0, 60.0}), (std::vector<std::size_t>{40, 10, 2}));
  EXPECT_THROW(allocate_samples(1, {1.0}), ConfigError);
  EXPECT_THROW(allocate_samples(4, {4.0, 1.0}), ConfigError);
  EXPECT_THROW(allocate_samples(4, {0.0, 1.0}), ConfigError);
}

TEST(Allocation, CountsAreNestedAndLinearInTop) {
  const std::vector<double> c{0.25, 1.0, 4.0, 12.0};
  const std::vector<std::size_t> a = allocate_samples(4, c), b = allocate_samples(12, c);
  for (std::size_t l = 0; l < c.size(); ++l) {
    EXPECT_EQ(b[l], 3 * a[l]);
    if (l > 0) EXPECT_GE(a[l - 1], 2 * a[l]);
  }
}

TEST(Replication, SeedsAreDistinct) {
  EXPECT_NE(replication_seed(1, 0), replication_seed(1, 1));
  EXPECT_NE(replication_seed(1, 0), replication_seed(2, 0));
  EXPECT_EQ(replication_seed(9, 4), replication_seed(9, 4));
}
