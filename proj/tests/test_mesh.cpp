#include <gtest/gtest.h>

#include <random>

#include "momc/mesh.hpp"

using namespace momc;

TEST(Grid, GeometryAndRefinement) {
  const Grid1D g(-5.0, 5.0, 200);
  EXPECT_DOUBLE_EQ(g.dx(), 0.05);
  EXPECT_DOUBLE_EQ(g.center(0), -4.975);
  EXPECT_DOUBLE_EQ(g.left_face(200), 5.0);
  EXPECT_EQ(g.refined().n_cells(), 400u);
  EXPECT_EQ(g.coarsened(4).n_cells(), 50u);
  EXPECT_THROW(g.coarsened(3), DimensionError);
}

TEST(Grid, RejectsDegenerateInput) {
  EXPECT_THROW(Grid1D(0.0, 1.0, 3), DomainError);
  EXPECT_THROW(Grid1D(1.0, 1.0, 10), DomainError);
  EXPECT_THROW(Grid1D(0.0, INFINITY, 10), DomainError);
}

TEST(CellField, VariableMajorLayout) {
  CellField f(Grid1D(0.0, 1.0, 4), 2, Boundary::periodic);
  f(1, 2) = 7.0;
  EXPECT_EQ(f.raw()[1 * 4 + 2], 7.0);
  EXPECT_EQ(f.var(1)[2], 7.0);
  EXPECT_TRUE(f.all_finite());
  f(0, 0) = NAN;
  EXPECT_FALSE(f.all_finite());
  EXPECT_THROW(CellField(Grid1D(0.0, 1.0, 4), 0, Boundary::periodic), DomainError);
}

TEST(Ghosts, PeriodicWrapsAndTransmissiveCopies) {
  CellField f(Grid1D(0.0, 1.0, 5), 1, Boundary::periodic);
  for (std::size_t i = 0; i < 5; ++i) f(0, i) = static_cast<double>(i);
  const GhostedField p = fill_ghosts(f);
  EXPECT_EQ(p(0, -1), 4.0);
  EXPECT_EQ(p(0, -2), 3.0);
  EXPECT_EQ(p(0, 5), 0.0);
  EXPECT_EQ(p(0, 6), 1.0);

  CellField t(Grid1D(0.0, 1.0, 5), 1, Boundary::transmissive);
  for (std::size_t i = 0; i < 5; ++i) t(0, i) = static_cast<double>(i);
  const GhostedField q = fill_ghosts(t);
  EXPECT_EQ(q(0, -2), 0.0);
  EXPECT_EQ(q(0, 6), 4.0);
  EXPECT_THROW(fill_ghosts(t, 3), StencilError);
}

TEST(Norms, L1DistanceScalesWithDx) {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0}, b{1.0, 0.0, 3.0, 5.0};
  EXPECT_DOUBLE_EQ(l1_distance(a, b, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(l1_norm(a, 0.25), 2.5);
  EXPECT_THROW(l1_distance(a, std::vector<double>{1.0}, 1.0), DimensionError);
}

TEST(Transfer, RestrictionInvertsInjection) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(32);
  for (double& v : c) v = u(rng);
  for (std::size_t f : {1u, 2u, 4u}) {
    const std::vector<double> back = restrict_average(prolongate(c, f), f);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_DOUBLE_EQ(back[i], c[i]);
  }
}

TEST(Transfer, RestrictionPreservesIntegral) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<double> fine(64);
  for (double& v : fine) v = u(rng);
  const std::vector<double> coarse = restrict_average(fine, 4);
  double sf = 0.0, sc = 0.0;
  for (double v : fine) sf += v / 64.0;
  for (double v : coarse) sc += v / 16.0;
  EXPECT_NEAR(sf, sc, 1e-14);
  EXPECT_THROW(restrict_average(fine, 5), DimensionError);
}
