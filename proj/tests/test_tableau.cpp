#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

#include "momc/tableau.hpp"

using namespace momc;

namespace {

std::vector<ImexTableau> all_imex() { return {ars111(), ars222(), si_imex343(), bpr343()}; }

/// R(z) = 1 + z b^T (I - z A)^{-1} 1 via a dense solve.
double eigen_stability(const Matrix& a, const std::vector<double>& b, double z) {
  const std::size_t s = b.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(s, s);
  Eigen::VectorXd bb(s);
  for (std::size_t i = 0; i < s; ++i) {
    bb(i) = b[i];
    for (std::size_t j = 0; j < s; ++j) m(i, j) -= z * a[i][j];
  }
  const Eigen::VectorXd x = m.partialPivLu().solve(Eigen::VectorXd::Ones(s));
  return 1.0 + z * bb.dot(x);
}

/// IMEX integration of y' = f(y) + g(y) with f(y) = cos(t)-like explicit
/// forcing and g(y) = -y^2 + t treated implicitly (scalar Newton per stage).
double integrate_split(const ImexTableau& t, int steps) {
  const double h = 1.0 / steps;
  auto fe = [](double tt, double y) { return std::cos(tt) * y; };
  auto fi = [](double tt, double y) { return -y * y + tt; };
  auto dfi = [](double, double y) { return -2.0 * y; };
  double y = 0.5, time = 0.0;
  const std::size_t s = t.stages();
  for (int n = 0; n < steps; ++n) {
    std::vector<double> ke(s), ki(s);
    for (std::size_t i = 0; i < s; ++i) {
      double base = y;
      for (std::size_t j = 0; j < i; ++j) base += h * (t.ae[i][j] * ke[j] + t.ai[i][j] * ki[j]);
      const double ti = time + t.ci[i] * h;
      double yi = base;
      for (int it = 0; it < 50; ++it) {
        const double r = yi - base - h * t.ai[i][i] * fi(ti, yi);
        yi -= r / (1.0 - h * t.ai[i][i] * dfi(ti, yi));
      }
      ke[i] = fe(time + t.ce[i] * h, yi);
      ki[i] = fi(ti, yi);
    }
    for (std::size_t i = 0; i < s; ++i) y += h * (t.be[i] * ke[i] + t.bi[i] * ki[i]);
    time += h;
  }
  return y;
}

}  // namespace

TEST(Tableau, ExplicitRkOrderConditions) {
  for (int p : {1, 2, 3}) {
    const RkTableau t = explicit_rk(p);
    EXPECT_EQ(t.order, p);
    EXPECT_LT(order_condition_residual(t), 1e-12) << t.name;
    EXPECT_TRUE(is_strictly_lower(t.a));
  }
  EXPECT_THROW(explicit_rk(4), Error);
}

TEST(Tableau, ImexOrderConditionsAndStructure) {
  for (const ImexTableau& t : all_imex()) {
    const TableauReport r = verify(t);
    EXPECT_LT(r.order_residual, 1e-12) << t.name;
    EXPECT_TRUE(r.structure_ok) << t.name;
    EXPECT_LT(r.stiff_accuracy_defect, 1e-12) << t.name;
    for (std::size_t i = 0; i < t.stages(); ++i) {
      double se = 0.0, si = 0.0;
      for (std::size_t j = 0; j < t.stages(); ++j) {
        se += t.ae[i][j];
        si += t.ai[i][j];
      }
      EXPECT_NEAR(se, t.ce[i], 1e-14) << t.name;
      EXPECT_NEAR(si, t.ci[i], 1e-14) << t.name;
    }
  }
}

TEST(Tableau, LStableImplicitParts) {
  for (const ImexTableau& t : {ars222(), si_imex343(), bpr343()}) {
    EXPECT_NEAR(stability_at_infinity(t.ai, t.bi), 0.0, 1e-12) << t.name;
    EXPECT_NEAR(eigen_stability(t.ai, t.bi, -1e9), 0.0, 1e-7) << t.name;
    for (double z : {-0.5, -3.0, -40.0}) {
      EXPECT_NEAR(stability_function(t.ai, t.bi, z), eigen_stability(t.ai, t.bi, z), 1e-12);
      EXPECT_LT(std::abs(eigen_stability(t.ai, t.bi, z)), 1.0) << t.name;
    }
  }
}

TEST(Tableau, ObservedOrderOnSplitOde) {
  for (const ImexTableau& t : all_imex()) {
    const double ref = integrate_split(t, 4096);
    const double e1 = std::abs(integrate_split(t, 32) - ref);
    const double e2 = std::abs(integrate_split(t, 64) - ref);
    EXPECT_GT(std::log2(e1 / e2), t.order - 0.2) << t.name;
  }
}

TEST(Tableau, LookupByName) {
  EXPECT_EQ(imex_tableau_by_name(bpr343().name).stages(), bpr343().stages());
  EXPECT_THROW(imex_tableau_by_name("nope"), Error);
}
