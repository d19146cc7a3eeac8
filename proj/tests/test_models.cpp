#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <random>

#include "momc/fluxes.hpp"
#include "momc/models.hpp"

using namespace momc;

namespace {

// Diagonal similarity balancing the pressure coupling, which spans ~16 decades.
std::vector<double> eigen_spectrum(const Mat3& a, std::size_t n) {
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  if (n == 3 && a[1][2] != 0.0 && a[2][1] != 0.0) d(2) = std::sqrt(std::abs(a[1][2] / a[2][1]));
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = d(i) / d(j) * a[i][j];
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  std::vector<double> out;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    EXPECT_NEAR(es.eigenvalues()[k].imag(), 0.0, 1e-9);
    out.push_back(es.eigenvalues()[k].real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

double spectral_radius(const std::vector<double>& ev) {
  double r = 0.0;
  for (double e : ev) r = std::max(r, std::abs(e));
  return r;
}

ModelSpec model(ModelKind k) {
  ModelSpec m;
  m.kind = k;
  return m;
}

}  // namespace

TEST(Flux, JinXinLinearFlux) {
  ModelSpec m = model(ModelKind::jinxin);
  m.jx_a = 2.0;
  const State f = physical_flux(m, {1.0, 3.0, 0.0});
  EXPECT_EQ(f[0], 3.0);
  EXPECT_EQ(f[1], 4.0);
}

TEST(Flux, BurgersAndSweValues) {
  EXPECT_EQ(physical_flux(model(ModelKind::burgers), {3.0, 0, 0})[0], 4.5);
  const State f = physical_flux(model(ModelKind::swe), {2.0, 4.0, 0.0});
  EXPECT_EQ(f[0], 4.0);
  EXPECT_EQ(f[1], 8.0);
  EXPECT_THROW(physical_flux(model(ModelKind::swe), {0.0, 1.0, 0.0}), PositivityError);
}

TEST(Relaxation, SourceVanishesOnEquilibrium) {
  const ModelSpec m = model(ModelKind::jinxin);
  EXPECT_EQ(relaxation_source(m, {}, {2.0, 5.0, 0.0}).source[1], 3.0);
  EXPECT_EQ(relaxation_source(m, {}, {2.0, 2.0, 0.0}).source[1], 0.0);
  const State p = equilibrium_project(m, {}, {1.0, 7.0, 0.0});
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], 0.5);
  EXPECT_EQ(relaxation_source(model(ModelKind::burgers), {}, {1.0, 0, 0}).source[0], 0.0);
}

TEST(Relaxation, BloodFlowEquilibriumIsTubeLaw) {
  ModelSpec m = model(ModelKind::bloodflow);
  const PointData d = initial_state_at(m, 0.3, 0.2);
  State s = d.state;
  s = equilibrium_project(m, d.params, s);
  EXPECT_NEAR(s[2], elastic_pressure(m, d.params, s[0]), 1e-9);
  EXPECT_NEAR(relaxation_source(m, d.params, s).source[2], 0.0, 1e-9);
}

TEST(TubeLaw, DerivativeOfFIsG) {
  const double a0 = 5e-4, h0 = 0.0015;
  for (double a : {3e-4, 5e-4, 8e-4}) {
    const double h = 1e-9;
    const double fd = (tube_f(a + h, a0, h0) - tube_f(a - h, a0, h0)) / (2.0 * h);
    EXPECT_NEAR(fd, tube_g(a, a0, h0), 1e-6 * tube_g(a, a0, h0));
  }
  EXPECT_EQ(tube_f(a0, a0, h0), 0.0);
}

TEST(Spectrum, WaveSpeedsMatchEigenvalueOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    ModelSpec sw = model(ModelKind::swe);
    sw.froude = 0.3 + 0.5 * std::abs(u(rng));
    const State s{1.0 + 0.5 * u(rng), 0.3 * u(rng), 0.0};
    EXPECT_NEAR(max_wave_speed(sw, {}, s), spectral_radius(eigen_spectrum(quasilinear_matrix(sw, {}, s), 2)),
                1e-10);

    ModelSpec jx = model(ModelKind::jinxin);
    jx.jx_a = 0.5 + std::abs(u(rng));
    EXPECT_NEAR(max_wave_speed(jx, {}, s), spectral_radius(eigen_spectrum(quasilinear_matrix(jx, {}, s), 2)),
                1e-12);

    for (ModelKind k : {ModelKind::bloodflow, ModelKind::bloodflow_elastic}) {
      const ModelSpec bf = model(k);
      const PointData d = initial_state_at(bf, 0.5 + 0.5 * u(rng), u(rng));
      const State q{d.state[0], d.state[1] * (1.0 + 50.0 * u(rng)), d.state[2]};
      const std::vector<double> ev = eigen_spectrum(quasilinear_matrix(bf, d.params, q), n_vars(k));
      const double r = spectral_radius(ev);
      EXPECT_NEAR(max_wave_speed(bf, d.params, q), r, 1e-9 * r);
      if (k == ModelKind::bloodflow) {
        auto mine = bloodflow_eigenvalues(bf, d.params, q);
        std::vector<double> v(mine.begin(), mine.end());
        std::sort(v.begin(), v.end());
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(v[i], ev[i], 1e-9 * r);
      }
    }
  }
}

TEST(Spectrum, SweExplicitPartSpeed) {
  const ModelSpec m = model(ModelKind::swe);
  const State s{2.0, -3.0, 0.0};
  EXPECT_DOUBLE_EQ(max_wave_speed(m, {}, s, SpeedKind::explicit_part), 3.0);
}

TEST(Reduced, LimitModels) {
  EXPECT_EQ(reduced_model_of(model(ModelKind::jinxin)).kind, ModelKind::burgers);
  EXPECT_EQ(reduced_model_of(model(ModelKind::bloodflow)).kind, ModelKind::bloodflow_elastic);
  EXPECT_THROW(reduced_model_of(model(ModelKind::swe)), UnsupportedError);
  EXPECT_TRUE(is_reduced_of(model(ModelKind::jinxin), model(ModelKind::burgers)));
}

TEST(Reduced, StiffLimitOfTheFullModel) {
  const ModelSpec jx = limit_model_of(model(ModelKind::jinxin));
  EXPECT_EQ(jx.kind, ModelKind::jinxin);
  EXPECT_EQ(jx.jx_epsilon, 0.0);
  const ModelSpec bf = limit_model_of(model(ModelKind::bloodflow));
  EXPECT_EQ(bf.kind, ModelKind::bloodflow);
  EXPECT_EQ(bf.tau_override, 0.0);
  EXPECT_TRUE(bf.equilibrium_pressure);
  EXPECT_THROW(limit_model_of(model(ModelKind::burgers)), UnsupportedError);
}

TEST(Initial, EquilibriumPressureOption) {
  ModelSpec m = model(ModelKind::bloodflow);
  m.equilibrium_pressure = true;
  for (double x : {0.1, 0.4, 0.8}) {
    const PointData d = initial_state_at(m, x, 0.5);
    EXPECT_NEAR(d.state[2], elastic_pressure(m, d.params, d.state[0]), 1e-12 * (1.0 + std::abs(d.state[2])));
  }
}

TEST(Initial, BurgersGaussian) {
  const Grid1D g(-5.0, 5.0, 200);
  const InitialData d = initial_condition(model(ModelKind::burgers), g, 1.0, Boundary::transmissive, 1);
  for (std::size_t i = 0; i < g.n_cells(); i += 17) {
    const double x = g.center(i);
    EXPECT_NEAR(d.state(0, i), std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  }
  EXPECT_THROW(initial_state_at(model(ModelKind::burgers), 0.0, 0.0), DomainError);
}

TEST(Initial, GaussAveragesAreCellAverages) {
  // Three-point Gauss integrates the quadratic x -> x^2 terms exactly; compare
  // against a fine midpoint sum of the Gaussian.
  const Grid1D g(-5.0, 5.0, 20);
  const InitialData d = initial_condition(model(ModelKind::burgers), g, 0.7, Boundary::transmissive, 3);
  for (std::size_t i = 0; i < g.n_cells(); ++i) {
    double s = 0.0;
    const int k = 4000;
    for (int j = 0; j < k; ++j) {
      s += burgers_gaussian(g.left_face(i) + (j + 0.5) * g.dx() / k, 0.7);
    }
    EXPECT_NEAR(d.state(0, i), s / k, 2e-4);
  }
}

TEST(Initial, JinXinStartsOnEquilibriumAndSubcharacteristic) {
  const Grid1D g(-5.0, 5.0, 100);
  const InitialData d = initial_condition(model(ModelKind::jinxin), g, 0.5, Boundary::transmissive, 1);
  double umax = 0.0;
  for (std::size_t i = 0; i < g.n_cells(); ++i) {
    EXPECT_DOUBLE_EQ(d.state(1, i), 0.5 * d.state(0, i) * d.state(0, i));
    umax = std::max(umax, std::abs(d.state(0, i)));
  }
  EXPECT_GT(d.model.jx_a * d.model.jx_a, umax * umax);
  ModelSpec bad = model(ModelKind::jinxin);
  bad.jx_a = 0.1;
  EXPECT_THROW(initial_condition(bad, g, 0.5, Boundary::transmissive), DomainError);
}

TEST(Initial, SweAtRestAndBloodFlowPositive) {
  const ModelSpec sw = model(ModelKind::swe);
  const Grid1D g(0.0, 30.0, 60);
  const InitialData d = initial_condition(sw, g, 0.4, Boundary::transmissive);
  for (std::size_t i = 0; i < g.n_cells(); ++i) {
    EXPECT_GT(d.state(0, i), 1.0);
    EXPECT_EQ(d.state(1, i), 0.0);
  }
  const ModelSpec bf = model(ModelKind::bloodflow);
  const InitialData b = initial_condition(bf, Grid1D(0.0, 1.0, 50), -0.9, Boundary::periodic);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_GT(b.state(0, i), 0.0);
    EXPECT_GT(b.params[i].tau, 0.0);
  }
}
