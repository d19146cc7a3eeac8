#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>

#include "momc/banded.hpp"
#include "momc/stepper.hpp"

using namespace momc;

namespace {

ModelSpec model(ModelKind k) {
  ModelSpec m;
  m.kind = k;
  return m;
}

double total(const CellField& f, std::size_t v) {
  double s = 0.0;
  for (double x : f.var(v)) s += x;
  return s * f.grid().dx();
}

}  // namespace

TEST(Banded, MatchesDenseSolveIncludingCorners) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {6u, 17u, 40u}) {
    for (bool cyclic : {false, true}) {
      BandedSystem sys(n, 2);
      Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        for (long d = -2; d <= 2; ++d) {
          long j = static_cast<long>(i) + d;
          if (j < 0 || j >= static_cast<long>(n)) {
            if (!cyclic) continue;
            j = (j + static_cast<long>(n)) % static_cast<long>(n);
          }
          const double v = d == 0 ? 6.0 + u(rng) : u(rng);
          sys.add(i, static_cast<std::size_t>(j), v);
          dense(i, j) += v;
        }
      }
      std::vector<double> rhs(n);
      Eigen::VectorXd b(n);
      for (std::size_t i = 0; i < n; ++i) b(i) = rhs[i] = u(rng);
      const std::vector<double> x = sys.solve(rhs);
      const Eigen::VectorXd ref = dense.partialPivLu().solve(b);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], ref(i), 1e-12);
      EXPECT_NEAR(sys.get(0, 0), dense(0, 0), 0.0);
    }
  }
}

TEST(Banded, SingularPivotIsReported) {
  BandedSystem sys(4, 1);
  sys.add(1, 1, 1.0);
  EXPECT_THROW(sys.solve({1.0, 1.0, 1.0, 1.0}), SingularSystemError);
}

TEST(Advance, LandsExactlyOnFinalTime) {
  const ModelSpec m = model(ModelKind::burgers);
  const AdvanceResult r = advance(m, default_stepper(ModelKind::burgers, 2), Grid1D(-5, 5, 50), 1.0, 0.37);
  EXPECT_EQ(r.time, 0.37);
  EXPECT_GT(r.steps, 0);
  const AdvanceResult z = advance(m, default_stepper(ModelKind::burgers, 2), Grid1D(-5, 5, 50), 1.0, 0.0);
  EXPECT_EQ(z.steps, 0);
  EXPECT_THROW(advance(m, default_stepper(ModelKind::burgers, 2), Grid1D(-5, 5, 50), 1.0, -1.0), DomainError);
}

TEST(Advance, PeriodicBurgersConservesMass) {
  const ModelSpec m = model(ModelKind::burgers);
  for (int order : {1, 2, 3}) {
    StepperConfig cfg = default_stepper(ModelKind::burgers, order);
    cfg.max_steps = 1000;
    const InitialData init = initial_condition(m, Grid1D(-5, 5, 100), 0.8, Boundary::periodic, 3);
    const double m0 = total(init.state, 0);
    CellField u = init.state;
    const StepContext ctx{init.model, init.params, cfg};
    for (int n = 0; n < 1000; ++n) {
      u = step(ctx, u, 0.5 * cfl_dt(m, u, init.params, cfg.cfl, SpeedKind::full));
    }
    EXPECT_LT(std::abs(total(u, 0) - m0) / std::abs(m0), 1e-12) << "order " << order;
  }
}

TEST(Advance, SweLakeAtRestIsAFixedPoint) {
  const ModelSpec m = model(ModelKind::swe);
  const Grid1D g(0.0, 30.0, 60);
  for (int order : {1, 2, 3}) {
    InitialData init = initial_condition(m, g, 0.5, Boundary::transmissive, 3);
    for (std::size_t i = 0; i < g.n_cells(); ++i) init.state(0, i) = 1.0;
    const AdvanceResult r = advance(init, default_stepper(ModelKind::swe, order), 2.0);
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
      EXPECT_NEAR(r.state(0, i), 1.0, 1e-12);
      EXPECT_NEAR(r.state(1, i), 0.0, 1e-12);
    }
  }
}

TEST(Advance, SweMassConservedPeriodic) {
  ModelSpec m = model(ModelKind::swe);
  m.profile = "wave";
  for (int order : {1, 2, 3}) {
    const InitialData init = initial_condition(m, Grid1D(0, 1, 64), 0.0, Boundary::periodic, 3);
    const AdvanceResult r = advance(init, default_stepper(ModelKind::swe, order), 0.2);
    EXPECT_NEAR(total(r.state, 0), total(init.state, 0), 1e-12);
    EXPECT_NEAR(total(r.state, 1), total(init.state, 1), 1e-12);
  }
}

TEST(Advance, ConstantEquilibriumStaysOnEquilibrium) {
  for (ModelKind k : {ModelKind::jinxin, ModelKind::bloodflow}) {
    const ModelSpec m = model(k);
    for (int order : {1, 2, 3}) {
      InitialData init = initial_condition(m, Grid1D(0, 1, 32), 0.3, Boundary::periodic, 3);
      const CellParams c = init.params[0];
      for (std::size_t i = 0; i < 32; ++i) {
        init.params[i] = c;
        State s{0.4, 0.0, 0.0};
        if (k == ModelKind::bloodflow) s = {c.a0, 1e-6, 0.0};
        s = equilibrium_project(m, c, s);
        for (std::size_t v = 0; v < n_vars(k); ++v) init.state(v, i) = s[v];
      }
      if (k == ModelKind::jinxin) init.model.jx_a = 1.0;
      const CellField u0 = init.state;
      const AdvanceResult r = advance(init, default_stepper(k, order), 0.05);
      for (std::size_t i = 0; i < 32; ++i) {
        for (std::size_t v = 0; v < n_vars(k); ++v) {
          EXPECT_NEAR(r.state(v, i), u0(v, i), 1e-12 * (1.0 + std::abs(u0(v, i))));
        }
      }
    }
  }
}

TEST(Advance, StepCountIndependentOfRelaxationTime) {
  // Stiff relaxation times never shrink the step; tau = 1 differs only through
  // the off-equilibrium dynamics it permits.
  for (int order : {1, 2, 3}) {
    std::vector<long> steps;
    for (double tau : {1.0, 1e-6, 1e-12}) {
      ModelSpec m = model(ModelKind::bloodflow);
      m.tau_override = tau;
      steps.push_back(advance(m, default_stepper(ModelKind::bloodflow, order), Grid1D(0, 1, 50), 0.2, 0.05).steps);
    }
    EXPECT_EQ(steps[1], steps[2]);
    EXPECT_LE(std::abs(steps[0] - steps[1]), steps[1] / 5);
  }
}

TEST(Advance, JinXinStiffLimitApproachesBurgers) {
  ModelSpec jx = model(ModelKind::jinxin);
  jx.jx_epsilon = 1e-10;
  const Grid1D g(-5, 5, 200);
  for (int order : {1, 2, 3}) {
    const AdvanceResult a = advance(jx, default_stepper(ModelKind::jinxin, order), g, 0.8, 1.0);
    const AdvanceResult b = advance(model(ModelKind::burgers), default_stepper(ModelKind::burgers, order), g, 0.8, 1.0);
    const double scale = l1_norm(b.state.var(0), g.dx());
    EXPECT_LT(l1_distance(a.state.var(0), b.state.var(0), g.dx()), 5.0 * g.dx() * scale);
  }
}

TEST(Advance, BlowUpIsReported) {
  StepperConfig cfg = default_stepper(ModelKind::burgers, 1);
  cfg.max_steps = 3;
  EXPECT_THROW(advance(model(ModelKind::burgers), cfg, Grid1D(-5, 5, 100), 1.0, 2.5), BlowUpError);
}

TEST(Stepper, PolicyChecks) {
  EXPECT_THROW(check_policy(ModelKind::burgers, ImplicitPolicy::pointwise_relaxation), Error);
  EXPECT_NO_THROW(check_policy(ModelKind::swe, ImplicitPolicy::swe_elliptic));
  EXPECT_EQ(default_stepper(ModelKind::swe, 3).tableau.name, si_imex343().name);
  EXPECT_EQ(default_stepper(ModelKind::bloodflow, 3).tableau.name, bpr343().name);
  EXPECT_FALSE(default_stepper(ModelKind::burgers, 3).imex);
}
