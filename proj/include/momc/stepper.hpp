#pragma once

// Time integration: CFL control, explicit RK and IMEX-RK steps with the
// implicit stage solvers (pointwise relaxation, SWE pressure equation), and
// the fixed-horizon time march.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "momc/banded.hpp"
#include "momc/errors.hpp"
#include "momc/mesh.hpp"
#include "momc/models.hpp"
#include "momc/residual.hpp"
#include "momc/tableau.hpp"

namespace momc {

enum class ImplicitPolicy { none, pointwise_relaxation, swe_elliptic };

inline const char* to_string(ImplicitPolicy p) {
  switch (p) {
    case ImplicitPolicy::none: return "none";
    case ImplicitPolicy::pointwise_relaxation: return "pointwise_relaxation";
    case ImplicitPolicy::swe_elliptic: return "swe_elliptic";
  }
  return "?";
}

struct StepperConfig {
  double cfl = 0.9;
  SpatialScheme spatial;
  bool imex = false;
  RkTableau rk = forward_euler();
  ImexTableau tableau = ars111();
  ImplicitPolicy policy = ImplicitPolicy::none;
  long max_steps = 10'000'000;
  int ic_quadrature = 3;  ///< Gauss points for initial cell averages

  int order() const { return spatial.order; }
};

/// Solver triple of each benchmark family at design order 1, 2 or 3.
inline StepperConfig default_stepper(ModelKind kind, int order) {
  checked_order(order);
  StepperConfig c;
  c.spatial.order = order;
  c.spatial.flux = default_flux(kind);
  switch (kind) {
    case ModelKind::burgers:
    case ModelKind::bloodflow_elastic: c.rk = explicit_rk(order); break;
    case ModelKind::jinxin:
    case ModelKind::bloodflow:
      c.imex = true;
      c.policy = ImplicitPolicy::pointwise_relaxation;
      c.tableau = order == 1 ? ars111() : order == 2 ? ars222() : bpr343();
      break;
    case ModelKind::swe:
      c.imex = true;
      c.policy = ImplicitPolicy::swe_elliptic;
      c.spatial.speed = SpeedKind::explicit_part;
      c.tableau = order == 1 ? ars111() : order == 2 ? ars222() : si_imex343();
      break;
  }
  return c;
}

inline void check_policy(ModelKind kind, ImplicitPolicy p) {
  if (p == ImplicitPolicy::pointwise_relaxation && !has_relaxation(kind)) {
    throw UnsupportedError(std::string("pointwise relaxation needs a relaxation model, got ") +
                           to_string(kind));
  }
  if (p == ImplicitPolicy::swe_elliptic && kind != ModelKind::swe) {
    throw UnsupportedError(std::string("elliptic pressure solve needs SWE, got ") +
                           to_string(kind));
  }
  if (p == ImplicitPolicy::none && has_relaxation(kind)) {
    throw UnsupportedError(std::string("model ") + to_string(kind) +
                           " has a stiff source and needs the relaxation policy");
  }
}

/// Largest explicitly treated wave speed over the cells.
inline double max_speed(const ModelSpec& m, const CellField& f, std::span<const CellParams> params,
                        SpeedKind kind) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.n_cells(); ++i) {
    const double si = max_wave_speed(m, params[i], cell_state(f, i), kind);
    if (!std::isfinite(si)) throw BlowUpError("nonfinite wave speed", 0);
    s = std::max(s, si);
  }
  return s;
}

inline double cfl_dt(const ModelSpec& m, const CellField& f, std::span<const CellParams> params,
                     double cfl, SpeedKind kind = SpeedKind::full) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw DomainError("CFL number must lie in (0, 1]");
  const double s = max_speed(m, f, params, kind);
  const double dx = f.grid().dx();
  if (s < 1e-12) return cfl * dx;
  return cfl * dx / s;
}

/// Semi-discrete operator L(U) applied in a stage.
using ResidualFn = std::function<CellField(const CellField&)>;

inline void axpy(CellField& y, double a, const CellField& x) {
  std::vector<double>& yr = y.raw();
  const std::vector<double>& xr = x.raw();
  for (std::size_t k = 0; k < yr.size(); ++k) yr[k] += a * xr[k];
}

inline CellField explicit_rk_step(const RkTableau& t, const ResidualFn& residual,
                                  const CellField& u, double dt) {
  const std::size_t s = t.stages();
  std::vector<CellField> k;
  k.reserve(s);
  for (std::size_t i = 0; i < s; ++i) {
    CellField stage = u;
    for (std::size_t j = 0; j < i; ++j) {
      if (t.a[i][j] != 0.0) axpy(stage, dt * t.a[i][j], k[j]);
    }
    k.push_back(residual(stage));
  }
  CellField out = u;
  for (std::size_t i = 0; i < s; ++i) {
    if (t.b[i] != 0.0) axpy(out, dt * t.b[i], k[i]);
  }
  return out;
}

inline CellField explicit_rk_step(int order, const ResidualFn& residual, const CellField& u,
                                  double dt) {
  return explicit_rk_step(explicit_rk(order), residual, u, dt);
}

// ---------------------------------------------------------------------------
// SWE pressure step.

namespace detail {

inline double face_interp(const GhostedField& g, std::size_t v, long i, int order) {
  // Point value at x_{i+1/2} from cell averages.
  if (order == 3) {
    return (-g(v, i - 1) + 7.0 * g(v, i) + 7.0 * g(v, i + 1) - g(v, i + 2)) / 12.0;
  }
  return 0.5 * (g(v, i) + g(v, i + 1));
}

}  // namespace detail

/// Solves eta - theta^2/Fr^2 d/dx(h d eta/dx) = rhs_eta - theta d/dx(Q*) and
/// back-substitutes the momentum, given the explicit stage data `r`
/// (theta = dt * a_kk). Returns the stage solution.
inline CellField swe_pressure_stage(const ModelSpec& m, const CellField& r, double theta,
                                    int order) {
  const std::size_t n = r.n_cells();
  const double dx = r.grid().dx();
  const double fr2 = m.froude_number() * m.froude_number();
  const Boundary bc = r.boundary();
  const GhostedField rg = fill_ghosts(r, kGhostWidth);
  const std::size_t half_band = order == 3 ? 2 : 1;

  // Face momentum predictor, face k at x_{k-1/2}.
  std::vector<double> qstar(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    qstar[k] = detail::face_interp(rg, 1, static_cast<long>(k) - 1, order);
  }

  // Face-gradient stencil on cells (i-1, i, i+1, i+2) for the face x_{i+1/2}.
  std::vector<std::pair<long, double>> grad;
  if (order == 3) {
    grad = {{-1, 1.0 / (12.0 * dx)}, {0, -15.0 / (12.0 * dx)}, {1, 15.0 / (12.0 * dx)},
            {2, -1.0 / (12.0 * dx)}};
  } else {
    grad = {{0, -1.0 / dx}, {1, 1.0 / dx}};
  }

  CellField eta_field(r.grid(), 1, bc);
  for (std::size_t i = 0; i < n; ++i) eta_field(0, i) = r(0, i);
  std::vector<double> eta(n);
  const double coef = theta * theta / fr2;
  for (int it = 0; it < 50; ++it) {
    const GhostedField hg = fill_ghosts(eta_field, kGhostWidth);
    std::vector<double> hface(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      hface[k] = detail::face_interp(hg, 0, static_cast<long>(k) - 1, order);
      if (!(hface[k] > 0.0)) throw PositivityError("nonpositive face depth in pressure solve");
    }
    BandedSystem sys(n, half_band);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const long li = static_cast<long>(i);
      sys.add(i, i, 1.0);
      rhs[i] = r(0, i) - theta * (qstar[i + 1] - qstar[i]) / dx;
      // - coef/dx * (h_{i+1/2} G_{i+1/2} - h_{i-1/2} G_{i-1/2})
      for (int side = 0; side < 2; ++side) {
        const long face_cell = side == 0 ? li : li - 1;  // face x_{face_cell + 1/2}
        const double h = hface[static_cast<std::size_t>(face_cell + 1)];
        const double sign = side == 0 ? -1.0 : 1.0;
        for (const auto& [off, w] : grad) {
          const long col = face_cell + off;
          // Ghost cells fold onto their source cell (copy or wrap).
          sys.add(i, boundary_index(col, n, bc), sign * coef * h * w / dx);
        }
      }
    }
    eta = sys.solve(rhs);
    double change = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      change = std::max(change, std::abs(eta[i] - eta_field(0, i)));
      scale = std::max(scale, std::abs(eta[i]));
      eta_field(0, i) = eta[i];
    }
    if (!std::isfinite(change)) throw BlowUpError("nonfinite pressure solve", 0);
    if (change <= 1e-14 * std::max(scale, 1.0)) break;
  }

  // Momentum back-substitution with the cell average of h d eta/dx.
  const GhostedField eg = fill_ghosts(eta_field, kGhostWidth);
  CellField out = r;
  for (std::size_t i = 0; i < n; ++i) {
    const long li = static_cast<long>(i);
    double hgrad;
    if (order == 3) {
      const double d1 =
          (eg(0, li - 2) - 8.0 * eg(0, li - 1) + 8.0 * eg(0, li + 1) - eg(0, li + 2)) /
          (12.0 * dx);
      const double hx = (eg(0, li + 1) - eg(0, li - 1)) / (2.0 * dx);
      const double exx = (eg(0, li + 1) - 2.0 * eg(0, li) + eg(0, li - 1)) / (dx * dx);
      hgrad = eg(0, li) * d1 + dx * dx / 12.0 * hx * exx;
    } else {
      hgrad = eg(0, li) * (eg(0, li + 1) - eg(0, li - 1)) / (2.0 * dx);
    }
    out(0, i) = eta[i];
    out(1, i) = r(1, i) - theta / fr2 * hgrad;
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Everything a stage needs besides the state: the model, per-cell material
/// data and the scheme.
struct StepContext {
  const ModelSpec& model;
  std::span<const CellParams> params;
  const StepperConfig& config;
};

inline CellField evaluate_residual(const StepContext& ctx, const CellField& u) {
  return explicit_residual(ctx.model, u, ctx.params, ctx.config.spatial);
}

/// One IMEX-RK step. The implicit part must be stiffly accurate; the update
/// is U^{n+1} = U^(s) + dt sum_j (b~_j - a~_sj) E_j.
inline CellField imex_step(const StepContext& ctx, const CellField& u, double dt) {
  const ImexTableau& t = ctx.config.tableau;
  const ModelSpec& m = ctx.model;
  const ImplicitPolicy policy = ctx.config.policy;
  check_policy(m.kind, policy);
  if (stiff_accuracy_defect(t.ai, t.bi) > 1e-14) {
    throw UnsupportedError("IMEX step requires a stiffly accurate implicit tableau");
  }
  const std::size_t s = t.stages();
  const std::size_t n = u.n_cells();
  std::vector<CellField> e;        // explicit residuals
  std::vector<CellField> k_impl;   // implicit operator values (SWE policy)
  std::vector<std::vector<double>> dev;  // relaxation deviations p - p_eq
  e.reserve(s);

  std::size_t rv = 0;
  if (policy == ImplicitPolicy::pointwise_relaxation) rv = relaxed_var(m.kind);

  CellField stage = u;
  for (std::size_t k = 0; k < s; ++k) {
    CellField r = u;
    for (std::size_t j = 0; j < k; ++j) {
      if (t.ae[k][j] != 0.0) axpy(r, dt * t.ae[k][j], e[j]);
    }
    const double akk = t.ai[k][k];
    switch (policy) {
      case ImplicitPolicy::none: stage = r; break;
      case ImplicitPolicy::pointwise_relaxation: {
        stage = r;
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) {
          const CellParams& c = ctx.params[i];
          const double tau = c.tau;
          double hist = 0.0;  // sum_{j<k} a_kj d_j
          for (std::size_t j = 0; j < k; ++j) hist += t.ai[k][j] * dev[j][i];
          State q = cell_state(r, i);
          const double peq = relaxation_equilibrium(m, c, q);
          double p;
          if (akk == 0.0) {
            if (k > 0 && hist != 0.0 && tau == 0.0) {
              throw UnsupportedError("explicit stage with history cannot relax at tau = 0");
            }
            p = tau > 0.0 ? r(rv, i) - dt * hist / tau : r(rv, i);
          } else {
            p = (tau * r(rv, i) - dt * hist + dt * akk * peq) / (tau + dt * akk);
          }
          stage(rv, i) = p;
          d[i] = p - peq;
        }
        dev.push_back(std::move(d));
        break;
      }
      case ImplicitPolicy::swe_elliptic: {
        if (akk == 0.0) {
          for (std::size_t j = 0; j < s; ++j) {
            if (j != k && t.ai[j][k] != 0.0) {
              throw UnsupportedError("SWE pressure solve needs an explicit first implicit column");
            }
          }
          stage = r;
          k_impl.emplace_back(u.grid(), u.n_vars(), u.boundary());
          break;
        }
        for (std::size_t j = 0; j < k; ++j) {
          if (t.ai[k][j] != 0.0) axpy(r, dt * t.ai[k][j], k_impl[j]);
        }
        stage = swe_pressure_stage(m, r, dt * akk, ctx.config.order());
        CellField kk = stage;
        axpy(kk, -1.0, r);
        for (double& v : kk.raw()) v /= dt * akk;
        k_impl.push_back(std::move(kk));
        break;
      }
    }
    if (!stage.all_finite()) throw BlowUpError("nonfinite stage value", 0);
    e.push_back(evaluate_residual(ctx, stage));
  }
  CellField out = stage;
  for (std::size_t j = 0; j < s; ++j) {
    const double w = t.be[j] - t.ae[s - 1][j];
    if (w != 0.0) axpy(out, dt * w, e[j]);
  }
  return out;
}

inline CellField step(const StepContext& ctx, const CellField& u, double dt) {
  if (ctx.config.imex) return imex_step(ctx, u, dt);
  check_policy(ctx.model.kind, ImplicitPolicy::none);
  return explicit_rk_step(
      ctx.config.rk, [&](const CellField& v) { return evaluate_residual(ctx, v); }, u, dt);
}

inline SpeedKind cfl_speed_kind(const StepperConfig& c) {
  return c.policy == ImplicitPolicy::swe_elliptic ? SpeedKind::explicit_part : SpeedKind::full;
}

struct AdvanceResult {
  CellField state;
  long steps = 0;
  double time = 0.0;
};

/// Marches the initial data to t_end, landing exactly on t_end.
inline AdvanceResult advance(const InitialData& init, const StepperConfig& cfg, double t_end) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be finite and >= 0");
  AdvanceResult res{init.state, 0, 0.0};
  if (t_end == 0.0) return res;
  const StepContext ctx{init.model, init.params, cfg};
  const double min_dt = 1e-12 * t_end;
  double t = 0.0;
  while (t < t_end) {
    if (res.steps >= cfg.max_steps) {
      throw BlowUpError("step count cap of " + std::to_string(cfg.max_steps) + " reached",
                        res.steps);
    }
    double dt;
    try {
      dt = cfl_dt(init.model, res.state, init.params, cfg.cfl, cfl_speed_kind(cfg));
    } catch (const PositivityError& e) {
      throw BlowUpError(e.what(), res.steps);
    }
    dt = std::max(dt, min_dt);
    const bool last = t + dt >= t_end;
    if (last) dt = t_end - t;
    try {
      res.state = step(ctx, res.state, dt);
    } catch (const PositivityError& e) {
      throw BlowUpError(e.what(), res.steps);
    } catch (const BlowUpError& e) {
      throw BlowUpError(e.what(), res.steps);
    }
    if (!res.state.all_finite()) throw BlowUpError("nonfinite state", res.steps);
    ++res.steps;
    t = last ? t_end : t + dt;
  }
  res.time = t;
  return res;
}

inline AdvanceResult advance(const ModelSpec& model, const StepperConfig& cfg, const Grid1D& grid,
                             double z, double t_end,
                             std::optional<Boundary> boundary = std::nullopt) {
  const InitialData init = initial_condition(model, grid, z, boundary.value_or(default_boundary(model)),
                                             cfg.ic_quadrature);
  return advance(init, cfg, t_end);
}

}  // namespace momc
