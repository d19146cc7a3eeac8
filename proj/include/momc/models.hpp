#pragma once

// PDE systems: conservative fluxes, nonconservative products, stiff relaxation
// sources, wave speeds, equilibrium manifolds, reduced models and the
// z-parameterized initial data of the benchmark problems.
//
// Variables (all dimensionless):
//   Burgers            u
//   JinXin             u, v           v relaxes to F(u) = u^2/2 at rate 1/epsilon
//   SWE                eta, hu        flat bottom, h = eta
//   BloodFlow          A, q, p        p relaxes to the elastic tube law at rate 1/tau_r
//   BloodFlowElastic   A, q           p = p0 + (Einf/Re) F(A) is a derived quantity

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "momc/errors.hpp"
#include "momc/mesh.hpp"

namespace momc {

enum class ModelKind { burgers, jinxin, swe, bloodflow, bloodflow_elastic };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::burgers: return "burgers";
    case ModelKind::jinxin: return "jinxin";
    case ModelKind::swe: return "swe";
    case ModelKind::bloodflow: return "bloodflow";
    case ModelKind::bloodflow_elastic: return "bloodflow_elastic";
  }
  return "?";
}

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "burgers") return ModelKind::burgers;
  if (s == "jinxin") return ModelKind::jinxin;
  if (s == "swe") return ModelKind::swe;
  if (s == "bloodflow") return ModelKind::bloodflow;
  if (s == "bloodflow_elastic") return ModelKind::bloodflow_elastic;
  throw ConfigError("unknown model kind '" + s + "'");
}

using State = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Pointwise material data. Only blood flow uses the vessel fields; tau is the
/// relaxation time of the stiff source (epsilon for JinXin, tau_r for blood flow).
struct CellParams {
  double a0 = 0.0;
  double p0 = 0.0;
  double e0 = 0.0;
  double einf = 0.0;
  double tau = 0.0;
};

inline CellParams average(const CellParams& l, const CellParams& r) {
  return {0.5 * (l.a0 + r.a0), 0.5 * (l.p0 + r.p0), 0.5 * (l.e0 + r.e0),
          0.5 * (l.einf + r.einf), 0.5 * (l.tau + r.tau)};
}

/// Characteristic scales used to render dimensional blood-flow inputs dimensionless.
struct BloodFlowScales {
  double length = 1.0;
  double time = 1.0;
  double density = 1.0;
  double area = 1.0;
  double viscosity = 1.0;

  double velocity() const { return length / time; }
  double elasticity() const { return viscosity / time; }
  double pressure() const { return density * velocity() * velocity(); }
  double reynolds() const { return density * velocity() * length / viscosity; }
};

/// Characteristic scales for the shallow water system; Froude number follows
/// from gravity when one is given.
struct SweScales {
  double length = 1.0;
  double time = 1.0;
  double depth = 1.0;
};

struct ModelSpec {
  ModelKind kind = ModelKind::burgers;

  /// Initial-data family. "benchmark" selects the benchmark data of each model;
  /// "wave" selects a smooth periodic travelling wave used for order studies.
  std::string profile = "benchmark";

  // JinXin. a <= 0 selects a = 1.05 max|u0| per realization.
  double jx_a = 0.0;
  double jx_epsilon = 1e-6;

  // Shallow water.
  double froude = 1.0;
  std::optional<double> gravity;  // dimensional g; overrides froude with the scales
  SweScales swe_scales;
  double wave_amplitude = 0.05;
  double wave_velocity = 1.0;

  // Blood flow, dimensional inputs.
  int bf_test = 1;
  double rho = 1050.0;
  double h0 = 0.0015;
  double eta = 5e5;
  double area_amplitude = 1e-4;
  std::optional<double> tau_override;  // dimensionless tau_r applied in every cell
  bool equilibrium_pressure = false;    // start p on the elastic tube law instead of the listed p(x, 0)
  BloodFlowScales bf_scales;

  double rho_nd() const { return rho / bf_scales.density; }
  double h0_nd() const { return h0 / std::sqrt(bf_scales.area); }
  double reynolds() const { return bf_scales.reynolds(); }
  double froude_number() const {
    if (gravity) {
      const double u = swe_scales.length / swe_scales.time;
      return u / std::sqrt(*gravity * swe_scales.depth);
    }
    return froude;
  }
};

inline std::size_t n_vars(ModelKind k) {
  switch (k) {
    case ModelKind::burgers: return 1;
    case ModelKind::jinxin: return 2;
    case ModelKind::swe: return 2;
    case ModelKind::bloodflow: return 3;
    case ModelKind::bloodflow_elastic: return 2;
  }
  return 0;
}

inline std::vector<std::string> var_names(ModelKind k) {
  switch (k) {
    case ModelKind::burgers: return {"u"};
    case ModelKind::jinxin: return {"u", "v"};
    case ModelKind::swe: return {"eta", "hu"};
    case ModelKind::bloodflow: return {"A", "q", "p"};
    case ModelKind::bloodflow_elastic: return {"A", "q"};
  }
  return {};
}

inline bool has_relaxation(ModelKind k) {
  return k == ModelKind::jinxin || k == ModelKind::bloodflow;
}

/// Index of the variable driven by the stiff source.
inline std::size_t relaxed_var(ModelKind k) {
  if (k == ModelKind::jinxin) return 1;
  if (k == ModelKind::bloodflow) return 2;
  throw UnsupportedError(std::string("model ") + to_string(k) + " has no relaxation source");
}

// ---------------------------------------------------------------------------
// Tube law.

/// G(A) = h0 sqrt(pi) / (2 A0 sqrt(A)).
inline double tube_g(double area, double a0, double h0) {
  return h0 * std::sqrt(std::numbers::pi) / (2.0 * a0 * std::sqrt(area));
}

/// F(A) = (h0 sqrt(pi) / A0) (sqrt(A) - sqrt(A0)); note dF/dA = G(A).
inline double tube_f(double area, double a0, double h0) {
  return h0 * std::sqrt(std::numbers::pi) / a0 * (std::sqrt(area) - std::sqrt(a0));
}

inline double elastic_pressure(const ModelSpec& m, const CellParams& c, double area) {
  return c.p0 + c.einf / m.reynolds() * tube_f(area, c.a0, m.h0_nd());
}

inline double jx_flux(double u) { return 0.5 * u * u; }
inline double jx_flux_derivative(double u) { return u; }

// ---------------------------------------------------------------------------

inline void check_admissible(const ModelSpec& m, const State& s) {
  const std::size_t n = n_vars(m.kind);
  for (std::size_t v = 0; v < n; ++v) {
    if (!std::isfinite(s[v])) throw PositivityError("nonfinite state component");
  }
  if (m.kind == ModelKind::swe && !(s[0] > 0.0)) {
    throw PositivityError("nonpositive water depth h = " + std::to_string(s[0]));
  }
  if ((m.kind == ModelKind::bloodflow || m.kind == ModelKind::bloodflow_elastic) &&
      !(s[0] > 0.0)) {
    throw PositivityError("nonpositive cross-sectional area A = " + std::to_string(s[0]));
  }
}

/// Conservative part of the flux. Nonconservative products are returned by
/// quasilinear_terms.
inline State physical_flux(const ModelSpec& m, const State& s) {
  check_admissible(m, s);
  switch (m.kind) {
    case ModelKind::burgers: return {0.5 * s[0] * s[0], 0.0, 0.0};
    case ModelKind::jinxin: return {s[1], m.jx_a * m.jx_a * s[0], 0.0};
    case ModelKind::swe: return {s[1], s[1] * s[1] / s[0], 0.0};
    case ModelKind::bloodflow:
    case ModelKind::bloodflow_elastic: return {s[1], s[1] * s[1] / s[0], 0.0};
  }
  return {};
}

/// Variables whose interface values feed the nonconservative products
/// (eta for SWE, pressure and flow rate for blood flow).
inline State gradient_variables(const ModelSpec& m, const CellParams& c, const State& s) {
  if (m.kind == ModelKind::bloodflow_elastic) return {s[0], s[1], elastic_pressure(m, c, s[0])};
  return s;
}

/// One nonconservative product B(q) d(g)/dx: it enters equation `target`,
/// differentiates gradient variable `gvar` and is weighted by `coefficient`.
struct NonconservativeTerm {
  std::size_t target;
  std::size_t gvar;
};

/// Nonconservative products of a model. SWE's pressure term is listed even
/// though the IMEX splitting moves it into the implicit operator.
inline std::vector<NonconservativeTerm> nonconservative_terms(ModelKind k) {
  switch (k) {
    case ModelKind::swe: return {{1, 0}};
    case ModelKind::bloodflow: return {{1, 2}, {2, 1}};
    case ModelKind::bloodflow_elastic: return {{1, 2}};
    default: return {};
  }
}

/// Coefficient B(q) of a nonconservative product.
inline double nonconservative_coefficient(const ModelSpec& m, const CellParams& c,
                                          const State& s, const NonconservativeTerm& t) {
  switch (m.kind) {
    case ModelKind::swe: {
      const double fr = m.froude_number();
      return s[0] / (fr * fr);
    }
    case ModelKind::bloodflow:
      if (t.target == 1) return s[0] / m.rho_nd();
      return c.e0 / m.reynolds() * tube_g(s[0], c.a0, m.h0_nd());
    case ModelKind::bloodflow_elastic: return s[0] / m.rho_nd();
    default: return 0.0;
  }
}

/// Cell-centred nonconservative products B(q) dg/dx. `g_left`/`g_right` are
/// the gradient variables at the cell's left and right faces; the coefficient
/// is evaluated with the cell value. The products sit on the left-hand side,
/// so the residual subtracts them.
inline State quasilinear_terms(const ModelSpec& m, const CellParams& c, const State& cell,
                               const State& g_left, const State& g_right, double dx) {
  check_admissible(m, cell);
  State out{};
  for (const NonconservativeTerm& t : nonconservative_terms(m.kind)) {
    out[t.target] += nonconservative_coefficient(m, c, cell, t) *
                     (g_right[t.gvar] - g_left[t.gvar]) / dx;
  }
  return out;
}

/// Quasilinear matrix dF/dq + B(q) of the full (convective + pressure) system.
inline Mat3 quasilinear_matrix(const ModelSpec& m, const CellParams& c, const State& s) {
  check_admissible(m, s);
  Mat3 a{};
  switch (m.kind) {
    case ModelKind::burgers: a[0][0] = s[0]; break;
    case ModelKind::jinxin:
      a[0][1] = 1.0;
      a[1][0] = m.jx_a * m.jx_a;
      break;
    case ModelKind::swe: {
      const double fr = m.froude_number();
      const double u = s[1] / s[0];
      a[0][1] = 1.0;
      a[1][0] = -u * u + s[0] / (fr * fr);
      a[1][1] = 2.0 * u;
      break;
    }
    case ModelKind::bloodflow: {
      const double u = s[1] / s[0];
      a[0][1] = 1.0;
      a[1][0] = -u * u;
      a[1][1] = 2.0 * u;
      a[1][2] = s[0] / m.rho_nd();
      a[2][1] = c.e0 / m.reynolds() * tube_g(s[0], c.a0, m.h0_nd());
      break;
    }
    case ModelKind::bloodflow_elastic: {
      const double u = s[1] / s[0];
      a[0][1] = 1.0;
      a[1][0] = -u * u + s[0] / m.rho_nd() * c.einf / m.reynolds() *
                             tube_g(s[0], c.a0, m.h0_nd());
      a[1][1] = 2.0 * u;
      break;
    }
  }
  return a;
}

/// Sound speed of the pressure waves (blood flow: frozen with E0, elastic: with Einf).
inline double bloodflow_celerity(const ModelSpec& m, const CellParams& c, double area) {
  const double modulus = m.kind == ModelKind::bloodflow_elastic ? c.einf : c.e0;
  return std::sqrt(modulus / m.reynolds() * tube_g(area, c.a0, m.h0_nd()) * area / m.rho_nd());
}

enum class SpeedKind {
  full,          ///< spectral radius of the full quasilinear matrix
  explicit_part  ///< speed of the explicitly treated subsystem (SWE under IMEX: 2|u|)
};

inline double max_wave_speed(const ModelSpec& m, const CellParams& c, const State& s,
                             SpeedKind kind = SpeedKind::full) {
  check_admissible(m, s);
  switch (m.kind) {
    case ModelKind::burgers: return std::abs(s[0]);
    case ModelKind::jinxin: return std::abs(m.jx_a);
    case ModelKind::swe: {
      const double u = std::abs(s[1] / s[0]);
      // Explicit subsystem (0, hu^2/h) has eigenvalues {0, 2u}.
      if (kind == SpeedKind::explicit_part) return 2.0 * u;
      return u + std::sqrt(s[0]) / m.froude_number();
    }
    case ModelKind::bloodflow:
    case ModelKind::bloodflow_elastic:
      return std::abs(s[1] / s[0]) + bloodflow_celerity(m, c, s[0]);
  }
  return 0.0;
}

/// Value of the relaxed variable on the local equilibrium manifold.
inline double relaxation_equilibrium(const ModelSpec& m, const CellParams& c, const State& s) {
  switch (m.kind) {
    case ModelKind::jinxin: return jx_flux(s[0]);
    case ModelKind::bloodflow: return elastic_pressure(m, c, s[0]);
    default: throw UnsupportedError(std::string("no relaxation for ") + to_string(m.kind));
  }
}

struct RelaxationSource {
  State source{};        ///< S(q); the stiff term is -(1/scaling) S(q)
  double stiffness = 0;  ///< 1/scaling (infinite when scaling = 0)
};

inline RelaxationSource relaxation_source(const ModelSpec& m, const CellParams& c,
                                          const State& s) {
  RelaxationSource r;
  if (!has_relaxation(m.kind)) return r;
  const std::size_t k = relaxed_var(m.kind);
  r.source[k] = s[k] - relaxation_equilibrium(m, c, s);
  r.stiffness = c.tau > 0.0 ? 1.0 / c.tau : std::numeric_limits<double>::infinity();
  return r;
}

inline State equilibrium_project(const ModelSpec& m, const CellParams& c, const State& s) {
  if (!has_relaxation(m.kind)) return s;
  State out = s;
  out[relaxed_var(m.kind)] = relaxation_equilibrium(m, c, s);
  return out;
}

/// Asymptotic-limit model: JinXin -> Burgers, BloodFlow -> BloodFlowElastic.
inline ModelSpec reduced_model_of(const ModelSpec& m) {
  ModelSpec r = m;
  switch (m.kind) {
    case ModelKind::jinxin: r.kind = ModelKind::burgers; return r;
    case ModelKind::bloodflow: r.kind = ModelKind::bloodflow_elastic; return r;
    default:
      throw UnsupportedError(std::string("model ") + to_string(m.kind) + " has no reduced form");
  }
}

/// The full model at zero relaxation time with equilibrium initial data. Solved
/// with the AP-IMEX scheme this is the scheme's own discretization of the
/// asymptotic limit.
inline ModelSpec limit_model_of(const ModelSpec& m) {
  ModelSpec r = m;
  switch (m.kind) {
    case ModelKind::jinxin: r.jx_epsilon = 0.0; return r;
    case ModelKind::bloodflow:
      r.tau_override = 0.0;
      r.equilibrium_pressure = true;
      return r;
    default:
      throw UnsupportedError(std::string("model ") + to_string(m.kind) + " has no asymptotic limit");
  }
}

/// Model in which the reduced state is embedded (inverse of reduced_model_of).
inline bool is_reduced_of(const ModelSpec& full, const ModelSpec& reduced) {
  return (full.kind == ModelKind::jinxin && reduced.kind == ModelKind::burgers) ||
         (full.kind == ModelKind::bloodflow && reduced.kind == ModelKind::bloodflow_elastic);
}

// ---------------------------------------------------------------------------
// Benchmark data.

struct UniformRange {
  double lower = 0.0;
  double upper = 1.0;
};

inline UniformRange default_distribution(const ModelSpec& m) {
  if (m.kind == ModelKind::swe) return {0.0, 1.0};
  return {-1.0, 1.0};
}

inline std::pair<double, double> default_domain(const ModelSpec& m) {
  switch (m.kind) {
    case ModelKind::burgers:
    case ModelKind::jinxin: return {-5.0, 5.0};
    case ModelKind::swe:
      if (m.profile == "wave") return {0.0, 1.0};
      return {0.0, 30.0 / m.swe_scales.length};
    case ModelKind::bloodflow:
    case ModelKind::bloodflow_elastic: return {0.0, 1.0 / m.bf_scales.length};
  }
  return {0.0, 1.0};
}

inline Boundary default_boundary(const ModelSpec& m) {
  if (m.kind == ModelKind::bloodflow || m.kind == ModelKind::bloodflow_elastic) {
    return Boundary::periodic;
  }
  if (m.kind == ModelKind::swe && m.profile == "wave") return Boundary::periodic;
  return Boundary::transmissive;
}

struct PointData {
  State state{};
  CellParams params{};
};

/// Gaussian of standard deviation sigma(z) = z centred at the origin.
inline double burgers_gaussian(double x, double z) {
  if (z == 0.0) throw DomainError("Gaussian width sigma(z) = z vanishes at z = 0");
  return 1.0 / (std::sqrt(2.0 * std::numbers::pi) * z) * std::exp(-x * x / (2.0 * z * z));
}

/// Pointwise initial data in dimensionless variables. For JinXin, v is put on
/// the local equilibrium and a is left to the caller.
inline PointData initial_state_at(const ModelSpec& m, double x, double z) {
  PointData d;
  switch (m.kind) {
    case ModelKind::burgers: d.state[0] = burgers_gaussian(x, z); break;
    case ModelKind::jinxin: {
      const double u = burgers_gaussian(x, z);
      d.state = {u, jx_flux(u), 0.0};
      d.params.tau = m.jx_epsilon;
      break;
    }
    case ModelKind::swe: {
      if (m.profile == "wave") {
        const double h = 1.0 + m.wave_amplitude * std::sin(2.0 * std::numbers::pi * x);
        d.state = {h, h * m.wave_velocity, 0.0};
        break;
      }
      const double sigma = 1.0 + z;
      const double xd = x * m.swe_scales.length;
      const double s2 = 2.0 * sigma * sigma;
      const double h = 1.0 + 0.01 * std::exp(-(xd - 10.0) * (xd - 10.0) / s2) +
                       0.01 * std::exp(-(xd - 20.0) * (xd - 20.0) / s2);
      d.state = {h / m.swe_scales.depth, 0.0, 0.0};
      break;
    }
    case ModelKind::bloodflow:
    case ModelKind::bloodflow_elastic: {
      const BloodFlowScales& sc = m.bf_scales;
      const double xd = x * sc.length;
      const double sn = std::sin(2.0 * std::numbers::pi * xd);
      const double cs = std::cos(2.0 * std::numbers::pi * xd);
      const double amp = m.bf_test == 2 ? m.area_amplitude * (1.0 + 0.5 * z) : 1e-4;
      const double area = 0.0005 + amp * sn;
      const double e0 = 1e6 + 1e5 * sn;
      const double einf = 8e5 + 1e5 * sn;
      const double eta = m.bf_test == 1 ? m.eta * (1.0 + z) : m.eta;
      const double tau = eta / e0 * (1.0 - einf / e0);  // dimensional relaxation time
      d.params.a0 = area / sc.area;
      d.params.p0 = (5000.0 + 500.0 * cs) / sc.pressure();
      d.params.e0 = e0 / sc.elasticity();
      d.params.einf = einf / sc.elasticity();
      d.params.tau = m.tau_override ? *m.tau_override : tau / sc.time;
      const double a_nd = area / sc.area;
      const double q_nd = 0.00005 / (sc.area * sc.velocity());
      if (m.kind == ModelKind::bloodflow) {
        const double p = m.equilibrium_pressure ? elastic_pressure(m, d.params, a_nd)
                                                : (15000.0 + 5000.0 * sn) / sc.pressure();
        d.state = {a_nd, q_nd, p};
      } else {
        d.state = {a_nd, q_nd, 0.0};
      }
      break;
    }
  }
  return d;
}

struct InitialData {
  ModelSpec model;  ///< model with per-realization quantities resolved (JinXin a)
  CellField state;
  std::vector<CellParams> params;
};

/// Cell averages of the initial data. `quadrature_points` = 1 is midpoint
/// sampling, 3 is three-point Gauss-Legendre averaging.
inline InitialData initial_condition(const ModelSpec& model, const Grid1D& grid, double z,
                                     Boundary boundary, int quadrature_points = 1) {
  if (quadrature_points != 1 && quadrature_points != 3) {
    throw DomainError("initial_condition supports 1 or 3 quadrature points");
  }
  static constexpr std::array<double, 3> kNodes{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> kWeights{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

  InitialData out{model, CellField(grid, n_vars(model.kind), boundary), {}};
  out.params.resize(grid.n_cells());
  const std::size_t nv = n_vars(model.kind);
  for (std::size_t i = 0; i < grid.n_cells(); ++i) {
    State s{};
    CellParams c{};
    if (quadrature_points == 1) {
      const PointData p = initial_state_at(model, grid.center(i), z);
      s = p.state;
      c = p.params;
    } else {
      for (std::size_t q = 0; q < 3; ++q) {
        const double x = grid.center(i) + 0.5 * grid.dx() * kNodes[q];
        const PointData p = initial_state_at(model, x, z);
        for (std::size_t v = 0; v < 3; ++v) s[v] += kWeights[q] * p.state[v];
        c.a0 += kWeights[q] * p.params.a0;
        c.p0 += kWeights[q] * p.params.p0;
        c.e0 += kWeights[q] * p.params.e0;
        c.einf += kWeights[q] * p.params.einf;
      }
      // Relaxation time from the cell-local moduli.
      c.tau = initial_state_at(model, grid.center(i), z).params.tau;
      if ((model.kind == ModelKind::bloodflow || model.kind == ModelKind::bloodflow_elastic) &&
          !model.tau_override) {
        const double eta = model.bf_test == 1 ? model.eta * (1.0 + z) : model.eta;
        const BloodFlowScales& sc = model.bf_scales;
        const double e0 = c.e0 * sc.elasticity();
        const double einf = c.einf * sc.elasticity();
        c.tau = eta / e0 * (1.0 - einf / e0) / sc.time;
      }
    }
    for (std::size_t v = 0; v < nv; ++v) out.state(v, i) = s[v];
    out.params[i] = c;
    check_admissible(model, s);
  }

  if (model.kind == ModelKind::jinxin) {
    // Peak of the point data, so that a does not depend on the grid.
    double umax = std::abs(burgers_gaussian(std::clamp(0.0, grid.x_min(), grid.x_max()), z));
    for (double u : out.state.var(0)) umax = std::max(umax, std::abs(u));
    if (model.jx_a <= 0.0) out.model.jx_a = 1.05 * umax;
    if (!(out.model.jx_a * out.model.jx_a > umax * umax)) {
      throw DomainError("sub-characteristic condition a^2 > F'(u)^2 violated by the initial data");
    }
  }
  return out;
}

}  // namespace momc
