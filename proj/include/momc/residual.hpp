#pragma once

// Semi-discrete finite-volume operator: reconstructed interface states,
// numerical fluxes and centrally differenced nonconservative products.

#include <array>
#include <span>
#include <vector>

#include "momc/fluxes.hpp"
#include "momc/mesh.hpp"
#include "momc/models.hpp"
#include "momc/reconstruction.hpp"

namespace momc {

struct SpatialScheme {
  int order = 1;
  FluxKind flux = FluxKind::godunov;
  /// explicit_part drops what the IMEX splitting treats implicitly (SWE pressure).
  SpeedKind speed = SpeedKind::full;
};

inline State cell_state(const GhostedField& g, long i) {
  State s{};
  for (std::size_t v = 0; v < g.n_vars(); ++v) s[v] = g(v, i);
  return s;
}

inline State cell_state(const CellField& f, std::size_t i) {
  State s{};
  for (std::size_t v = 0; v < f.n_vars(); ++v) s[v] = f(v, i);
  return s;
}

namespace detail {

// Average-preserving quadratic through three cell averages, evaluated at
// xi in [-1/2, 1/2] (cell-local coordinate).
inline double quadratic_at(double um, double u0, double up, double xi) {
  const double d1 = 0.5 * (up - um);
  const double d2 = up - 2.0 * u0 + um;
  return u0 - d2 / 24.0 + d1 * xi + 0.5 * d2 * xi * xi;
}

inline CellParams params_at(const CellParams& m, const CellParams& c, const CellParams& p,
                            double xi) {
  return {quadratic_at(m.a0, c.a0, p.a0, xi), quadratic_at(m.p0, c.p0, p.p0, xi),
          quadratic_at(m.e0, c.e0, p.e0, xi), quadratic_at(m.einf, c.einf, p.einf, xi),
          c.tau};
}

}  // namespace detail

/// Time derivative of the cell averages from everything except the stiff
/// relaxation source and, for speed = explicit_part, the SWE pressure terms.
inline CellField explicit_residual(const ModelSpec& m, const CellField& field,
                                   std::span<const CellParams> params,
                                   const SpatialScheme& scheme) {
  check_flux_pairing(m.kind, scheme.flux);
  checked_order(scheme.order);
  const std::size_t n = field.n_cells();
  if (field.n_vars() != n_vars(m.kind)) {
    throw DimensionError("field variable count does not match the model");
  }
  if (params.size() != n) throw DimensionError("params must have one entry per cell");
  const std::size_t nv = field.n_vars();
  const double dx = field.grid().dx();
  const Boundary bc = field.boundary();
  const GhostedField g = fill_ghosts(field, kGhostWidth);
  auto param = [&](long i) -> const CellParams& { return params[boundary_index(i, n, bc)]; };

  // Face states of cells -1..n, stored at offset +1.
  std::vector<State> left(n + 2), right(n + 2);
  for (long i = -1; i <= static_cast<long>(n); ++i) {
    State l{}, r{};
    for (std::size_t v = 0; v < nv; ++v) {
      const FaceValues fv = reconstruct(g, v, i, scheme.order, dx);
      l[v] = fv.left;
      r[v] = fv.right;
    }
    left[static_cast<std::size_t>(i + 1)] = l;
    right[static_cast<std::size_t>(i + 1)] = r;
  }

  // Interface fluxes; flux[k] sits at x_{k-1/2}.
  // The elastic path dissipation sees parameter jumps, so at higher order it
  // must get face values of the parameters to match the reconstructed states.
  const bool face_params = scheme.order > 1 && m.kind == ModelKind::bloodflow_elastic;
  std::vector<State> flux(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const long il = static_cast<long>(k) - 1;
    if (face_params) {
      const CellParams pl = detail::params_at(param(il - 1), param(il), param(il + 1), 0.5);
      const CellParams pr = detail::params_at(param(il), param(il + 1), param(il + 2), -0.5);
      flux[k] = numerical_flux(scheme.flux, m, pl, pr, right[k], left[k + 1], scheme.speed);
    } else {
      flux[k] = numerical_flux(scheme.flux, m, param(il), param(il + 1), right[k], left[k + 1],
                               scheme.speed);
    }
  }

  CellField out(field.grid(), nv, bc);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < nv; ++v) out(v, i) = -(flux[i + 1][v] - flux[i][v]) / dx;
  }

  std::vector<NonconservativeTerm> terms = nonconservative_terms(m.kind);
  if (m.kind == ModelKind::swe && scheme.speed == SpeedKind::explicit_part) terms.clear();
  if (terms.empty()) return out;

  // Gradient variables per cell (with ghosts), reconstructed like the state.
  GhostedField gv(3, n, kGhostWidth);
  for (long i = -kGhostWidth; i < static_cast<long>(n) + kGhostWidth; ++i) {
    const State s = gradient_variables(m, param(i), cell_state(g, i));
    for (std::size_t v = 0; v < 3; ++v) gv(v, i) = s[v];
  }
  std::vector<State> gface(n + 1);  // interface-averaged value at x_{k-1/2}
  for (std::size_t k = 0; k <= n; ++k) {
    const long il = static_cast<long>(k) - 1;
    for (std::size_t v = 0; v < 3; ++v) {
      const double a = reconstruct(gv, v, il, scheme.order, dx).right;
      const double b = reconstruct(gv, v, il + 1, scheme.order, dx).left;
      gface[k][v] = 0.5 * (a + b);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const long li = static_cast<long>(i);
    const State q = cell_state(g, li);
    for (const NonconservativeTerm& t : terms) {
      const double dg = (gface[i + 1][t.gvar] - gface[i][t.gvar]) / dx;
      double coef = nonconservative_coefficient(m, param(li), q, t);
      double correction = 0.0;
      if (scheme.order == 3) {
        // Cell average of B(q) dg/dx to third order: quadrature of B on the
        // quadratic reconstruction plus the product term (dx^2/12) B' g''.
        const State qm = cell_state(g, li - 1);
        const State qp = cell_state(g, li + 1);
        coef = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
          const double xi = kGaussNodes[k] - 0.5;
          State qx{};
          for (std::size_t v = 0; v < nv; ++v) qx[v] = detail::quadratic_at(qm[v], q[v], qp[v], xi);
          const CellParams cx = detail::params_at(param(li - 1), param(li), param(li + 1), xi);
          coef += kGaussWeights[k] * nonconservative_coefficient(m, cx, qx, t);
        }
        const double bm = nonconservative_coefficient(m, param(li - 1), qm, t);
        const double bp = nonconservative_coefficient(m, param(li + 1), qp, t);
        const double g2 = gv(t.gvar, li + 1) - 2.0 * gv(t.gvar, li) + gv(t.gvar, li - 1);
        correction = (bp - bm) * g2 / (24.0 * dx);
      }
      out(t.target, i) -= coef * dg + correction;
    }
  }
  return out;
}

}  // namespace momc
