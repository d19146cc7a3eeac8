#pragma once

// Numerical fluxes: exact Godunov for Burgers, Rusanov, and the
// Dumbser-Osher-Toro path-integral flux for the blood-flow systems.

#include <algorithm>
#include <array>
#include <numbers>
#include <cmath>
#include <string>

#include "momc/errors.hpp"
#include "momc/models.hpp"

namespace momc {

enum class FluxKind { godunov, rusanov, dot };

inline const char* to_string(FluxKind f) {
  switch (f) {
    case FluxKind::godunov: return "godunov";
    case FluxKind::rusanov: return "rusanov";
    case FluxKind::dot: return "dot";
  }
  return "?";
}

inline FluxKind parse_flux_kind(const std::string& s) {
  if (s == "godunov") return FluxKind::godunov;
  if (s == "rusanov") return FluxKind::rusanov;
  if (s == "dot") return FluxKind::dot;
  throw ConfigError("unknown flux kind '" + s + "'");
}

/// Flux used by each benchmark family.
inline FluxKind default_flux(ModelKind k) {
  switch (k) {
    case ModelKind::burgers: return FluxKind::godunov;
    case ModelKind::bloodflow:
    case ModelKind::bloodflow_elastic: return FluxKind::dot;
    default: return FluxKind::rusanov;
  }
}

inline void check_flux_pairing(ModelKind m, FluxKind f) {
  const bool blood = m == ModelKind::bloodflow || m == ModelKind::bloodflow_elastic;
  if (f == FluxKind::godunov && m != ModelKind::burgers) {
    throw UnsupportedError(std::string("Godunov flux requires Burgers, got ") + to_string(m));
  }
  if (f == FluxKind::dot && !blood) {
    throw UnsupportedError(std::string("DOT flux requires a blood-flow model, got ") +
                           to_string(m));
  }
}

/// Exact Riemann flux of f(u) = u^2/2 at x/t = 0.
inline double godunov_flux(double ul, double ur) {
  if (ul > ur) {
    const double speed = 0.5 * (ul + ur);
    return speed >= 0.0 ? 0.5 * ul * ul : 0.5 * ur * ur;
  }
  if (ul >= 0.0) return 0.5 * ul * ul;
  if (ur <= 0.0) return 0.5 * ur * ur;
  return 0.0;
}

/// Conservative flux of the explicitly treated subsystem. Under the SWE
/// splitting the mass flux belongs to the implicit pressure step.
inline State split_flux(const ModelSpec& m, const State& s, SpeedKind speed) {
  State f = physical_flux(m, s);
  if (m.kind == ModelKind::swe && speed == SpeedKind::explicit_part) f[0] = 0.0;
  return f;
}

inline State rusanov_flux(const ModelSpec& m, const CellParams& cl, const CellParams& cr,
                          const State& ql, const State& qr,
                          SpeedKind speed = SpeedKind::full) {
  const State fl = split_flux(m, ql, speed);
  const State fr = split_flux(m, qr, speed);
  const double s = std::max(max_wave_speed(m, cl, ql, speed), max_wave_speed(m, cr, qr, speed));
  State out{};
  for (std::size_t v = 0; v < n_vars(m.kind); ++v) {
    out[v] = 0.5 * (fl[v] + fr[v]) - 0.5 * s * (qr[v] - ql[v]);
  }
  return out;
}

inline State rusanov_flux(const ModelSpec& m, const State& ql, const State& qr,
                          SpeedKind speed = SpeedKind::full) {
  return rusanov_flux(m, CellParams{}, CellParams{}, ql, qr, speed);
}

/// Eigenvalues of the blood-flow quasilinear matrix: {0, u - c, u + c}
/// (the zero mode is absent in the elastic system).
inline std::array<double, 3> bloodflow_eigenvalues(const ModelSpec& m, const CellParams& c,
                                                   const State& s) {
  const double u = s[1] / s[0];
  const double a = bloodflow_celerity(m, c, s[0]);
  return {u - a, u + a, 0.0};
}

/// |M| through Sylvester's formula; false when eigenvalues are too close to
/// separate.
inline bool absolute_matrix(const ModelSpec& m, const CellParams& c, const State& s, Mat3& out) {
  const Mat3 a = quasilinear_matrix(m, c, s);
  const std::size_t n = n_vars(m.kind);
  const std::array<double, 3> lam = bloodflow_eigenvalues(m, c, s);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(lam[i]));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!(std::abs(lam[i] - lam[j]) > 1e-10 * scale)) return false;
    }
  }
  out = Mat3{};
  for (std::size_t i = 0; i < n; ++i) {
    // Lagrange basis polynomial prod_{j != i} (A - lam_j) / (lam_i - lam_j).
    Mat3 p{};
    for (std::size_t r = 0; r < n; ++r) p[r][r] = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = lam[i] - lam[j];
      Mat3 next{};
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t col = 0; col < n; ++col) {
          double acc = 0.0;
          for (std::size_t k = 0; k < n; ++k) {
            acc += p[r][k] * (a[k][col] - (k == col ? lam[j] : 0.0));
          }
          next[r][col] = acc / d;
        }
      }
      p = next;
    }
    const double w = std::abs(lam[i]);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t col = 0; col < n; ++col) out[r][col] += w * p[r][col];
    }
  }
  return true;
}

inline constexpr std::array<double, 3> kGaussNodes{0.1127016653792583, 0.5,
                                                   0.8872983346207417};
inline constexpr std::array<double, 3> kGaussWeights{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

/// Path-averaged |M| along the straight segment from (ql, cl) to (qr, cr).
/// Returns false when some node is not diagonalizable.
inline bool dot_dissipation(const ModelSpec& m, const CellParams& cl, const CellParams& cr,
                            const State& ql, const State& qr, Mat3& out) {
  out = Mat3{};
  for (std::size_t g = 0; g < 3; ++g) {
    const double s = kGaussNodes[g];
    State q{};
    for (std::size_t v = 0; v < 3; ++v) q[v] = ql[v] + s * (qr[v] - ql[v]);
    CellParams c{cl.a0 + s * (cr.a0 - cl.a0), cl.p0 + s * (cr.p0 - cl.p0),
                 cl.e0 + s * (cr.e0 - cl.e0), cl.einf + s * (cr.einf - cl.einf),
                 cl.tau + s * (cr.tau - cl.tau)};
    Mat3 abs_m;
    if (!absolute_matrix(m, c, q, abs_m)) return false;
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t col = 0; col < 3; ++col) out[r][col] += kGaussWeights[g] * abs_m[r][col];
    }
  }
  return true;
}

/// DOT dissipation of the elastic model with the vessel fields (a0, p0, einf)
/// as additional zero-speed path variables. Along the path the augmented
/// matrix maps the jump to v = (dq, -u^2 dA + 2u dq + (A/rho) dp), dp being the
/// derivative of the tube-law pressure along the path, and the (A, q) rows of
/// |M| reduce to Q(M_red) v with Q interpolating sign(lambda) at u -+ c.
inline State elastic_dot_dissipation(const ModelSpec& m, const CellParams& cl,
                                     const CellParams& cr, const State& ql, const State& qr) {
  const double k = m.h0_nd() * std::sqrt(std::numbers::pi) / m.reynolds();
  const double da = qr[0] - ql[0], dq = qr[1] - ql[1];
  const double da0 = cr.a0 - cl.a0, dp0 = cr.p0 - cl.p0, de = cr.einf - cl.einf;
  State out{};
  for (std::size_t g = 0; g < 3; ++g) {
    const double s = kGaussNodes[g];
    const double a = ql[0] + s * da;
    const double q = ql[1] + s * dq;
    CellParams c = cl;
    c.a0 = cl.a0 + s * da0;
    c.einf = cl.einf + s * de;
    const double sa = std::sqrt(a), sa0 = std::sqrt(c.a0);
    const double dp = dp0 + k * (de * (sa - sa0) / c.a0 +
                                 c.einf * (da / (2.0 * sa) - da0 / (2.0 * sa0)) / c.a0 -
                                 c.einf * (sa - sa0) * da0 / (c.a0 * c.a0));
    const double u = q / a;
    const double cel = bloodflow_celerity(m, c, a);
    const double lm = u - cel, lp = u + cel;
    const double sm = lm > 0.0 ? 1.0 : (lm < 0.0 ? -1.0 : 0.0);
    const double sp = lp > 0.0 ? 1.0 : (lp < 0.0 ? -1.0 : 0.0);
    const double v0 = dq;
    const double v1 = -u * u * da + 2.0 * u * dq + a / m.rho_nd() * dp;
    // (M_red - lm I) v with M_red = [[0, 1], [c^2 - u^2, 2u]].
    const double w0 = -lm * v0 + v1;
    const double w1 = (cel * cel - u * u) * v0 + (2.0 * u - lm) * v1;
    const double f = (sp - sm) / (lp - lm);
    out[0] += kGaussWeights[g] * (sm * v0 + f * w0);
    out[1] += kGaussWeights[g] * (sm * v1 + f * w1);
  }
  return out;
}

inline State dot_flux(const ModelSpec& m, const CellParams& cl, const CellParams& cr,
                      const State& ql, const State& qr) {
  check_flux_pairing(m.kind, FluxKind::dot);
  check_admissible(m, ql);
  check_admissible(m, qr);
  if (m.kind == ModelKind::bloodflow_elastic) {
    const State fl = physical_flux(m, ql), fr = physical_flux(m, qr);
    const State d = elastic_dot_dissipation(m, cl, cr, ql, qr);
    return {0.5 * (fl[0] + fr[0]) - 0.5 * d[0], 0.5 * (fl[1] + fr[1]) - 0.5 * d[1], 0.0};
  }
  Mat3 d;
  if (!dot_dissipation(m, cl, cr, ql, qr, d)) return rusanov_flux(m, cl, cr, ql, qr);
  const State fl = physical_flux(m, ql);
  const State fr = physical_flux(m, qr);
  const std::size_t n = n_vars(m.kind);
  State out{};
  for (std::size_t r = 0; r < n; ++r) {
    double diss = 0.0;
    for (std::size_t col = 0; col < n; ++col) diss += d[r][col] * (qr[col] - ql[col]);
    out[r] = 0.5 * (fl[r] + fr[r]) - 0.5 * diss;
  }
  return out;
}

inline State numerical_flux(FluxKind kind, const ModelSpec& m, const CellParams& cl,
                            const CellParams& cr, const State& ql, const State& qr,
                            SpeedKind speed) {
  switch (kind) {
    case FluxKind::godunov:
      check_flux_pairing(m.kind, kind);
      return {godunov_flux(ql[0], qr[0]), 0.0, 0.0};
    case FluxKind::rusanov: return rusanov_flux(m, cl, cr, ql, qr, speed);
    case FluxKind::dot: return dot_flux(m, cl, cr, ql, qr);
  }
  return {};
}

}  // namespace momc
