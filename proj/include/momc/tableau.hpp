#pragma once

// Butcher tableaux for explicit RK and IMEX-RK schemes, with a numerical
// verifier for order conditions, stiff accuracy and L-stability.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "momc/errors.hpp"

namespace momc {

using Matrix = std::vector<std::vector<double>>;

struct RkTableau {
  std::string name;
  Matrix a;
  std::vector<double> b;
  std::vector<double> c;
  int order = 1;

  std::size_t stages() const { return b.size(); }
};

struct ImexTableau {
  std::string name;
  Matrix ae;  ///< explicit part, strictly lower triangular
  std::vector<double> be;
  std::vector<double> ce;
  Matrix ai;  ///< implicit part, lower triangular
  std::vector<double> bi;
  std::vector<double> ci;
  int order = 1;

  std::size_t stages() const { return be.size(); }
};

inline std::vector<double> row_sums(const Matrix& a) {
  std::vector<double> c(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (double v : a[i]) c[i] += v;
  }
  return c;
}

inline RkTableau forward_euler() { return {"forward-euler", {{0.0}}, {1.0}, {0.0}, 1}; }

inline RkTableau heun2() {
  return {"heun2", {{0.0, 0.0}, {1.0, 0.0}}, {0.5, 0.5}, {0.0, 1.0}, 2};
}

inline RkTableau heun3() {
  return {"heun3",
          {{0.0, 0.0, 0.0}, {1.0 / 3.0, 0.0, 0.0}, {0.0, 2.0 / 3.0, 0.0}},
          {0.25, 0.0, 0.75},
          {0.0, 1.0 / 3.0, 2.0 / 3.0},
          3};
}

inline RkTableau explicit_rk(int order) {
  switch (order) {
    case 1: return forward_euler();
    case 2: return heun2();
    case 3: return heun3();
    default:
      throw DomainError("explicit RK order must be 1, 2 or 3, got " + std::to_string(order));
  }
}

inline ImexTableau ars111() {
  ImexTableau t;
  t.name = "ARS(1,1,1)";
  t.ae = {{0.0, 0.0}, {1.0, 0.0}};
  t.be = {1.0, 0.0};
  t.ai = {{0.0, 0.0}, {0.0, 1.0}};
  t.bi = {0.0, 1.0};
  t.order = 1;
  t.ce = row_sums(t.ae);
  t.ci = row_sums(t.ai);
  return t;
}

inline ImexTableau ars222() {
  const double g = 1.0 - std::sqrt(2.0) / 2.0;
  const double d = 1.0 - 1.0 / (2.0 * g);
  ImexTableau t;
  t.name = "ARS(2,2,2)";
  t.ae = {{0.0, 0.0, 0.0}, {g, 0.0, 0.0}, {d, 1.0 - d, 0.0}};
  t.be = {d, 1.0 - d, 0.0};
  t.ai = {{0.0, 0.0, 0.0}, {0.0, g, 0.0}, {0.0, 1.0 - g, g}};
  t.bi = {0.0, 1.0 - g, g};
  t.order = 2;
  t.ce = row_sums(t.ae);
  t.ci = row_sums(t.ai);
  return t;
}

/// Stiffly accurate, L-stable third-order scheme with three implicit stages
/// (the ARS(3,4,3) family). The diagonal is the root of 6g^3 - 18g^2 + 9g - 1
/// near 0.4359; the explicit part is completed from the row-sum and
/// third-order conditions.
inline ImexTableau si_imex343() {
  double g = 0.4358665215;
  for (int it = 0; it < 50; ++it) {
    const double f = ((6.0 * g - 18.0) * g + 9.0) * g - 1.0;
    const double df = (18.0 * g - 36.0) * g + 9.0;
    g -= f / df;
  }
  const double b1 = -1.5 * g * g + 4.0 * g - 0.25;
  const double b2 = 1.5 * g * g - 5.0 * g + 1.25;
  const double c3 = 0.5 * (1.0 + g);
  const double a32 = 0.3966543747;
  const double a31 = c3 - a32;
  // Row 4: a41 + a42 + a43 = 1 with a42 = a43, and sum b_i a_ij c_j = 1/6.
  const double a42 = (1.0 / 6.0 - b2 * a32 * g) / (g * (g + c3));
  const double a41 = 1.0 - 2.0 * a42;
  ImexTableau t;
  t.name = "SI-IMEX(3,4,3)";
  t.ae = {{0.0, 0.0, 0.0, 0.0},
          {g, 0.0, 0.0, 0.0},
          {a31, a32, 0.0, 0.0},
          {a41, a42, a42, 0.0}};
  t.be = {0.0, b1, b2, g};
  t.ai = {{0.0, 0.0, 0.0, 0.0},
          {0.0, g, 0.0, 0.0},
          {0.0, 0.5 * (1.0 - g), g, 0.0},
          {0.0, b1, b2, g}};
  t.bi = {0.0, b1, b2, g};
  t.order = 3;
  t.ce = row_sums(t.ae);
  t.ci = row_sums(t.ai);
  return t;
}

/// Globally stiffly accurate, L-stable third-order scheme with four implicit stages.
inline ImexTableau bpr343() {
  ImexTableau t;
  t.name = "BPR(3,4,3)";
  t.ae = {{0.0, 0.0, 0.0, 0.0, 0.0},
          {1.0, 0.0, 0.0, 0.0, 0.0},
          {4.0 / 9.0, 2.0 / 9.0, 0.0, 0.0, 0.0},
          {0.25, 0.0, 0.75, 0.0, 0.0},
          {0.25, 0.0, 0.75, 0.0, 0.0}};
  t.be = {0.25, 0.0, 0.75, 0.0, 0.0};
  t.ai = {{0.0, 0.0, 0.0, 0.0, 0.0},
          {0.5, 0.5, 0.0, 0.0, 0.0},
          {5.0 / 18.0, -1.0 / 9.0, 0.5, 0.0, 0.0},
          {0.375, -0.25, 0.375, 0.5, 0.0},
          {0.25, 0.0, 0.75, -0.5, 0.5}};
  t.bi = {0.25, 0.0, 0.75, -0.5, 0.5};
  t.order = 3;
  t.ce = row_sums(t.ae);
  t.ci = row_sums(t.ai);
  return t;
}

inline ImexTableau imex_tableau_by_name(const std::string& name) {
  if (name == "ARS(1,1,1)" || name == "ars111") return ars111();
  if (name == "ARS(2,2,2)" || name == "ars222") return ars222();
  if (name == "SI-IMEX(3,4,3)" || name == "si_imex343") return si_imex343();
  if (name == "BPR(3,4,3)" || name == "bpr343") return bpr343();
  throw ConfigError("unknown IMEX tableau '" + name + "'");
}

// ---------------------------------------------------------------------------
// Verification.

/// Largest violation of the classical order conditions up to `order` for the
/// coefficient set (a, b, c).
inline double order_condition_residual(const Matrix& a, const std::vector<double>& b,
                                       const std::vector<double>& c, int order) {
  const std::size_t s = b.size();
  double worst = 0.0;
  double sb = 0.0, sbc = 0.0, sbcc = 0.0, sbac = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    sb += b[i];
    sbc += b[i] * c[i];
    sbcc += b[i] * c[i] * c[i];
    for (std::size_t j = 0; j < s; ++j) sbac += b[i] * a[i][j] * c[j];
  }
  worst = std::abs(sb - 1.0);
  if (order >= 2) worst = std::max(worst, std::abs(sbc - 0.5));
  if (order >= 3) {
    worst = std::max(worst, std::abs(sbcc - 1.0 / 3.0));
    worst = std::max(worst, std::abs(sbac - 1.0 / 6.0));
  }
  return worst;
}

inline double order_condition_residual(const RkTableau& t) {
  double worst = order_condition_residual(t.a, t.b, t.c, t.order);
  const std::vector<double> rs = row_sums(t.a);
  for (std::size_t i = 0; i < rs.size(); ++i) worst = std::max(worst, std::abs(rs[i] - t.c[i]));
  return worst;
}

/// Largest violation over the explicit, implicit and all coupling conditions
/// (every choice of b, A and c from the two parts), including c = row sums.
inline double order_condition_residual(const ImexTableau& t) {
  const std::size_t s = t.stages();
  const std::array<const std::vector<double>*, 2> bs{&t.be, &t.bi};
  const std::array<const std::vector<double>*, 2> cs{&t.ce, &t.ci};
  const std::array<const Matrix*, 2> as{&t.ae, &t.ai};
  double worst = 0.0;
  for (const auto* b : bs) {
    double sb = 0.0;
    for (double v : *b) sb += v;
    worst = std::max(worst, std::abs(sb - 1.0));
    for (const auto* c1 : cs) {
      if (t.order >= 2) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s; ++i) acc += (*b)[i] * (*c1)[i];
        worst = std::max(worst, std::abs(acc - 0.5));
      }
      if (t.order < 3) continue;
      for (const auto* c2 : cs) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s; ++i) acc += (*b)[i] * (*c1)[i] * (*c2)[i];
        worst = std::max(worst, std::abs(acc - 1.0 / 3.0));
      }
      for (const auto* a : as) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
          for (std::size_t j = 0; j < s; ++j) acc += (*b)[i] * (*a)[i][j] * (*c1)[j];
        }
        worst = std::max(worst, std::abs(acc - 1.0 / 6.0));
      }
    }
  }
  const std::vector<double> re = row_sums(t.ae), ri = row_sums(t.ai);
  for (std::size_t i = 0; i < s; ++i) {
    worst = std::max(worst, std::abs(re[i] - t.ce[i]));
    worst = std::max(worst, std::abs(ri[i] - t.ci[i]));
  }
  return worst;
}

inline bool is_strictly_lower(const Matrix& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i; j < a[i].size(); ++j) {
      if (a[i][j] != 0.0) return false;
    }
  }
  return true;
}

inline bool is_lower(const Matrix& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a[i].size(); ++j) {
      if (a[i][j] != 0.0) return false;
    }
  }
  return true;
}

/// Largest |b_j - a_sj| of a coefficient set (0 when stiffly accurate).
inline double stiff_accuracy_defect(const Matrix& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) worst = std::max(worst, std::abs(b[j] - a.back()[j]));
  return worst;
}

/// Stability function R(z) = 1 + z b^T (I - zA)^{-1} e of a lower-triangular tableau.
inline double stability_function(const Matrix& a, const std::vector<double>& b, double z) {
  const std::size_t s = b.size();
  std::vector<long double> y(s);
  for (std::size_t k = 0; k < s; ++k) {
    long double acc = 1.0L;
    for (std::size_t j = 0; j < k; ++j) acc += static_cast<long double>(z) * a[k][j] * y[j];
    y[k] = acc / (1.0L - static_cast<long double>(z) * a[k][k]);
  }
  long double r = 1.0L;
  for (std::size_t j = 0; j < s; ++j) r += static_cast<long double>(z) * b[j] * y[j];
  return static_cast<double>(r);
}

/// Exact R(infinity) of a lower-triangular tableau whose diagonal is nonzero
/// except possibly in the first (explicit) stage. Stage values of y' = y/w are
/// expanded as power series in w = 1/z; NaN when R is unbounded.
inline double stability_at_infinity(const Matrix& a, const std::vector<double>& b) {
  constexpr std::size_t K = 8;
  using Series = std::array<double, K>;
  const std::size_t s = b.size();
  std::vector<Series> y(s);
  for (std::size_t k = 0; k < s; ++k) {
    // (1 + z S) / (1 - z a_kk) = (w + S) / (w - a_kk).
    Series num{};
    num[1] = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t p = 0; p < K; ++p) num[p] += a[k][j] * y[j][p];
    }
    const double akk = a[k][k];
    if (akk == 0.0) {
      if (k == 0) {
        y[k] = Series{};
        y[k][0] = 1.0;
        continue;
      }
      return std::nan("");
    }
    // Divide by (w - akk): y = num / (-akk (1 - w/akk)).
    Series out{};
    for (std::size_t p = 0; p < K; ++p) {
      double acc = num[p];
      if (p > 0) acc += out[p - 1];  // out * (w - akk) = num  =>  -akk out_p + out_{p-1} = num_p
      out[p] = -acc / akk;
    }
    y[k] = out;
  }
  // R = 1 + (1/w) sum b_j y_j.
  double lead = 0.0, next = 0.0;
  for (std::size_t j = 0; j < s; ++j) {
    lead += b[j] * y[j][0];
    next += b[j] * y[j][1];
  }
  if (std::abs(lead) > 1e-12) return std::nan("");
  return 1.0 + next;
}

struct TableauReport {
  double order_residual = 0.0;
  double stiff_accuracy_defect = 0.0;
  double r_infinity = 0.0;
  bool structure_ok = false;
};

inline TableauReport verify(const ImexTableau& t) {
  TableauReport r;
  r.order_residual = order_condition_residual(t);
  r.stiff_accuracy_defect = stiff_accuracy_defect(t.ai, t.bi);
  r.r_infinity = stability_at_infinity(t.ai, t.bi);
  r.structure_ok = is_strictly_lower(t.ae) && is_lower(t.ai) && t.ae.size() == t.stages() &&
                   t.ai.size() == t.stages() && t.bi.size() == t.stages();
  return r;
}

}  // namespace momc
