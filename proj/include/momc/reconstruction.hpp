#pragma once

// Cell-wise reconstruction of face values from cell averages: piecewise
// constant, minmod-limited linear (TVD) and WENO3.

#include <algorithm>
#include <cmath>
#include <string>

#include "momc/errors.hpp"
#include "momc/mesh.hpp"

namespace momc {

inline constexpr double kWenoEpsilon = 1e-6;

/// Design order of the reconstruction: 1 constant, 2 minmod TVD, 3 WENO3.
inline int checked_order(int order) {
  if (order < 1 || order > 3) {
    throw DomainError("reconstruction order must be 1, 2 or 3, got " + std::to_string(order));
  }
  return order;
}

inline double minmod(double a, double b) {
  if (a > 0.0 && b > 0.0) return std::min(a, b);
  if (a < 0.0 && b < 0.0) return std::max(a, b);
  return 0.0;
}

struct FaceValues {
  double left;   ///< value at x_{i-1/2}
  double right;  ///< value at x_{i+1/2}
};

/// WENO3 value at the face between u0 and up, using the stencils {um, u0} and {u0, up}.
inline double weno3_face(double um, double u0, double up, double eps = kWenoEpsilon) {
  const double p0 = 1.5 * u0 - 0.5 * um;
  const double p1 = 0.5 * u0 + 0.5 * up;
  const double b0 = (u0 - um) * (u0 - um);
  const double b1 = (up - u0) * (up - u0);
  const double a0 = (1.0 / 3.0) / ((eps + b0) * (eps + b0));
  const double a1 = (2.0 / 3.0) / ((eps + b1) * (eps + b1));
  return (a0 * p0 + a1 * p1) / (a0 + a1);
}

/// WENO3 regularizer for the stencil (um, u0, up): the base value, raised to
/// dx^2 on fine grids, times the mean square of the stencil. Scaling with the
/// data keeps the weights invariant under a change of units, and the dx^2
/// floor keeps them linear at smooth extrema.
inline double weno3_regularizer(double um, double u0, double up, double dx) {
  const double scale = (um * um + u0 * u0 + up * up) / 3.0;
  const double eps = std::max(kWenoEpsilon, dx * dx) * scale;
  return eps > 0.0 ? eps : kWenoEpsilon;
}

/// Face values of the cell holding u0, with neighbours um (left) and up (right).
inline FaceValues reconstruct_scalar(double um, double u0, double up, int order,
                                     double dx = 1.0) {
  switch (checked_order(order)) {
    case 1: return {u0, u0};
    case 2: {
      const double half_slope = 0.5 * minmod(u0 - um, up - u0);
      return {u0 - half_slope, u0 + half_slope};
    }
    default: {
      // The weights are invariant under scaling of the stencil, so they are
      // computed on normalized values to avoid underflow of tiny data.
      const double s = std::max({std::abs(um), std::abs(u0), std::abs(up)});
      if (s == 0.0) return {u0, u0};
      const double a = um / s, b = u0 / s, c = up / s;
      const double eps = weno3_regularizer(a, b, c, dx);
      return {s * weno3_face(c, b, a, eps), s * weno3_face(a, b, c, eps)};
    }
  }
}

inline FaceValues reconstruct(const GhostedField& g, std::size_t var, long i, int order,
                              double dx) {
  if (g.width() < 1 && order > 1) throw StencilError("reconstruction needs one ghost layer");
  return reconstruct_scalar(g(var, i - 1), g(var, i), g(var, i + 1), order, dx);
}

}  // namespace momc
