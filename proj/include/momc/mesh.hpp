#pragma once

// Uniform 1D grids, cell-averaged multi-variable fields, ghost layers and
// discrete L1 norms.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "momc/errors.hpp"

namespace momc {

enum class Boundary { periodic, transmissive };

inline const char* to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "transmissive";
}

/// Ghost layers available to every reconstruction.
inline constexpr int kGhostWidth = 2;

class Grid1D {
 public:
  Grid1D() = default;
  Grid1D(double x_min, double x_max, std::size_t n_cells)
      : x_min_(x_min), x_max_(x_max), n_cells_(n_cells) {
    if (n_cells < 4) {
      throw DomainError("Grid1D needs at least 4 cells, got " + std::to_string(n_cells));
    }
    if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
      throw DomainError("Grid1D needs a finite interval with x_max > x_min");
    }
    dx_ = (x_max - x_min) / static_cast<double>(n_cells);
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t n_cells() const { return n_cells_; }
  double dx() const { return dx_; }
  double length() const { return x_max_ - x_min_; }

  double center(std::size_t i) const {
    return x_min_ + (static_cast<double>(i) + 0.5) * dx_;
  }
  double left_face(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }

  Grid1D refined(std::size_t factor = 2) const { return {x_min_, x_max_, n_cells_ * factor}; }

  /// Grid with n_cells / factor cells; requires exact divisibility.
  Grid1D coarsened(std::size_t factor = 2) const {
    if (factor == 0 || n_cells_ % factor != 0) {
      throw DimensionError("grid of " + std::to_string(n_cells_) +
                           " cells cannot be coarsened by " + std::to_string(factor));
    }
    return {x_min_, x_max_, n_cells_ / factor};
  }

  friend bool operator==(const Grid1D& a, const Grid1D& b) {
    return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_cells_ == b.n_cells_;
  }

 private:
  double x_min_ = 0.0;
  double x_max_ = 1.0;
  std::size_t n_cells_ = 0;
  double dx_ = 0.0;
};

/// Cell averages of n_vars conserved variables, stored variable-major.
class CellField {
 public:
  CellField() = default;
  CellField(Grid1D grid, std::size_t n_vars, Boundary boundary)
      : grid_(grid), n_vars_(n_vars), boundary_(boundary),
        values_(n_vars * grid.n_cells(), 0.0) {
    if (n_vars == 0) throw DomainError("CellField needs at least one variable");
  }

  const Grid1D& grid() const { return grid_; }
  std::size_t n_vars() const { return n_vars_; }
  std::size_t n_cells() const { return grid_.n_cells(); }
  Boundary boundary() const { return boundary_; }

  double& operator()(std::size_t var, std::size_t i) { return values_[var * n_cells() + i]; }
  double operator()(std::size_t var, std::size_t i) const {
    return values_[var * n_cells() + i];
  }

  std::span<double> var(std::size_t v) { return {values_.data() + v * n_cells(), n_cells()}; }
  std::span<const double> var(std::size_t v) const {
    return {values_.data() + v * n_cells(), n_cells()};
  }

  std::vector<double>& raw() { return values_; }
  const std::vector<double>& raw() const { return values_; }

  bool all_finite() const {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  bool same_shape(const CellField& o) const {
    return grid_ == o.grid_ && n_vars_ == o.n_vars_;
  }

 private:
  Grid1D grid_;
  std::size_t n_vars_ = 0;
  Boundary boundary_ = Boundary::transmissive;
  std::vector<double> values_;
};

/// Field values extended by `width` ghost cells on each side.
class GhostedField {
 public:
  GhostedField(std::size_t n_vars, std::size_t n_cells, int width)
      : n_vars_(n_vars), n_cells_(n_cells), width_(width),
        stride_(n_cells + 2 * static_cast<std::size_t>(width)),
        data_(n_vars * stride_, 0.0) {}

  /// Cell index runs over [-width, n_cells + width).
  double operator()(std::size_t var, long i) const {
    return data_[var * stride_ + static_cast<std::size_t>(i + width_)];
  }
  double& operator()(std::size_t var, long i) {
    return data_[var * stride_ + static_cast<std::size_t>(i + width_)];
  }

  std::size_t n_vars() const { return n_vars_; }
  std::size_t n_cells() const { return n_cells_; }
  int width() const { return width_; }

 private:
  std::size_t n_vars_;
  std::size_t n_cells_;
  int width_;
  std::size_t stride_;
  std::vector<double> data_;
};

/// Maps a possibly out-of-range cell index onto the interior per boundary policy.
inline std::size_t boundary_index(long i, std::size_t n, Boundary b) {
  const long nl = static_cast<long>(n);
  if (b == Boundary::periodic) {
    long k = i % nl;
    if (k < 0) k += nl;
    return static_cast<std::size_t>(k);
  }
  if (i < 0) return 0;
  if (i >= nl) return n - 1;
  return static_cast<std::size_t>(i);
}

inline GhostedField fill_ghosts(const CellField& field, int width = kGhostWidth) {
  if (width < 0 || width > kGhostWidth) {
    throw StencilError("ghost width " + std::to_string(width) + " exceeds supported " +
                       std::to_string(kGhostWidth));
  }
  const std::size_t n = field.n_cells();
  GhostedField g(field.n_vars(), n, width);
  for (std::size_t v = 0; v < field.n_vars(); ++v) {
    for (long i = -width; i < static_cast<long>(n) + width; ++i) {
      g(v, i) = field(v, boundary_index(i, n, field.boundary()));
    }
  }
  return g;
}

/// dx * sum |a_i - b_i| for two scalar profiles on the same grid.
inline double l1_distance(std::span<const double> a, std::span<const double> b, double dx) {
  if (a.size() != b.size()) {
    throw DimensionError("l1 norm of profiles with " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " cells");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return dx * s;
}

inline double l1_norm(std::span<const double> a, double dx) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return dx * s;
}

/// L1 distance of one variable.
inline double l1_norm(const CellField& a, const CellField& b, std::size_t var) {
  if (!a.same_shape(b)) throw DimensionError("l1_norm: fields differ in grid or n_vars");
  if (var >= a.n_vars()) throw DimensionError("l1_norm: variable index out of range");
  return l1_distance(a.var(var), b.var(var), a.grid().dx());
}

/// L1 distance per variable.
inline std::vector<double> l1_norm(const CellField& a, const CellField& b) {
  if (!a.same_shape(b)) throw DimensionError("l1_norm: fields differ in grid or n_vars");
  std::vector<double> out(a.n_vars());
  for (std::size_t v = 0; v < a.n_vars(); ++v) out[v] = l1_norm(a, b, v);
  return out;
}

/// Piecewise-constant injection of a coarse profile onto a grid `factor` times finer.
inline std::vector<double> prolongate(std::span<const double> coarse, std::size_t factor) {
  std::vector<double> fine(coarse.size() * factor);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    for (std::size_t k = 0; k < factor; ++k) fine[i * factor + k] = coarse[i];
  }
  return fine;
}

/// Cell averages of a fine profile over blocks of `factor` cells.
inline std::vector<double> restrict_average(std::span<const double> fine, std::size_t factor) {
  if (factor == 0 || fine.size() % factor != 0) {
    throw DimensionError("restriction factor does not divide the fine grid");
  }
  std::vector<double> coarse(fine.size() / factor, 0.0);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < factor; ++k) s += fine[i * factor + k];
    coarse[i] = s / static_cast<double>(factor);
  }
  return coarse;
}

}  // namespace momc
