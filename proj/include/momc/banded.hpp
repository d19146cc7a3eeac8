#pragma once

// Direct solver for banded systems (no pivoting) with a cyclic variant:
// entries outside the band are treated as a low-rank correction
// (Sherman-Morrison-Woodbury).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "momc/errors.hpp"

namespace momc {

class BandedSystem {
 public:
  BandedSystem(std::size_t n, std::size_t half_bandwidth)
      : n_(n), p_(half_bandwidth), w_(2 * half_bandwidth + 1), band_(n * w_, 0.0) {
    if (n < 2 * half_bandwidth + 1) {
      throw DimensionError("banded system of size " + std::to_string(n) +
                           " is smaller than its stencil");
    }
  }

  std::size_t size() const { return n_; }
  std::size_t half_bandwidth() const { return p_; }

  /// Adds v to entry (i, j). Entries outside the band become corner corrections.
  void add(std::size_t i, std::size_t j, double v) {
    const long d = static_cast<long>(j) - static_cast<long>(i);
    if (std::abs(d) <= static_cast<long>(p_)) {
      band_[i * w_ + static_cast<std::size_t>(d + static_cast<long>(p_))] += v;
      factored_ = false;
      return;
    }
    for (Corner& c : corners_) {
      if (c.i == i && c.j == j) {
        c.v += v;
        factored_ = false;
        return;
      }
    }
    corners_.push_back({i, j, v});
    factored_ = false;
  }

  double get(std::size_t i, std::size_t j) const {
    const long d = static_cast<long>(j) - static_cast<long>(i);
    if (std::abs(d) <= static_cast<long>(p_)) {
      return band_[i * w_ + static_cast<std::size_t>(d + static_cast<long>(p_))];
    }
    for (const Corner& c : corners_) {
      if (c.i == i && c.j == j) return c.v;
    }
    return 0.0;
  }

  std::vector<double> solve(const std::vector<double>& rhs) {
    if (rhs.size() != n_) throw DimensionError("banded solve: right-hand side size mismatch");
    if (!factored_) factor();
    std::vector<double> y = solve_band(rhs);
    if (corners_.empty()) return y;
    // x = y - Z (I + V^T Z)^{-1} V^T y, with U e_k = v_k e_{i_k}, V e_k = e_{j_k}.
    const std::size_t k = corners_.size();
    std::vector<double> vty(k);
    for (std::size_t a = 0; a < k; ++a) vty[a] = y[corners_[a].j];
    std::vector<double> w = solve_dense(capacitance_, vty, k);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t r = 0; r < n_; ++r) y[r] -= z_[a][r] * w[a];
    }
    return y;
  }

 private:
  struct Corner {
    std::size_t i, j;
    double v;
  };

  double& lu(std::size_t i, std::size_t j) {
    return lu_[i * w_ + static_cast<std::size_t>(static_cast<long>(j) - static_cast<long>(i) +
                                                 static_cast<long>(p_))];
  }

  void factor() {
    lu_ = band_;
    double scale = 0.0;
    for (double v : band_) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < n_; ++k) {
      const double piv = lu(k, k);
      if (!std::isfinite(piv) || std::abs(piv) <= 1e-14 * scale) {
        throw SingularSystemError("zero pivot in banded elimination at row " + std::to_string(k));
      }
      const std::size_t last = std::min(n_ - 1, k + p_);
      for (std::size_t i = k + 1; i <= last; ++i) {
        const double f = lu(i, k) / piv;
        lu(i, k) = f;
        for (std::size_t j = k + 1; j <= last; ++j) lu(i, j) -= f * lu(k, j);
      }
    }
    factored_ = true;
    if (corners_.empty()) return;
    const std::size_t kk = corners_.size();
    z_.assign(kk, {});
    for (std::size_t a = 0; a < kk; ++a) {
      std::vector<double> u(n_, 0.0);
      u[corners_[a].i] = corners_[a].v;
      z_[a] = solve_band(u);
    }
    capacitance_.assign(kk * kk, 0.0);
    for (std::size_t r = 0; r < kk; ++r) {
      for (std::size_t c = 0; c < kk; ++c) {
        capacitance_[r * kk + c] = (r == c ? 1.0 : 0.0) + z_[c][corners_[r].j];
      }
    }
  }

  std::vector<double> solve_band(const std::vector<double>& rhs) {
    std::vector<double> x = rhs;
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t first = i > p_ ? i - p_ : 0;
      for (std::size_t j = first; j < i; ++j) x[i] -= lu(i, j) * x[j];
    }
    for (std::size_t ii = n_; ii-- > 0;) {
      const std::size_t last = std::min(n_ - 1, ii + p_);
      for (std::size_t j = ii + 1; j <= last; ++j) x[ii] -= lu(ii, j) * x[j];
      x[ii] /= lu(ii, ii);
    }
    return x;
  }

  // Small dense solve with partial pivoting.
  static std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b,
                                         std::size_t k) {
    for (std::size_t col = 0; col < k; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < k; ++r) {
        if (std::abs(a[r * k + col]) > std::abs(a[piv * k + col])) piv = r;
      }
      if (!(std::abs(a[piv * k + col]) > 1e-300)) {
        throw SingularSystemError("singular capacitance matrix in cyclic banded solve");
      }
      if (piv != col) {
        for (std::size_t c = 0; c < k; ++c) std::swap(a[piv * k + c], a[col * k + c]);
        std::swap(b[piv], b[col]);
      }
      for (std::size_t r = col + 1; r < k; ++r) {
        const double f = a[r * k + col] / a[col * k + col];
        for (std::size_t c = col; c < k; ++c) a[r * k + c] -= f * a[col * k + c];
        b[r] -= f * b[col];
      }
    }
    std::vector<double> x(k);
    for (std::size_t r = k; r-- > 0;) {
      double acc = b[r];
      for (std::size_t c = r + 1; c < k; ++c) acc -= a[r * k + c] * x[c];
      x[r] = acc / a[r * k + r];
    }
    return x;
  }

  std::size_t n_, p_, w_;
  std::vector<double> band_;
  std::vector<double> lu_;
  std::vector<Corner> corners_;
  bool factored_ = false;
  std::vector<std::vector<double>> z_;
  std::vector<double> capacitance_;
};

}  // namespace momc
