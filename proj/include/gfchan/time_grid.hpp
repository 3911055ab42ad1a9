#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gfchan/numeric.hpp"

namespace gfchan {

// Relative tolerance for comparing constructed grid times.
inline constexpr double kGridRelTol = 1e-12;

// A partition 0 = t_0 < t_1 < ... < t_n = T of [0, T].
class TimeGrid {
 public:
  TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw std::invalid_argument("TimeGrid: need at least 2 points");
    if (points_.front() != 0.0) throw std::invalid_argument("TimeGrid: must start at 0");
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (!(points_[i] > points_[i - 1])) throw std::invalid_argument("TimeGrid: not strictly increasing");
    }
    if (!(horizon() > 0.0) || !std::isfinite(horizon())) throw std::invalid_argument("TimeGrid: bad horizon");
  }

  const std::vector<double>& points() const { return points_; }
  double horizon() const { return points_.back(); }
  std::size_t n_steps() const { return points_.size() - 1; }
  std::size_t n_points() const { return points_.size(); }
  double point(std::size_t i) const { return points_[i]; }
  double step(std::size_t i) const { return points_[i + 1] - points_[i]; }

  double max_step() const {
    double d = 0.0;
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) d = std::max(d, points_[i + 1] - points_[i]);
    return d;
  }

  bool is_even() const {
    const double target = horizon() / static_cast<double>(n_steps());
    for (std::size_t i = 0; i < n_steps(); ++i) {
      if (!nearly_equal(step(i), target, kGridRelTol)) return false;
    }
    return true;
  }

  // Index of a matching grid point, or npos.
  std::size_t find_point(double t) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), t);
    const double tol = kGridRelTol * std::max(1.0, horizon());
    if (it != points_.end() && std::abs(*it - t) <= tol) return static_cast<std::size_t>(it - points_.begin());
    if (it != points_.begin() && std::abs(*(it - 1) - t) <= tol) return static_cast<std::size_t>(it - points_.begin()) - 1;
    return npos;
  }

  // true if every point of `coarse` appears in this grid.
  bool nests(const TimeGrid& coarse) const {
    if (!nearly_equal(horizon(), coarse.horizon(), kGridRelTol)) return false;
    for (double t : coarse.points()) {
      if (find_point(t) == npos) return false;
    }
    return true;
  }

  // Index of the last grid point <= t (clamped to valid range).
  std::size_t floor_index(double t) const {
    if (t <= points_.front()) return 0;
    if (t >= points_.back()) return points_.size() - 1;
    auto it = std::upper_bound(points_.begin(), points_.end(), t);
    return static_cast<std::size_t>(it - points_.begin()) - 1;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<double> points_;
};

inline TimeGrid make_even_grid(double horizon, std::size_t n) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("make_even_grid: horizon must be > 0");
  if (n < 1) throw std::invalid_argument("make_even_grid: n must be >= 1");
  std::vector<double> pts(n + 1);
  for (std::size_t i = 0; i <= n; ++i) pts[i] = horizon * static_cast<double>(i) / static_cast<double>(n);
  pts[0] = 0.0;
  pts[n] = horizon;
  return TimeGrid(std::move(pts));
}

// Splits every step into `factor` equal substeps. Original points are copied
// bit-for-bit, so nesting holds exactly for grids built by refinement.
inline TimeGrid refine_grid(const TimeGrid& g, std::size_t factor) {
  if (factor < 2) throw std::invalid_argument("refine_grid: factor must be >= 2");
  std::vector<double> pts;
  pts.reserve(g.n_steps() * factor + 1);
  for (std::size_t i = 0; i < g.n_steps(); ++i) {
    const double a = g.point(i);
    const double b = g.point(i + 1);
    pts.push_back(a);
    for (std::size_t j = 1; j < factor; ++j) {
      pts.push_back(a + (b - a) * static_cast<double>(j) / static_cast<double>(factor));
    }
  }
  pts.push_back(g.point(g.n_points() - 1));
  return TimeGrid(std::move(pts));
}

}  // namespace gfchan
