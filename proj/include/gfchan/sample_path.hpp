#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "gfchan/time_grid.hpp"

namespace gfchan {

// Read-only stopped view of the first `count` points of a grid-indexed path.
// Evaluation is piecewise linear inside the view and frozen at the last value
// beyond it, matching the "stopped path" convention used for prefixes.
class PathView {
 public:
  PathView(const TimeGrid& grid, std::span<const double> values, std::size_t count)
      : grid_(&grid), values_(values), count_(count) {
    if (count_ < 1 || count_ > values_.size() || count_ > grid.n_points()) {
      throw std::invalid_argument("PathView: bad prefix length");
    }
  }

  double end_time() const { return grid_->point(count_ - 1); }
  double end_value() const { return values_[count_ - 1]; }
  std::size_t n_points() const { return count_; }
  const TimeGrid& grid() const { return *grid_; }
  double value(std::size_t i) const { return values_[i]; }

  double at(double s) const {
    if (s <= 0.0) return values_[0];
    if (s >= end_time()) return end_value();
    const std::size_t i = grid_->floor_index(s);
    const double t0 = grid_->point(i);
    const double t1 = grid_->point(i + 1);
    const double lam = (s - t0) / (t1 - t0);
    return values_[i] + lam * (values_[i + 1] - values_[i]);
  }

  // sup_{0<=r<=s} |path(r)|; for a piecewise-linear path the sup over a prefix
  // is attained at a vertex or at s itself.
  double sup_prefix(double s) const {
    double m = std::abs(values_[0]);
    for (std::size_t i = 1; i < count_ && grid_->point(i) <= s; ++i) m = std::max(m, std::abs(values_[i]));
    m = std::max(m, std::abs(at(s)));
    return m;
  }

 private:
  const TimeGrid* grid_;
  std::span<const double> values_;
  std::size_t count_;
};

// Grid-indexed path with piecewise-linear interpolation between grid points.
class SamplePath {
 public:
  SamplePath(TimeGrid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.n_points()) throw std::invalid_argument("SamplePath: size mismatch");
  }

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double value(std::size_t i) const { return values_[i]; }
  double horizon() const { return grid_.horizon(); }

  double at(double s) const { return full_view().at(s); }
  double sup_prefix(double s) const { return full_view().sup_prefix(s); }

  PathView full_view() const { return PathView(grid_, values_, values_.size()); }
  PathView prefix_view(std::size_t count) const { return PathView(grid_, values_, count); }

  // Values at the points of a coarser grid (which must be contained in ours).
  SamplePath restricted_to(const TimeGrid& coarse) const {
    std::vector<double> v(coarse.n_points());
    for (std::size_t i = 0; i < coarse.n_points(); ++i) {
      const std::size_t j = grid_.find_point(coarse.point(i));
      if (j == TimeGrid::npos) throw std::invalid_argument("SamplePath::restricted_to: grids do not nest");
      v[i] = values_[j];
    }
    return SamplePath(coarse, std::move(v));
  }

 private:
  TimeGrid grid_;
  std::vector<double> values_;
};

// sup_{0<=s<=T} |a(s) - b(s)| for piecewise-linear paths on a common horizon.
// The sup is attained on the union of the two vertex sets, so it is exact.
inline double sup_distance(const SamplePath& a, const SamplePath& b) {
  if (!nearly_equal(a.horizon(), b.horizon(), kGridRelTol)) {
    throw std::invalid_argument("sup_distance: horizons differ");
  }
  double m = 0.0;
  std::size_t ia = 0, ib = 0;
  const auto& pa = a.grid().points();
  const auto& pb = b.grid().points();
  while (ia < pa.size() || ib < pb.size()) {
    double t;
    if (ib >= pb.size() || (ia < pa.size() && pa[ia] <= pb[ib])) {
      t = pa[ia++];
      while (ia < pa.size() && pa[ia] == t) ++ia;
    } else {
      t = pb[ib++];
    }
    while (ib < pb.size() && pb[ib] <= t) ++ib;
    m = std::max(m, std::abs(a.at(t) - b.at(t)));
  }
  return m;
}

// Distance between stopped prefixes: ||a_0^s - b_0^t|| with both paths frozen
// past their stop times, evaluated over [0, max horizon].
inline double stopped_sup_distance(const SamplePath& a, double stop_a, const SamplePath& b, double stop_b) {
  double m = 0.0;
  auto eval_a = [&](double t) { return a.at(std::min(t, stop_a)); };
  auto eval_b = [&](double t) { return b.at(std::min(t, stop_b)); };
  for (double t : a.grid().points()) m = std::max(m, std::abs(eval_a(t) - eval_b(t)));
  for (double t : b.grid().points()) m = std::max(m, std::abs(eval_a(t) - eval_b(t)));
  for (double t : {stop_a, stop_b}) m = std::max(m, std::abs(eval_a(t) - eval_b(t)));
  return m;
}

}  // namespace gfchan
