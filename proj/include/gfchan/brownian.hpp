#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gfchan/rng.hpp"
#include "gfchan/sample_path.hpp"
#include "gfchan/time_grid.hpp"

namespace gfchan {

// Standard Brownian motion observed at grid points. B(0) = 0; increments over
// disjoint steps are independent N(0, step).
class BrownianPath {
 public:
  BrownianPath(TimeGrid grid, std::vector<double> values) : path_(std::move(grid), std::move(values)) {
    if (path_.value(0) != 0.0) throw std::invalid_argument("BrownianPath: must start at 0");
  }

  const TimeGrid& grid() const { return path_.grid(); }
  const std::vector<double>& values() const { return path_.values(); }
  double value(std::size_t i) const { return path_.value(i); }
  const SamplePath& as_sample_path() const { return path_; }

  BrownianPath restricted_to(const TimeGrid& coarse) const {
    SamplePath r = path_.restricted_to(coarse);
    return BrownianPath(r.grid(), r.values());
  }

 private:
  SamplePath path_;
};

inline BrownianPath sample_brownian(const TimeGrid& grid, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(grid.n_points());
  v[0] = 0.0;
  for (std::size_t i = 0; i + 1 < grid.n_points(); ++i) {
    v[i + 1] = v[i] + std::sqrt(grid.step(i)) * rng.normal();
  }
  return BrownianPath(grid, std::move(v));
}

// Conditional (Brownian-bridge) refinement: values at the coarse points are
// copied bit-for-bit; interior fine points are drawn sequentially from the
// bridge law N(linear interpolation, (t-a)(b-t)/(b-a)). Coupling coarse and
// fine resolutions to one underlying realization this way lets nested-grid
// studies vary the grid while holding omega fixed.
inline BrownianPath bridge_refine(const BrownianPath& p, const TimeGrid& fine, std::uint64_t seed) {
  const TimeGrid& coarse = p.grid();
  if (!fine.nests(coarse)) throw std::invalid_argument("bridge_refine: fine grid does not nest the coarse grid");

  Rng rng(seed);
  std::vector<double> v(fine.n_points(), 0.0);

  std::size_t ic = 0;  // current coarse interval [coarse_i, coarse_{i+1}]
  double anchor_t = coarse.point(0);
  double anchor_v = p.value(0);
  v[0] = p.value(0);

  for (std::size_t j = 1; j < fine.n_points(); ++j) {
    const double t = fine.point(j);
    const std::size_t hit = coarse.find_point(t);
    if (hit != TimeGrid::npos) {
      v[j] = p.value(hit);
      ic = hit;
      anchor_t = coarse.point(hit);
      anchor_v = v[j];
      continue;
    }
    // interior point of coarse interval ic; right endpoint of the bridge
    while (ic + 1 < coarse.n_points() && coarse.point(ic + 1) < t) ++ic;
    const double b_t = coarse.point(ic + 1);
    const double b_v = p.value(ic + 1);
    const double lam = (t - anchor_t) / (b_t - anchor_t);
    const double mean = anchor_v + lam * (b_v - anchor_v);
    const double var = (t - anchor_t) * (b_t - t) / (b_t - anchor_t);
    v[j] = mean + std::sqrt(var) * rng.normal();
    anchor_t = t;
    anchor_v = v[j];
  }
  return BrownianPath(fine, std::move(v));
}

}  // namespace gfchan
