#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gfchan/brownian.hpp"
#include "gfchan/channel.hpp"
#include "gfchan/drift.hpp"
#include "gfchan/numeric.hpp"
#include "gfchan/parallel.hpp"
#include "gfchan/rng.hpp"
#include "gfchan/sample_path.hpp"
#include "gfchan/time_grid.hpp"

namespace gfchan {

// int_{t_i}^{t_{i+1}} g(s, m, prefix frozen at t_i) ds, by one-node midpoint
// quadrature in s (exact when g is constant or affine in s). This single
// routine backs both the path recursion and the discrete density exponent
// A3, which must agree for the density to describe the simulated process.
inline double drift_step_integral(const ChannelDrift& drift, std::size_t m, const PathView& frozen_prefix,
                                  double t0, double t1) {
  const double mid = 0.5 * (t0 + t1);
  return (t1 - t0) * drift(mid, m, frozen_prefix);
}

// Discretized channel trajectory: Y(t_{i+1}) = Y(t_i) + I_i + dB_i with the
// path prefix frozen at t_i inside the drift integral I_i. Stored as
// Brownian value + accumulated drift so a zero drift reproduces the Brownian
// path bit-for-bit.
class EMPath {
 public:
  EMPath(TimeGrid grid, std::vector<double> values, std::size_t message, std::vector<double> brownian_values)
      : path_(std::move(grid), std::move(values)), message_(message), brownian_(std::move(brownian_values)) {
    if (brownian_.size() != path_.grid().n_points()) throw std::invalid_argument("EMPath: size mismatch");
    if (path_.value(0) != 0.0) throw std::invalid_argument("EMPath: must start at 0");
  }

  const TimeGrid& grid() const { return path_.grid(); }
  const std::vector<double>& values() const { return path_.values(); }
  double value(std::size_t i) const { return path_.value(i); }
  std::size_t message() const { return message_; }
  const std::vector<double>& brownian_values() const { return brownian_; }
  const SamplePath& as_sample_path() const { return path_; }
  PathView prefix_view(std::size_t count) const { return path_.prefix_view(count); }

 private:
  SamplePath path_;
  std::size_t message_;
  std::vector<double> brownian_;
};

// Runs the discretized recursion on `grid` driven by `b` (which may live on a
// finer nesting grid; only the matching increments are consumed).
inline EMPath simulate_em(const ChannelDrift& drift, std::size_t m, const TimeGrid& grid, const BrownianPath& b) {
  std::vector<double> bres;
  if (b.grid().n_points() == grid.n_points() && b.grid().nests(grid)) {
    bres = b.values();
  } else {
    if (!b.grid().nests(grid)) throw std::invalid_argument("simulate_em: Brownian path grid does not nest the target grid");
    bres = b.restricted_to(grid).values();
  }

  const std::size_t n = grid.n_points();
  std::vector<double> y(n, 0.0);
  double drift_acc = 0.0;
  y[0] = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const PathView frozen(grid, std::span<const double>(y.data(), n), i + 1);
    drift_acc += drift_step_integral(drift, m, frozen, grid.point(i), grid.point(i + 1));
    y[i + 1] = bres[i + 1] + drift_acc;
  }
  return EMPath(grid, std::move(y), m, std::move(bres));
}

// Numerical stand-in for the exact solution sampled at the coarse grid: the
// recursion is run at ref_factor-times finer resolution and restricted back.
inline SamplePath simulate_reference(const ChannelDrift& drift, std::size_t m, const TimeGrid& coarse,
                                     const BrownianPath& b_fine, std::size_t ref_factor) {
  if (ref_factor < 16) throw std::invalid_argument("simulate_reference: ref_factor must be >= 16");
  const TimeGrid fine = refine_grid(coarse, ref_factor);
  if (!b_fine.grid().nests(fine)) throw std::invalid_argument("simulate_reference: Brownian path does not cover the refined grid");
  EMPath em = simulate_em(drift, m, fine, b_fine);
  return em.as_sample_path().restricted_to(coarse);
}

struct StrongErrorRow {
  double max_step = 0.0;
  double mean_sq_sup = 0.0;  // E || Y^(n) - Y_ref ||^2 at the grid points
  double stderr_ = 0.0;
};

// Strong-error study across a nested family of grids against a common fine
// reference, with all resolutions coupled to one Brownian realization per
// path. Errors are measured at the coarse grid points (the reference is the
// sampled stand-in for the exact solution).
inline std::vector<StrongErrorRow> strong_error_study(const ChannelSpec& spec, const std::vector<TimeGrid>& grids,
                                                      std::size_t n_paths, std::uint64_t seed,
                                                      std::size_t ref_factor = 64, int threads = 1) {
  if (grids.empty()) throw std::invalid_argument("strong_error_study: no grids");
  if (n_paths < 2) throw std::invalid_argument("strong_error_study: need n_paths >= 2");
  for (const TimeGrid& g : grids) {
    if (!nearly_equal(g.horizon(), spec.horizon, kGridRelTol)) {
      throw std::invalid_argument("strong_error_study: grid horizon mismatch");
    }
  }
  for (std::size_t l = 0; l + 1 < grids.size(); ++l) {
    if (!grids[l + 1].nests(grids[l])) throw std::invalid_argument("strong_error_study: grids must be listed coarse to fine, nested");
  }
  const TimeGrid ref_grid = refine_grid(grids.back(), ref_factor);

  const std::size_t levels = grids.size();
  std::vector<std::vector<double>> sq(levels, std::vector<double>(n_paths, 0.0));

  for_each_index(n_paths, threads, [&](std::size_t p) {
    Rng draw(seed, substream(seed, p, 0));
    const std::size_t m = spec.message.sample(draw);
    BrownianPath b = sample_brownian(grids[0], substream(seed, p, 1));
    std::vector<BrownianPath> bs;
    bs.reserve(levels);
    bs.push_back(b);
    for (std::size_t l = 1; l < levels; ++l) bs.push_back(bridge_refine(bs.back(), grids[l], substream(seed, p, 1 + l)));
    BrownianPath b_ref = bridge_refine(bs.back(), ref_grid, substream(seed, p, 1 + levels));

    const EMPath em_ref = simulate_em(spec.drift, m, ref_grid, b_ref);
    for (std::size_t l = 0; l < levels; ++l) {
      const EMPath em = simulate_em(spec.drift, m, grids[l], bs[l]);
      const SamplePath ref_at_grid = em_ref.as_sample_path().restricted_to(grids[l]);
      const double d = sup_distance(em.as_sample_path(), ref_at_grid);
      sq[l][p] = d * d;
    }
  });

  std::vector<StrongErrorRow> rows(levels);
  for (std::size_t l = 0; l < levels; ++l) {
    const MeanStderr ms = batch_mean_stderr(sq[l]);
    rows[l] = {grids[l].max_step(), ms.mean, ms.stderr_};
  }
  return rows;
}

}  // namespace gfchan
