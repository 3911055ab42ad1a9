#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gfchan/brownian.hpp"
#include "gfchan/drift.hpp"
#include "gfchan/message.hpp"
#include "gfchan/rng.hpp"
#include "gfchan/sample_path.hpp"
#include "gfchan/time_grid.hpp"

namespace gfchan {

// Probe report for the uniform Lipschitz and linear growth hypotheses on a
// drift. A violation is data, not an exception: the declared constants are
// falsifiable claims, and this harness tries to falsify them.
struct ConditionReport {
  double max_lipschitz_ratio = 0.0;  // |dg| / (|ds| + ||dy||), stopped-path norm
  double max_growth_ratio = 0.0;     // |g| / (1 + ||y||)
  double declared_lipschitz = 0.0;
  double declared_growth = 0.0;
  bool lipschitz_violation = false;
  bool growth_violation = false;
  std::size_t probes = 0;

  bool any_violation() const { return lipschitz_violation || growth_violation; }
};

namespace detail {

// Probe paths are Brownian paths rescaled into the documented norm budget
// kPathDomainBound, matching the domain on which declared constants hold.
inline SamplePath make_probe_path(const TimeGrid& grid, std::uint64_t seed) {
  BrownianPath b = sample_brownian(grid, seed);
  double sup = 0.0;
  for (double v : b.values()) sup = std::max(sup, std::abs(v));
  std::vector<double> vals = b.values();
  if (sup > kPathDomainBound) {
    const double scale = kPathDomainBound / sup;
    for (double& v : vals) v *= scale;
  }
  return SamplePath(grid, std::move(vals));
}

}  // namespace detail

// Probes g at coupled (stop time, prefix-up-to-stop-time) pairs and reports
// the worst observed ratios against the declared constants. Flags a violation
// when an observed ratio exceeds the declaration by more than 1e-9 relative.
inline ConditionReport check_conditions(const ChannelDrift& drift, const Message& msg, std::size_t probes,
                                        std::uint64_t seed, double horizon = 1.0, std::size_t grid_steps = 64) {
  if (probes < 1) throw std::invalid_argument("check_conditions: probes must be >= 1");
  const TimeGrid grid = make_even_grid(horizon, grid_steps);
  ConditionReport rep;
  rep.declared_lipschitz = drift.lipschitz_L;
  rep.declared_growth = drift.growth_L;
  rep.probes = probes;

  Rng rng(seed);
  for (std::size_t k = 0; k < probes; ++k) {
    const SamplePath ya = detail::make_probe_path(grid, substream(seed, k, 1));
    // probe variants: independent pair / perturbed copy / same path
    const std::uint64_t variant = rng.next_u64() % 3;
    SamplePath yb = [&]() {
      if (variant == 0) return detail::make_probe_path(grid, substream(seed, k, 2));
      if (variant == 1) {
        std::vector<double> v = ya.values();
        const double eps = 0.05 * rng.uniform01();
        for (std::size_t i = 1; i < v.size(); ++i) v[i] += eps * rng.normal() * 0.1;
        return SamplePath(grid, std::move(v));
      }
      return ya;
    }();

    // evaluation times coincide with the prefix stop times (grid points), so
    // the denominator matches the arguments the drift actually saw
    const std::size_t m = rng.next_u64() % msg.size();
    const std::size_t ia = rng.next_u64() % grid.n_points();
    const std::size_t ib = (rng.next_u64() % 2 == 0) ? ia : rng.next_u64() % grid.n_points();
    const double s1 = grid.point(ia);
    const double t1 = grid.point(ib);

    const double ga = drift(s1, m, PathView(grid, ya.values(), ia + 1));
    const double gb = drift(t1, m, PathView(grid, yb.values(), ib + 1));
    const double denom = std::abs(s1 - t1) + stopped_sup_distance(ya, s1, yb, t1);
    if (denom > 1e-12) {
      rep.max_lipschitz_ratio = std::max(rep.max_lipschitz_ratio, std::abs(ga - gb) / denom);
    }
    const double growth = std::abs(ga) / (1.0 + ya.sup_prefix(s1));
    rep.max_growth_ratio = std::max(rep.max_growth_ratio, growth);
  }

  const double slack = 1.0 + 1e-9;
  rep.lipschitz_violation = rep.max_lipschitz_ratio > rep.declared_lipschitz * slack;
  rep.growth_violation = rep.max_growth_ratio > rep.declared_growth * slack;
  return rep;
}

// true if the drift output is invariant to the path prefix (feedback-free).
inline bool probe_feedback_invariance(const ChannelDrift& drift, const Message& msg, std::size_t probes,
                                      std::uint64_t seed, double horizon = 1.0) {
  const TimeGrid grid = make_even_grid(horizon, 32);
  Rng rng(seed);
  for (std::size_t k = 0; k < probes; ++k) {
    const SamplePath a = detail::make_probe_path(grid, substream(seed, k, 10));
    const SamplePath b = detail::make_probe_path(grid, substream(seed, k, 11));
    const double s = horizon * rng.uniform01();
    const std::size_t m = rng.next_u64() % msg.size();
    const double ga = drift(s, m, a.full_view());
    const double gb = drift(s, m, b.full_view());
    if (ga != gb) return false;
  }
  return true;
}

}  // namespace gfchan
