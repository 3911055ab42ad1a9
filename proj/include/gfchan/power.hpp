#pragma once

#include <cstdint>
#include <vector>

#include "gfchan/channel.hpp"
#include "gfchan/euler_maruyama.hpp"
#include "gfchan/numeric.hpp"
#include "gfchan/parallel.hpp"

namespace gfchan {

struct PowerEstimate {
  double value = 0.0;  // (1/T) int_0^T E[g^2] ds, MC estimate
  double stderr_ = 0.0;
  std::size_t n_paths = 0;
};

// Monte Carlo estimate of the average power along discretized trajectories.
// Left-endpoint quadrature in s, matching where the discretized drift is
// actually evaluated against the channel.
inline PowerEstimate estimate_average_power(const ChannelSpec& spec, const TimeGrid& grid, std::size_t n_paths,
                                            std::uint64_t seed, int threads = 1) {
  if (n_paths < 2) throw std::invalid_argument("estimate_average_power: need n_paths >= 2");
  std::vector<double> per_path(n_paths, 0.0);
  for_each_index(n_paths, threads, [&](std::size_t p) {
    Rng draw(seed, substream(seed, p, 0));
    const std::size_t m = spec.message.sample(draw);
    const BrownianPath b = sample_brownian(grid, substream(seed, p, 1));
    const EMPath em = simulate_em(spec.drift, m, grid, b);
    KahanSum acc;
    for (std::size_t i = 0; i + 1 < grid.n_points(); ++i) {
      const double g = spec.drift(grid.point(i), m, em.prefix_view(i + 1));
      acc.add(g * g * grid.step(i));
    }
    per_path[p] = acc.value() / spec.horizon;
  });
  const MeanStderr ms = batch_mean_stderr(per_path);
  return {ms.mean, ms.stderr_, n_paths};
}

}  // namespace gfchan
