#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gfchan/brownian.hpp"
#include "gfchan/channel.hpp"
#include "gfchan/euler_maruyama.hpp"
#include "gfchan/girsanov.hpp"
#include "gfchan/numeric.hpp"
#include "gfchan/parallel.hpp"
#include "gfchan/posterior.hpp"

namespace gfchan {

enum class MiMethod { plugin, cmmse };

// Mutual information in nats with Monte Carlo standard error. Estimates are
// reported as-is (never clamped at 0); a slightly negative value within noise
// of 0 is legitimate.
struct MIEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n_paths = 0;
  MiMethod method = MiMethod::plugin;
};

namespace detail {

// Per-path sample of the density-ratio integrand:
//   -A3(m*, em) - log sum_m p(m) exp(-A3(m, em)).
// The mixture over messages is an exact finite sum, so the only estimation
// error is Monte Carlo over paths.
inline double plugin_integrand(const ChannelSpec& spec, const EMPath& em) {
  const std::size_t K = spec.message.size();
  std::vector<double> neg_a3(K);
  for (std::size_t m = 0; m < K; ++m) neg_a3[m] = -exponent_A3(spec.drift, m, em).value;
  const double log_mix = log_mix_exp(spec.message.priors(), neg_a3);
  return neg_a3[em.message()] - log_mix;
}

// Per-path sample of 1/2 int (g^2 - ghat^2) ds with ghat the posterior mean
// of the drift given the discretized path prefix, updated one step at a time
// (one forward pass, O(n * |alphabet|)). Left-endpoint quadrature in s.
inline double cmmse_integrand(const ChannelSpec& spec, const EMPath& em) {
  const TimeGrid& grid = em.grid();
  const std::size_t K = spec.message.size();
  const std::size_t m_true = em.message();

  std::vector<double> logw(K);
  for (std::size_t m = 0; m < K; ++m) logw[m] = std::log(spec.message.prior(m));

  KahanSum acc;
  std::vector<double> w(K);
  for (std::size_t i = 0; i + 1 < grid.n_points(); ++i) {
    const PathView prefix = em.prefix_view(i + 1);
    // posterior given the prefix up to t_i
    double lmax = logw[0];
    for (double v : logw) lmax = std::max(lmax, v);
    double s = 0.0;
    for (std::size_t m = 0; m < K; ++m) {
      w[m] = std::exp(logw[m] - lmax);
      s += w[m];
    }
    double ghat = 0.0;
    double g_true = 0.0;
    const double t = grid.point(i);
    for (std::size_t m = 0; m < K; ++m) {
      const double g = spec.drift(t, m, prefix);
      ghat += (w[m] / s) * g;
      if (m == m_true) g_true = g;
    }
    acc.add((g_true * g_true - ghat * ghat) * grid.step(i));

    // fold in this step's likelihood term
    const double dy = em.value(i + 1) - em.value(i);
    for (std::size_t m = 0; m < K; ++m) {
      const double I = drift_step_integral(spec.drift, m, prefix, grid.point(i), grid.point(i + 1));
      logw[m] -= a3_term(I, dy, grid.step(i));
    }
  }
  return 0.5 * acc.value();
}

template <typename Integrand>
MIEstimate mi_monte_carlo(const ChannelSpec& spec, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                          int threads, MiMethod method, Integrand&& integrand) {
  if (n_paths < 2) throw std::invalid_argument("mi estimate: need n_paths >= 2");
  std::vector<double> per_path(n_paths, 0.0);
  for_each_index(n_paths, threads, [&](std::size_t p) {
    Rng draw(seed, substream(seed, p, 0));
    const std::size_t m = spec.message.sample(draw);
    const BrownianPath b = sample_brownian(grid, substream(seed, p, 1));
    const EMPath em = simulate_em(spec.drift, m, grid, b);
    per_path[p] = integrand(spec, em);
  });
  const MeanStderr ms = batch_mean_stderr(per_path);
  return {ms.mean, ms.stderr_, n_paths, method};
}

}  // namespace detail

// I(M; Y^(n)(grid)) by the exact density-ratio plug-in over the finite
// alphabet, Monte Carlo over (message, Brownian path).
inline MIEstimate mi_plugin(const ChannelSpec& spec, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                            int threads = 1) {
  return detail::mi_monte_carlo(spec, grid, n_paths, seed, threads, MiMethod::plugin,
                                [](const ChannelSpec& s, const EMPath& em) { return detail::plugin_integrand(s, em); });
}

// Same quantity through the causal estimation route: half the integrated
// mean-square error gap between the drift and its running posterior mean.
inline MIEstimate mi_cmmse(const ChannelSpec& spec, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                           int threads = 1) {
  return detail::mi_monte_carlo(spec, grid, n_paths, seed, threads, MiMethod::cmmse,
                                [](const ChannelSpec& s, const EMPath& em) { return detail::cmmse_integrand(s, em); });
}

// Upper-bound chain evaluated from one set of per-step second-moment
// estimates mu_i ~ int_{t_{i-1}}^{t_i} E[g^2] ds:
//   b_log   = 1/2 sum_i log(1 + mu_i)
//   b_power = 1/2 sum_i mu_i
//   b_half_pt = P T / 2
// b_log <= b_power holds deterministically term by term (log(1+x) <= x).
struct BoundChain {
  double b_log = 0.0;
  double b_power = 0.0;
  double b_half_pt = 0.0;
  double stderr_log = 0.0;    // batch-means stderr of b_log
  double stderr_power = 0.0;  // batch-means stderr of b_power
  std::size_t n_paths = 0;
};

inline BoundChain mi_bound_chain(const ChannelSpec& spec, const TimeGrid& grid, std::size_t n_paths,
                                 std::uint64_t seed, int threads = 1) {
  if (n_paths < 2) throw std::invalid_argument("mi_bound_chain: need n_paths >= 2");
  const std::size_t n_steps = grid.n_steps();
  std::vector<std::vector<double>> step_sq(n_paths, std::vector<double>(n_steps, 0.0));
  for_each_index(n_paths, threads, [&](std::size_t p) {
    Rng draw(seed, substream(seed, p, 0));
    const std::size_t m = spec.message.sample(draw);
    const BrownianPath b = sample_brownian(grid, substream(seed, p, 1));
    const EMPath em = simulate_em(spec.drift, m, grid, b);
    for (std::size_t i = 0; i < n_steps; ++i) {
      const double g = spec.drift(grid.point(i), m, em.prefix_view(i + 1));
      step_sq[p][i] = g * g * grid.step(i);
    }
  });

  // batch construction mirrors batch_mean_stderr so the bound itself gets a
  // batch-means stderr
  const std::size_t K = std::min<std::size_t>(32, n_paths);
  std::vector<double> blog_batches(K, 0.0), bpow_batches(K, 0.0);
  std::vector<double> mu(n_steps, 0.0);
  for (std::size_t i = 0; i < n_steps; ++i) {
    KahanSum s;
    for (std::size_t p = 0; p < n_paths; ++p) s.add(step_sq[p][i]);
    mu[i] = s.value() / static_cast<double>(n_paths);
  }
  for (std::size_t bidx = 0; bidx < K; ++bidx) {
    const std::size_t lo = bidx * n_paths / K;
    const std::size_t hi = (bidx + 1) * n_paths / K;
    double bl = 0.0, bp = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) {
      KahanSum s;
      for (std::size_t p = lo; p < hi; ++p) s.add(step_sq[p][i]);
      const double mui = s.value() / static_cast<double>(hi - lo);
      bl += 0.5 * std::log1p(mui);
      bp += 0.5 * mui;
    }
    blog_batches[bidx] = bl;
    bpow_batches[bidx] = bp;
  }

  BoundChain out;
  for (std::size_t i = 0; i < n_steps; ++i) {
    out.b_log += 0.5 * std::log1p(mu[i]);
    out.b_power += 0.5 * mu[i];
  }
  out.b_half_pt = 0.5 * spec.power_limit * spec.horizon;
  auto batch_se = [&](const std::vector<double>& b, double mean) {
    double ss = 0.0;
    for (double v : b) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (static_cast<double>(K) * static_cast<double>(K - 1)));
  };
  double bl_mean = 0.0, bp_mean = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    bl_mean += blog_batches[i] / static_cast<double>(K);
    bp_mean += bpow_batches[i] / static_cast<double>(K);
  }
  out.stderr_log = batch_se(blog_batches, bl_mean);
  out.stderr_power = batch_se(bpow_batches, bp_mean);
  out.n_paths = n_paths;
  return out;
}

struct ConvergenceRow {
  double max_step = 0.0;
  double mi_nats = 0.0;
  double stderr_ = 0.0;
};

// Plug-in estimates across a nested family of grids (factor-2 refinements of
// base_grid), with the Brownian realization shared across levels through
// bridge refinement. One row per level, coarse to fine.
inline std::vector<ConvergenceRow> mi_convergence_study(const ChannelSpec& spec, const TimeGrid& base_grid,
                                                        std::size_t n_levels, std::size_t n_paths,
                                                        std::uint64_t seed, int threads = 1) {
  if (n_levels < 2) throw std::invalid_argument("mi_convergence_study: need n_levels >= 2");
  if (n_paths < 2) throw std::invalid_argument("mi_convergence_study: need n_paths >= 2");
  std::vector<TimeGrid> grids;
  grids.reserve(n_levels);
  grids.push_back(base_grid);
  for (std::size_t l = 1; l < n_levels; ++l) grids.push_back(refine_grid(grids.back(), 2));

  std::vector<std::vector<double>> per_path(n_levels, std::vector<double>(n_paths, 0.0));
  for_each_index(n_paths, threads, [&](std::size_t p) {
    Rng draw(seed, substream(seed, p, 0));
    const std::size_t m = spec.message.sample(draw);
    BrownianPath b = sample_brownian(grids[0], substream(seed, p, 1));
    for (std::size_t l = 0; l < n_levels; ++l) {
      if (l > 0) b = bridge_refine(b, grids[l], substream(seed, p, 1 + l));
      const EMPath em = simulate_em(spec.drift, m, grids[l], b);
      per_path[l][p] = detail::plugin_integrand(spec, em);
    }
  });

  std::vector<ConvergenceRow> rows(n_levels);
  for (std::size_t l = 0; l < n_levels; ++l) {
    const MeanStderr ms = batch_mean_stderr(per_path[l]);
    rows[l] = {grids[l].max_step(), ms.mean, ms.stderr_};
  }
  return rows;
}

}  // namespace gfchan
