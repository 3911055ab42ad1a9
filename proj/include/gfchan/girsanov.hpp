#pragma once

#include <cstddef>
#include <stdexcept>

#include "gfchan/drift.hpp"
#include "gfchan/euler_maruyama.hpp"
#include "gfchan/numeric.hpp"
#include "gfchan/sample_path.hpp"

namespace gfchan {

enum class ExponentKind { A1, A2, A3 };

// Log-likelihood exponent in nats. kind records which discretization of the
// Radon-Nikodym exponent produced the value.
struct GirsanovExponent {
  double value = 0.0;
  ExponentKind kind = ExponentKind::A1;
};

// A1(m, y_0^T) = -int_0^T g(s, m, y_0^s) dY(s) + 1/2 int_0^T g(s, m, y_0^s)^2 ds,
// with the stochastic integral as a non-anticipating left-endpoint Ito sum
// over the path's own grid and left-endpoint quadrature for the square term.
// The sum is only meaningful when the grid is fine relative to the drift's
// variation; callers control the resolution (max_step <~ 1e-2 for the
// builtin drifts keeps the discretization error well below MC noise).
inline GirsanovExponent exponent_A1(const ChannelDrift& drift, std::size_t m, const SamplePath& path) {
  const TimeGrid& grid = path.grid();
  KahanSum ito;
  KahanSum square;
  for (std::size_t i = 0; i + 1 < grid.n_points(); ++i) {
    const double g = drift(grid.point(i), m, path.prefix_view(i + 1));
    ito.add(g * (path.value(i + 1) - path.value(i)));
    square.add(g * g * grid.step(i));
  }
  return {-ito.value() + 0.5 * square.value(), ExponentKind::A1};
}

// A2 freezes the drift at the left endpoints of `grid` applied to the
// piecewise-linear interpolation of the path at those grid points. Both
// integrals then collapse to exact finite sums over the grid steps: a
// step-constant integrand integrates against dY to g_i * (Y(t_i)-Y(t_{i-1}))
// regardless of the path's finer structure, so A2 equals A1 evaluated on the
// restriction of the path to `grid`.
inline GirsanovExponent exponent_A2(const ChannelDrift& drift, std::size_t m, const TimeGrid& grid,
                                    const SamplePath& path) {
  const SamplePath restricted = path.grid().n_points() == grid.n_points() && path.grid().nests(grid)
                                    ? path
                                    : path.restricted_to(grid);
  GirsanovExponent e = exponent_A1(drift, m, restricted);
  e.kind = ExponentKind::A2;
  return e;
}

// One term of the A3 sum for step i: (-2 I dY + I^2) / (2 step), where I is
// the shared midpoint drift integral over the step with the prefix frozen at
// the left endpoint. This is the exponent of the step's Gaussian transition
// density, so the same quadrature as the simulator is mandatory.
inline double a3_term(double step_integral, double increment, double step) {
  return (-2.0 * step_integral * increment + step_integral * step_integral) / (2.0 * step);
}

// A3(m, Y^(n)) = sum_i (-2 I_i dY_i + I_i^2) / (2 (t_i - t_{i-1})): the exact
// log-density exponent of the discretized increments under message m, up to
// the message-independent Gaussian normalization that cancels in ratios.
inline GirsanovExponent exponent_A3(const ChannelDrift& drift, std::size_t m, const EMPath& em) {
  const TimeGrid& grid = em.grid();
  KahanSum acc;
  for (std::size_t i = 0; i + 1 < grid.n_points(); ++i) {
    const double I = drift_step_integral(drift, m, em.prefix_view(i + 1), grid.point(i), grid.point(i + 1));
    const double dy = em.value(i + 1) - em.value(i);
    acc.add(a3_term(I, dy, grid.step(i)));
  }
  return {acc.value(), ExponentKind::A3};
}

}  // namespace gfchan
