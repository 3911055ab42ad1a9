#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gfchan/message.hpp"
#include "gfchan/sample_path.hpp"

namespace gfchan {

// Path sup-norm budget used when declaring Lipschitz constants for drifts
// whose exact uniform constant does not exist (the 1/max(s, s_floor) gain of
// the linear-feedback drift grows with the path norm). The condition-probing
// harness caps its probe paths at the same value.
inline constexpr double kPathDomainBound = 4.0;

// The channel input functional g(s, m, y_0^s). Evaluation must be a pure
// function of its arguments; drifts are immutable and shareable across
// threads. Declared Lipschitz/growth constants are falsified by probing, not
// proven (see conditions.hpp).
struct ChannelDrift {
  using Eval = std::function<double(double s, std::size_t m, const PathView& prefix)>;

  Eval evaluate;
  double lipschitz_L = 0.0;
  double growth_L = 0.0;
  bool feedback = false;
  std::string name;

  double operator()(double s, std::size_t m, const PathView& prefix) const { return evaluate(s, m, prefix); }
};

inline ChannelDrift builtin_zero() {
  ChannelDrift d;
  d.evaluate = [](double, std::size_t, const PathView&) { return 0.0; };
  d.lipschitz_L = 0.0;
  d.growth_L = 0.0;
  d.feedback = false;
  d.name = "zero";
  return d;
}

// g(s, m, .) = a * level(m); no time or path dependence.
inline ChannelDrift builtin_constant_antipodal(double a, const Message& msg) {
  if (!std::isfinite(a)) throw std::invalid_argument("builtin_constant_antipodal: a must be finite");
  std::vector<double> levels = msg.levels();
  double lmax = 0.0;
  for (double l : levels) lmax = std::max(lmax, std::abs(l));
  ChannelDrift d;
  d.evaluate = [a, levels](double, std::size_t m, const PathView&) {
    if (m >= levels.size()) throw std::invalid_argument("constant_antipodal: unknown symbol");
    return a * levels[m];
  };
  d.lipschitz_L = 0.0;
  d.growth_L = std::abs(a) * std::max(1.0, lmax);
  d.feedback = false;
  d.name = "constant_antipodal";
  return d;
}

// g(s, m, y_0^s) = gamma * (theta[m] - y(s) / max(s, s_floor)).
// s_floor regularizes the t=0 singularity of the classic error-tracking
// scheme; callers normally pass the first step of the grid in use.
inline ChannelDrift builtin_sk_linear_feedback(double gamma, std::vector<double> theta, double s_floor) {
  if (!std::isfinite(gamma)) throw std::invalid_argument("builtin_sk_linear_feedback: gamma must be finite");
  if (!(s_floor > 0.0)) throw std::invalid_argument("builtin_sk_linear_feedback: s_floor must be > 0");
  if (theta.empty()) throw std::invalid_argument("builtin_sk_linear_feedback: empty theta");
  double tmax = 0.0;
  for (double t : theta) tmax = std::max(tmax, std::abs(t));
  ChannelDrift d;
  d.evaluate = [gamma, theta, s_floor](double s, std::size_t m, const PathView& prefix) {
    if (m >= theta.size()) throw std::invalid_argument("sk_linear_feedback: unknown symbol");
    const double denom = std::max(s, s_floor);
    return gamma * (theta[m] - prefix.at(s) / denom);
  };
  d.lipschitz_L = std::abs(gamma) * (1.0 / s_floor + kPathDomainBound / (s_floor * s_floor));
  d.growth_L = std::abs(gamma) * std::max(tmax, 1.0 / s_floor);
  d.feedback = true;
  d.name = "sk_linear_feedback";
  return d;
}

// g(s, m, y_0^s) = L * tanh(level(m) + y(s)): bounded by L and Lipschitz in
// the sup-norm with constant L, so Conditions on the drift hold with the same
// declared constant.
inline ChannelDrift builtin_saturated_feedback(double L, const Message& msg) {
  if (!(L > 0.0)) throw std::invalid_argument("builtin_saturated_feedback: L must be > 0");
  std::vector<double> levels = msg.levels();
  ChannelDrift d;
  d.evaluate = [L, levels](double s, std::size_t m, const PathView& prefix) {
    if (m >= levels.size()) throw std::invalid_argument("saturated_feedback: unknown symbol");
    return L * std::tanh(levels[m] + prefix.at(s));
  };
  d.lipschitz_L = L;
  d.growth_L = L;
  d.feedback = true;
  d.name = "saturated_feedback";
  return d;
}

}  // namespace gfchan
