#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "gfchan/channel.hpp"
#include "gfchan/girsanov.hpp"
#include "gfchan/numeric.hpp"

namespace gfchan {

// Posterior pmf over the message alphabet given an observed discretized path.
// Computed in log space; the Gaussian normalization constants of the step
// densities are message-independent and cancel between numerator and mixture.
struct PosteriorWeights {
  std::vector<double> weights;

  double operator[](std::size_t m) const { return weights[m]; }
  std::size_t size() const { return weights.size(); }
};

// w(m) proportional to p_M(m) * exp(-A3(m, em)), normalized via the max-shift.
// Exact point mass for a degenerate prior; exact prior for a zero drift.
inline PosteriorWeights posterior_from_log_likelihoods(std::span<const double> prior,
                                                       std::span<const double> neg_a3) {
  if (prior.size() != neg_a3.size() || prior.empty()) {
    throw std::invalid_argument("posterior_from_log_likelihoods: size mismatch");
  }
  double amax = neg_a3[0];
  for (double v : neg_a3) amax = std::max(amax, v);
  std::vector<double> w(prior.size());
  double s = 0.0;
  for (std::size_t m = 0; m < prior.size(); ++m) {
    w[m] = prior[m] * std::exp(neg_a3[m] - amax);
    s += w[m];
  }
  for (double& v : w) v /= s;
  return {std::move(w)};
}

inline PosteriorWeights posterior_weights(const ChannelSpec& spec, const EMPath& em) {
  const std::size_t K = spec.message.size();
  std::vector<double> neg_a3(K);
  for (std::size_t m = 0; m < K; ++m) neg_a3[m] = -exponent_A3(spec.drift, m, em).value;
  return posterior_from_log_likelihoods(spec.message.priors(), neg_a3);
}

}  // namespace gfchan
