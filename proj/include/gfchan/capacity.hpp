#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gfchan/numeric.hpp"

namespace gfchan {

// Band-limited capacity omega * log(1 + P / (2 omega)), in nats per second.
// Strictly increasing in omega with supremum P/2.
inline double capacity_band(double power, double omega) {
  if (!(power > 0.0)) throw std::invalid_argument("capacity_band: power must be > 0");
  if (!(omega > 0.0)) throw std::invalid_argument("capacity_band: omega must be > 0");
  return omega * std::log1p(power / (2.0 * omega));
}

// Mutual information of the binary antipodal AWGN channel with unit noise, in
// nats: I = ln 2 - E_{Z ~ N(sqrt(snr), 1)}[ln(1 + exp(-2 sqrt(snr) Z))].
// Deterministic Gauss-Hermite quadrature; serves as the independent golden
// oracle for the path-free constant drift, where Y(T) is sufficient for M.
inline double bpsk_awgn_oracle(double snr, int nodes = 64) {
  if (snr < 0.0) throw std::invalid_argument("bpsk_awgn_oracle: snr must be >= 0");
  if (nodes < 64) throw std::invalid_argument("bpsk_awgn_oracle: need >= 64 nodes");
  if (snr == 0.0) return 0.0;
  std::vector<double> x, w;
  gauss_hermite(nodes, x, w);
  const double mu = std::sqrt(snr);
  const double inv_sqrt_pi = 0.5641895835477563;
  const double sqrt2 = 1.4142135623730951;
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    acc += w[i] * softplus(-2.0 * mu * (mu + sqrt2 * x[i]));
  }
  return std::log(2.0) - inv_sqrt_pi * acc;
}

}  // namespace gfchan
