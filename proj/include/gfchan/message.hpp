#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gfchan/rng.hpp"

namespace gfchan {

// Finite message alphabet with a prior pmf. Symbols are referred to by index;
// each carries a numeric level used by the drift functionals.
class Message {
 public:
  Message(std::vector<double> levels, std::vector<double> prior)
      : levels_(std::move(levels)), prior_(std::move(prior)) {
    if (levels_.empty()) throw std::invalid_argument("Message: empty alphabet");
    if (levels_.size() != prior_.size()) throw std::invalid_argument("Message: prior size mismatch");
    double s = 0.0;
    for (double p : prior_) {
      if (p < 0.0) throw std::invalid_argument("Message: negative prior mass");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("Message: prior must sum to 1");
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      for (std::size_t j = i + 1; j < levels_.size(); ++j) {
        if (levels_[i] == levels_[j]) throw std::invalid_argument("Message: duplicate symbol");
      }
    }
  }

  static Message uniform(std::vector<double> levels) {
    const std::size_t k = levels.size();
    if (k == 0) throw std::invalid_argument("Message: empty alphabet");
    return Message(std::move(levels), std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  std::size_t size() const { return levels_.size(); }
  double level(std::size_t m) const { return levels_.at(m); }
  double prior(std::size_t m) const { return prior_.at(m); }
  const std::vector<double>& levels() const { return levels_; }
  const std::vector<double>& priors() const { return prior_; }

  std::size_t sample(Rng& rng) const {
    const double u = rng.uniform01();
    double c = 0.0;
    for (std::size_t m = 0; m < prior_.size(); ++m) {
      c += prior_[m];
      if (u <= c) return m;
    }
    return prior_.size() - 1;
  }

 private:
  std::vector<double> levels_;
  std::vector<double> prior_;
};

}  // namespace gfchan
