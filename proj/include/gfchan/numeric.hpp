#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace gfchan {

// Compensated (Kahan) accumulator. Keeps O(n)-term sums stable for n up to ~1e5.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// log(sum_i p[i] * exp(a[i])) via the max-shift trick.
// Exact 0 when all a[i] == 0 and sum(p) == 1 in floating point.
inline double log_mix_exp(std::span<const double> p, std::span<const double> a) {
  if (p.size() != a.size() || p.empty()) throw std::invalid_argument("log_mix_exp: size mismatch");
  double amax = -std::numeric_limits<double>::infinity();
  for (double v : a) amax = std::max(amax, v);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * std::exp(a[i] - amax);
  return amax + std::log(s);
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

// Batch-means standard error over per-sample values (fixed index order, so the
// result does not depend on how samples were produced across threads).
inline MeanStderr batch_mean_stderr(std::span<const double> values, std::size_t n_batches = 32) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("batch_mean_stderr: need at least 2 values");
  const std::size_t k = std::min(n_batches, n);
  KahanSum total;
  for (double v : values) total.add(v);
  const double mean = total.value() / static_cast<double>(n);

  std::vector<double> bm(k, 0.0);
  for (std::size_t b = 0; b < k; ++b) {
    const std::size_t lo = b * n / k;
    const std::size_t hi = (b + 1) * n / k;
    KahanSum s;
    for (std::size_t i = lo; i < hi; ++i) s.add(values[i]);
    bm[b] = s.value() / static_cast<double>(hi - lo);
  }
  double ss = 0.0;
  for (double m : bm) ss += (m - mean) * (m - mean);
  const double se = std::sqrt(ss / (static_cast<double>(k) * static_cast<double>(k - 1)));
  return {mean, se, n};
}

// Wilson-interval half width at z=1, used as the stderr of a proportion.
// Nonzero even at 0 successes, which keeps slack checks meaningful.
inline double wilson_stderr(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("wilson_stderr: no trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z = 1.0;
  return (z / (1.0 + z * z / n)) * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
}

// Least-squares slope of y against x.
inline double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols_slope: bad input");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("ols_slope: degenerate x");
  return (n * sxy - sx * sy) / denom;
}

// ln(1 + e^a) without overflow.
inline double softplus(double a) {
  if (a > 0) return a + std::log1p(std::exp(-a));
  return std::log1p(std::exp(a));
}

// Gauss-Hermite nodes/weights for weight e^{-x^2} (physicists' convention).
// Newton iteration on the normalized three-term recurrence; symmetric nodes.
inline void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  double z = 0.0;
  std::vector<double> found;
  found.reserve(m);
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * found[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * found[1];
    } else {
      z = 2.0 * z - found[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    found.push_back(z);
    nodes[i] = z;
    nodes[n - 1 - i] = -z;
    weights[i] = 2.0 / (pp * pp);
    weights[n - 1 - i] = weights[i];
  }
  // odd n: the middle node is exactly 0
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

inline bool nearly_equal(double a, double b, double rel_tol, double abs_tol = 0.0) {
  const double diff = std::abs(a - b);
  return diff <= abs_tol || diff <= rel_tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace gfchan
