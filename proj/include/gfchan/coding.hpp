#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gfchan/brownian.hpp"
#include "gfchan/channel.hpp"
#include "gfchan/drift.hpp"
#include "gfchan/euler_maruyama.hpp"
#include "gfchan/message.hpp"
#include "gfchan/numeric.hpp"
#include "gfchan/parallel.hpp"
#include "gfchan/power.hpp"

namespace gfchan {

// Rate-R block code over horizon T under average power P: message set
// {1, ..., ceil(e^{TR})} mapped to a uniform lattice in [-1, 1].
struct CodeConfig {
  double rate = 0.0;  // nats per second
  double horizon = 0.0;
  double power = 0.0;
  TimeGrid grid;

  CodeConfig(double R, double T, double P, TimeGrid g) : rate(R), horizon(T), power(P), grid(std::move(g)) {
    if (!(rate > 0.0)) throw std::invalid_argument("CodeConfig: rate must be > 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("CodeConfig: horizon must be > 0");
    if (!(power > 0.0)) throw std::invalid_argument("CodeConfig: power must be > 0");
    if (!nearly_equal(grid.horizon(), horizon, kGridRelTol)) throw std::invalid_argument("CodeConfig: grid horizon mismatch");
    if (message_count() < 2) throw std::invalid_argument("CodeConfig: message count must be >= 2");
  }

  std::size_t message_count() const { return static_cast<std::size_t>(std::ceil(std::exp(horizon * rate))); }
};

inline std::vector<double> message_lattice(std::size_t count) {
  if (count < 2) throw std::invalid_argument("message_lattice: need >= 2 messages");
  std::vector<double> theta(count);
  for (std::size_t j = 0; j < count; ++j) {
    theta[j] = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(count - 1);
  }
  return theta;
}

// Deterministic gain/filter profiles of the error-tracking feedback scheme.
// The transmitter sends g_i = gamma_i (theta_m - that_{i-1}) where that is a
// linear filter of the observed increments; gamma_i is scaled so that
// gamma_i^2 var_i = power_scale, which keeps the per-step input power flat
// while the estimate variance contracts by 1/(1 + power_scale dt) per step.
struct SkCodeSchedule {
  std::vector<double> theta;        // lattice levels, indexed by message
  std::vector<double> gamma;        // transmit gain for step i
  std::vector<double> filter_gain;  // estimate update gain for step i
  double prior_var = 0.0;

  // receiver estimate after folding the first `steps` increments of y
  double estimate(const PathView& y, std::size_t steps) const {
    double that = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
      that += filter_gain[i] * (y.value(i + 1) - y.value(i));
    }
    return that;
  }
};

inline SkCodeSchedule make_sk_schedule(const CodeConfig& cfg, double power_scale) {
  SkCodeSchedule sched;
  sched.theta = message_lattice(cfg.message_count());
  double var = 0.0;
  for (double t : sched.theta) var += t * t;
  var /= static_cast<double>(sched.theta.size());
  sched.prior_var = var;

  const std::size_t n = cfg.grid.n_steps();
  sched.gamma.resize(n);
  sched.filter_gain.resize(n);
  double s2 = var;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = cfg.grid.step(i);
    const double g = std::sqrt(power_scale / s2);
    sched.gamma[i] = g;
    sched.filter_gain[i] = s2 * g / (1.0 + power_scale * dt);
    s2 = s2 / (1.0 + power_scale * dt);
  }
  return sched;
}

struct TransmissionResult {
  std::size_t sent = 0;     // 1-based message index
  std::size_t decoded = 0;  // 1-based message index
  bool error = false;
  double realized_power = 0.0;  // (1/T) int g^2 ds along this trial
};

// A calibrated instance of the feedback code: schedule plus the drift
// functional it induces. Immutable after construction; transmit() is pure
// given (message, Brownian path). The constant-gain linear-feedback builtin
// cannot serve here: its estimate error shrinks only polynomially in T while
// the message count grows like e^{TR}.
class SkCode {
 public:
  SkCode(CodeConfig cfg, double power_scale)
      : cfg_(std::move(cfg)), sched_(std::make_shared<const SkCodeSchedule>(make_sk_schedule(cfg_, power_scale))) {
    drift_ = make_drift(sched_);
  }

  const CodeConfig& config() const { return cfg_; }
  const SkCodeSchedule& schedule() const { return *sched_; }
  const ChannelDrift& drift() const { return drift_; }

  Message message_law() const { return Message::uniform(sched_->theta); }

  // One coded transmission: run the discretized channel, decode by mapping
  // the terminal tracked estimate to the nearest lattice point (ties toward
  // the smaller index).
  TransmissionResult transmit(std::size_t msg_index, const BrownianPath& b) const {
    const std::size_t K = cfg_.message_count();
    if (msg_index < 1 || msg_index > K) throw std::invalid_argument("SkCode::transmit: message index out of range");
    const std::size_t m = msg_index - 1;
    const EMPath em = simulate_em(drift_, m, cfg_.grid, b);

    const PathView full = em.as_sample_path().full_view();
    const double that_T = sched_->estimate(full, cfg_.grid.n_steps());
    std::size_t best = 0;
    double best_d = std::abs(sched_->theta[0] - that_T);
    for (std::size_t j = 1; j < K; ++j) {
      const double dj = std::abs(sched_->theta[j] - that_T);
      if (dj < best_d) {
        best = j;
        best_d = dj;
      }
    }

    KahanSum pw;
    for (std::size_t i = 0; i < cfg_.grid.n_steps(); ++i) {
      const double g = drift_(cfg_.grid.point(i), m, em.prefix_view(i + 1));
      pw.add(g * g * cfg_.grid.step(i));
    }

    TransmissionResult r;
    r.sent = msg_index;
    r.decoded = best + 1;
    r.error = r.sent != r.decoded;
    r.realized_power = pw.value() / cfg_.horizon;
    return r;
  }

 private:
  // A prefix with i+1 points selects step i's gain and an estimate folded
  // from the i increments observed so far. Tied to cfg.grid by construction.
  static ChannelDrift make_drift(std::shared_ptr<const SkCodeSchedule> sched) {
    ChannelDrift d;
    const double gmax = sched->gamma.empty() ? 0.0 : sched->gamma.back();
    double ksum = 0.0;
    for (double k : sched->filter_gain) ksum += std::abs(k);
    d.evaluate = [sched](double, std::size_t m, const PathView& prefix) {
      if (m >= sched->theta.size()) throw std::invalid_argument("sk coding drift: unknown symbol");
      const std::size_t step = std::min(prefix.n_points() - 1, sched->gamma.size() - 1);
      const std::size_t folded = std::min(prefix.n_points() - 1, sched->filter_gain.size());
      return sched->gamma[step] * (sched->theta[m] - sched->estimate(prefix, folded));
    };
    d.lipschitz_L = gmax * (1.0 + 2.0 * ksum);
    d.growth_L = gmax * (1.0 + 2.0 * ksum);
    d.feedback = true;
    d.name = "sk_coding";
    return d;
  }

  CodeConfig cfg_;
  std::shared_ptr<const SkCodeSchedule> sched_;
  ChannelDrift drift_;
};

// Fixed-point calibration of the power scale so the realized average power
// lands near target_fraction * P (0.9 P by default, comfortably inside the
// constraint).
inline double calibrate_sk_power(const CodeConfig& cfg, std::uint64_t seed, double target_fraction = 0.9,
                                 std::size_t probe_paths = 2048, int threads = 1) {
  const double target = target_fraction * cfg.power;
  double scale = target;
  for (int it = 0; it < 3; ++it) {
    const SkCode code(cfg, scale);
    const ChannelSpec spec(code.drift(), code.message_law(), cfg.horizon, cfg.power);
    const PowerEstimate pe = estimate_average_power(spec, cfg.grid, probe_paths, substream(seed, 77, it), threads);
    if (pe.value <= 0.0) break;
    scale *= target / pe.value;
  }
  return scale;
}

// Convenience wrapper: calibrate, then transmit one message.
inline TransmissionResult sk_transmit(const CodeConfig& cfg, std::size_t msg_index, const BrownianPath& b,
                                      std::uint64_t calibration_seed = 1) {
  const SkCode code(cfg, calibrate_sk_power(cfg, calibration_seed));
  return code.transmit(msg_index, b);
}

struct ErrorRateRow {
  double horizon = 0.0;
  std::size_t message_count = 0;
  double p_error = 0.0;
  double stderr_ = 0.0;  // Wilson half width at z = 1
  double realized_power_mean = 0.0;
  double realized_power_stderr = 0.0;
  bool power_violation = false;
  std::size_t n_trials = 0;
};

// Error-probability curve over a list of horizons. Messages are drawn
// uniformly per trial; each horizon reuses the base config's rate, power and
// grid density (steps per second).
inline std::vector<ErrorRateRow> error_rate_curve(const CodeConfig& cfg_base, const std::vector<double>& horizons,
                                                  std::size_t n_trials, std::uint64_t seed, int threads = 1) {
  if (n_trials < 100) throw std::invalid_argument("error_rate_curve: need n_trials >= 100 per horizon");
  if (horizons.empty()) throw std::invalid_argument("error_rate_curve: no horizons");
  const double steps_per_sec = static_cast<double>(cfg_base.grid.n_steps()) / cfg_base.horizon;

  std::vector<ErrorRateRow> rows;
  rows.reserve(horizons.size());
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    const double T = horizons[h];
    const std::size_t n_steps = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(steps_per_sec * T)));
    const CodeConfig cfg(cfg_base.rate, T, cfg_base.power, make_even_grid(T, n_steps));
    const double scale = calibrate_sk_power(cfg, substream(seed, 1000 + h, 0), 0.9, 2048, threads);
    const SkCode code(cfg, scale);
    const std::size_t K = cfg.message_count();

    std::vector<double> errors(n_trials, 0.0);
    std::vector<double> powers(n_trials, 0.0);
    for_each_index(n_trials, threads, [&](std::size_t t) {
      Rng draw(seed, substream(seed, t, 2 * h));
      const std::size_t msg = 1 + static_cast<std::size_t>(draw.next_u64() % K);
      const BrownianPath b = sample_brownian(cfg.grid, substream(seed, t, 2 * h + 1));
      const TransmissionResult r = code.transmit(msg, b);
      errors[t] = r.error ? 1.0 : 0.0;
      powers[t] = r.realized_power;
    });

    std::size_t n_err = 0;
    for (double e : errors) n_err += e > 0.5 ? 1 : 0;
    const MeanStderr pw = batch_mean_stderr(powers);
    ErrorRateRow row;
    row.horizon = T;
    row.message_count = K;
    row.p_error = static_cast<double>(n_err) / static_cast<double>(n_trials);
    row.stderr_ = wilson_stderr(n_err, n_trials);
    row.realized_power_mean = pw.mean;
    row.realized_power_stderr = pw.stderr_;
    row.power_violation = pw.mean > cfg.power + 3.0 * pw.stderr_;
    row.n_trials = n_trials;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gfchan
