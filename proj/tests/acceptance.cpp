// Acceptance suite: one criterion per function, one [PASS]/[FAIL] line each.
// Run all:        ./acceptance
// Run criterion:  ./acceptance <1..9>
// Exit status is the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gfchan/capacity.hpp"
#include "gfchan/coding.hpp"
#include "gfchan/experiments.hpp"
#include "gfchan/mi.hpp"

using namespace gfchan;

namespace {

constexpr double kBpskMiSnr1 = 0.3368308203468;  // frozen quadrature golden value
const int kThreads = 4;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

Message pm() { return Message::uniform({-1.0, 1.0}); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.5g", v);
  return buf;
}

// --- Criterion 1: band-limited capacity chain -------------------------------
Check criterion1() {
  Check c;
  const double P = 2.0;
  double prev = -1.0;
  for (int k = 0; k <= 20; ++k) {
    const double v = capacity_band(P, std::pow(2.0, k));
    c.require(v > prev, "not strictly increasing at omega=2^" + std::to_string(k));
    c.require(v < P / 2.0, "not bounded by P/2 at omega=2^" + std::to_string(k));
    prev = v;
  }
  const double at1 = capacity_band(P, 1.0);
  c.require(std::abs(at1 - std::log(2.0)) < 1e-15, "C(1) != ln 2");
  const double at20 = capacity_band(P, std::pow(2.0, 20));
  c.require(std::abs(at20 - 1.0) < 1e-6, "C(2^20) not within 1e-6 of P/2");
  c.note("C(1)=" + fmt(at1) + " C(2^20)=" + fmt(at20));
  return c;
}

// --- Criterion 2: strong-convergence rate of the discretized paths ----------
Check criterion2() {
  Check c;
  std::vector<TimeGrid> grids = {make_even_grid(1.0, 8)};
  for (int l = 1; l < 5; ++l) grids.push_back(refine_grid(grids.back(), 2));  // n = 8..128

  // zero drift: error exactly 0
  {
    ChannelSpec spec(builtin_zero(), pm(), 1.0, 2.0);
    auto rows = strong_error_study(spec, grids, 200, 1, 64, kThreads);
    for (const auto& r : rows) c.require(r.mean_sq_sup == 0.0, "zero-drift error not exactly 0");
  }

  auto slope_of = [&](const ChannelDrift& d, std::uint64_t seed) {
    ChannelSpec spec(d, pm(), 1.0, 2.0);
    auto rows = strong_error_study(spec, grids, 2000, seed, 64, kThreads);
    std::vector<double> lx, ly;
    for (const auto& r : rows) {
      lx.push_back(std::log(r.max_step));
      ly.push_back(std::log(r.mean_sq_sup));
    }
    return ols_slope(lx, ly);
  };
  const double s_sat = slope_of(builtin_saturated_feedback(1.0, pm()), 21);
  const double s_sk = slope_of(builtin_sk_linear_feedback(0.5, {-1.0, 1.0}, 1.0 / 128.0), 22);
  c.require(s_sat >= 0.8, "saturated slope " + fmt(s_sat) + " < 0.8");
  c.require(s_sk >= 0.8, "sk slope " + fmt(s_sk) + " < 0.8");
  c.note("slope(saturated)=" + fmt(s_sat) + " slope(sk)=" + fmt(s_sk));
  return c;
}

// --- Criterion 3: convergence to the oracle (no-feedback case) --------------
Check criterion3() {
  Check c;
  ChannelSpec spec(builtin_constant_antipodal(1.0, pm()), pm(), 1.0, 2.0);
  auto rows = mi_convergence_study(spec, make_even_grid(1.0, 8), 6, 200000, 31, kThreads);
  const auto& fin = rows.back();
  const double tol = std::max(3.0 * fin.stderr_, 0.01);
  c.require(std::abs(fin.mi_nats - kBpskMiSnr1) <= tol,
            "finest level " + fmt(fin.mi_nats) + " not within " + fmt(tol) + " of oracle " + fmt(kBpskMiSnr1));
  c.note("finest=" + fmt(fin.mi_nats) + "+-" + fmt(fin.stderr_) + " oracle=" + fmt(kBpskMiSnr1));
  return c;
}

// --- Criterion 4: convergence self-consistency (feedback case) --------------
Check criterion4() {
  Check c;
  ChannelSpec spec(builtin_saturated_feedback(1.0, pm()), pm(), 1.0, 2.0);
  auto rows = mi_convergence_study(spec, make_even_grid(1.0, 8), 5, 30000, 41, kThreads);
  for (std::size_t l = 1; l < rows.size(); ++l) {
    const double slack =
        3.0 * std::sqrt(rows[l - 1].stderr_ * rows[l - 1].stderr_ + rows[l].stderr_ * rows[l].stderr_);
    c.require(rows[l].mi_nats >= rows[l - 1].mi_nats - slack,
              "level " + std::to_string(l) + " drops by more than the slack");
  }
  const auto& a = rows[rows.size() - 2];
  const auto& b = rows.back();
  const double comb = std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
  c.require(std::abs(b.mi_nats - a.mi_nats) < 3.0 * comb, "two finest levels differ by >= 3 combined stderr");
  c.note("finest pair " + fmt(a.mi_nats) + " -> " + fmt(b.mi_nats) + " (3se=" + fmt(3.0 * comb) + ")");
  return c;
}

std::vector<ChannelSpec> builtin_channels(const TimeGrid& grid) {
  std::vector<ChannelSpec> specs;
  specs.emplace_back(builtin_zero(), pm(), 1.0, 2.0);
  specs.emplace_back(builtin_constant_antipodal(1.0, pm()), pm(), 1.0, 2.0);
  specs.emplace_back(builtin_saturated_feedback(1.0, pm()), pm(), 1.0, 2.0);
  specs.emplace_back(builtin_sk_linear_feedback(0.5, {-1.0, 1.0}, grid.step(0)), pm(), 1.0, 2.0);
  return specs;
}

// --- Criterion 5: upper-bound chain on every builtin channel ----------------
Check criterion5() {
  Check c;
  const TimeGrid grid = make_even_grid(1.0, 128);
  for (const auto& spec : builtin_channels(grid)) {
    const auto pw = estimate_average_power(spec, grid, 20000, 51, kThreads);
    c.require(pw.value <= spec.power_limit + 3.0 * pw.stderr_, spec.drift.name + ": power constraint not honored");
    const auto bc = mi_bound_chain(spec, grid, 20000, 52, kThreads);
    const auto mi = mi_plugin(spec, grid, 20000, 52, kThreads);
    c.require(bc.b_log <= bc.b_power, spec.drift.name + ": b_log > b_power");
    c.require(bc.b_power <= bc.b_half_pt + 3.0 * bc.stderr_power, spec.drift.name + ": b_power > PT/2");
    c.require(mi.value <= bc.b_log + 3.0 * (mi.stderr_ + bc.stderr_log), spec.drift.name + ": mi > b_log");
    c.note(spec.drift.name + ": mi=" + fmt(mi.value) + " <= " + fmt(bc.b_log) + " <= " + fmt(bc.b_power) +
           " <= " + fmt(bc.b_half_pt));
  }
  return c;
}

// --- Criterion 6: two-estimator cross-check ---------------------------------
Check criterion6() {
  Check c;
  const TimeGrid grid = make_even_grid(1.0, 128);
  for (const auto& spec : builtin_channels(grid)) {
    const auto p = mi_plugin(spec, grid, 100000, 61, kThreads);
    const auto m = mi_cmmse(spec, grid, 100000, 61, kThreads);
    const double comb = std::sqrt(p.stderr_ * p.stderr_ + m.stderr_ * m.stderr_);
    const bool agree = spec.drift.name == "zero" ? (p.value == 0.0 && m.value == 0.0)
                                                 : std::abs(p.value - m.value) <= 3.0 * comb;
    c.require(agree, spec.drift.name + ": |" + fmt(p.value) + " - " + fmt(m.value) + "| > 3*" + fmt(comb));
    c.note(spec.drift.name + ": plugin=" + fmt(p.value) + " cmmse=" + fmt(m.value));
  }
  return c;
}

// --- Criterion 7: exact zero-drift identities -------------------------------
Check criterion7() {
  Check c;
  const TimeGrid grid = make_even_grid(1.0, 37);
  const ChannelDrift zero = builtin_zero();
  ChannelSpec spec(zero, pm(), 1.0, 2.0);

  const BrownianPath b = sample_brownian(grid, 71);
  const EMPath em = simulate_em(zero, 0, grid, b);
  c.require(em.values() == b.values(), "EM path != Brownian path bitwise");
  c.require(exponent_A1(zero, 0, em.as_sample_path()).value == 0.0, "A1 != 0");
  c.require(exponent_A2(zero, 0, grid, em.as_sample_path()).value == 0.0, "A2 != 0");
  c.require(exponent_A3(zero, 0, em).value == 0.0, "A3 != 0");

  const auto mi = mi_plugin(spec, grid, 500, 72);
  c.require(mi.value == 0.0 && mi.stderr_ == 0.0, "plug-in MI not exactly 0");
  const auto cm = mi_cmmse(spec, grid, 500, 72);
  c.require(cm.value == 0.0 && cm.stderr_ == 0.0, "cmmse MI not exactly 0");
  return c;
}

// --- Criterion 8: operational layer (feedback code demo) --------------------
Check criterion8() {
  Check c;
  const double P = 2.0;
  const double R = 0.4 * (P / 2.0);
  const CodeConfig base(R, 2.0, P, make_even_grid(2.0, 128));  // 64 steps per second
  auto rows = error_rate_curve(base, {2.0, 4.0, 8.0}, 10000, 81, kThreads);
  std::string curve;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    curve += (i ? " -> " : "") + fmt(r.p_error);
    c.require(r.realized_power_mean <= P + 3.0 * r.realized_power_stderr,
              "T=" + fmt(r.horizon) + ": realized power " + fmt(r.realized_power_mean) + " above limit");
    if (i > 0) {
      const double slack = 2.0 * std::sqrt(rows[i - 1].stderr_ * rows[i - 1].stderr_ + r.stderr_ * r.stderr_);
      c.require(r.p_error <= rows[i - 1].p_error + slack,
                "P_e not decreasing at T=" + fmt(r.horizon) + " (slack " + fmt(slack) + ")");
    }
  }
  c.note("P_e: " + curve + "; power: " + fmt(rows[0].realized_power_mean) + ", " +
         fmt(rows[1].realized_power_mean) + ", " + fmt(rows[2].realized_power_mean));
  return c;
}

// --- Criterion 9: byte-identical reruns -------------------------------------
Check criterion9() {
  Check c;
  namespace fs = std::filesystem;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const fs::path root = fs::temp_directory_path() / "gfchan_acceptance_c9";
  fs::remove_all(root);

  const std::vector<std::pair<std::string, std::string>> cases = {
      {"mi_crosscheck",
       "experiment = mi-crosscheck\nchannel = sk_linear_feedback\ngamma = 0.5\nT = 1\nP = 2\n"
       "grid_n = 32\nn_paths = 500\nseed = 91\ndeterministic = true\n"},
      {"em_error",
       "experiment = em-error\nchannel = saturated_feedback\nL = 1\nT = 1\nP = 2\ngrid_n = 8\n"
       "levels = 3\nref_factor = 16\nn_paths = 300\nseed = 92\ndeterministic = true\n"},
      {"capacity",
       "experiment = capacity-sweep\nP = 2\nomegas = 1,10,100\nseed = 93\ndeterministic = true\n"}};

  for (const auto& [name, text] : cases) {
    std::vector<std::string> csv_bytes;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / (name + "_" + std::to_string(rep));
      ExperimentConfig cfg;
      // alternate the worker count to show scheduling independence
      auto errors = parse_config_text(text + "threads = " + (rep == 0 ? std::string("1") : std::string("3")) +
                                          "\noutput_dir = " + dir.string() + "\n",
                                      cfg);
      if (!errors.empty()) {
        c.require(false, name + ": config did not validate");
        return c;
      }
      const RunManifest man = run_experiment(cfg);
      std::string bytes;
      for (const auto& f : man.output_files) {
        if (f.size() > 4 && f.substr(f.size() - 4) == ".csv") bytes += slurp(f);
      }
      csv_bytes.push_back(bytes);
    }
    c.require(!csv_bytes[0].empty(), name + ": no CSV output");
    c.require(csv_bytes[0] == csv_bytes[1], name + ": reruns differ");
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  using CriterionFn = std::function<Check()>;
  const std::vector<std::pair<std::string, CriterionFn>> criteria = {
      {"band-limited capacity chain", criterion1},
      {"strong-convergence rate of the discretization", criterion2},
      {"plug-in MI converges to the quadrature oracle", criterion3},
      {"feedback MI convergence self-consistency", criterion4},
      {"upper-bound chain mi <= b_log <= b_power <= PT/2", criterion5},
      {"plug-in vs cmmse estimator agreement", criterion6},
      {"exact zero-drift identities", criterion7},
      {"feedback code: error decay under the power budget", criterion8},
      {"byte-identical reruns in deterministic mode", criterion9},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "usage: %s [1..%zu]\n", argv[0], criteria.size());
    return 64;
  }

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Check c = criteria[i].second();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %zu: %s (%.1fs)%s%s\n", c.ok ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), secs, c.detail.empty() ? "" : " -- ", c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  }
  return failures;
}
