#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gfchan/channel.hpp"
#include "gfchan/conditions.hpp"
#include "gfchan/drift.hpp"
#include "gfchan/message.hpp"
#include "gfchan/power.hpp"

using namespace gfchan;

namespace {
const Message kPm = Message::uniform({-1.0, 1.0});  // index 0 -> -1, index 1 -> +1

SamplePath flat_path(double level, double horizon = 1.0) {
  TimeGrid g = make_even_grid(horizon, 4);
  return SamplePath(g, std::vector<double>(g.n_points(), level));
}
}  // namespace

TEST_CASE("message invariants") {
  CHECK_THROWS_AS(Message({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Message({1.0, 1.0}, {0.5, 0.5}), std::invalid_argument);   // duplicate
  CHECK_THROWS_AS(Message({1.0, 2.0}, {0.7, 0.7}), std::invalid_argument);   // sum != 1
  CHECK_THROWS_AS(Message({1.0, 2.0}, {-0.1, 1.1}), std::invalid_argument);  // negative
  Message m({-1.0, 1.0}, {0.25, 0.75});
  CHECK(m.prior(1) == 0.75);
  CHECK(m.level(0) == -1.0);
}

TEST_CASE("constant antipodal drift") {
  ChannelDrift d = builtin_constant_antipodal(1.0, kPm);
  SamplePath any = flat_path(0.3);
  CHECK(d(0.3, 1, any.full_view()) == 1.0);
  CHECK(d(0.3, 0, any.full_view()) == -1.0);
  // two different prefixes, same (s, m): identical outputs
  SamplePath other = flat_path(-5.0);
  CHECK(d(0.3, 1, any.full_view()) == d(0.3, 1, other.full_view()));
  CHECK(!d.feedback);
  CHECK(probe_feedback_invariance(d, kPm, 200, 5));
}

TEST_CASE("sk linear feedback drift") {
  const double gamma = 0.7;
  const double sf = 1.0 / 16.0;
  ChannelDrift d = builtin_sk_linear_feedback(gamma, {-1.0, 1.0}, sf);
  CHECK(d.feedback);

  SamplePath zero = flat_path(0.0);
  CHECK(d(sf / 2, 1, zero.full_view()) == doctest::Approx(gamma * 1.0).epsilon(1e-12));
  CHECK(d(sf / 2, 0, zero.full_view()) == doctest::Approx(-gamma).epsilon(1e-12));

  // fixed point: y(s) = theta[m] * s kills the error signal for s >= s_floor
  TimeGrid g = make_even_grid(1.0, 8);
  std::vector<double> ramp(g.n_points());
  for (std::size_t i = 0; i < g.n_points(); ++i) ramp[i] = 1.0 * g.point(i);
  SamplePath track(g, std::move(ramp));
  CHECK(d(0.5, 1, track.full_view()) == doctest::Approx(0.0).epsilon(1e-12));

  // affine in the path: shifting y by c shifts g by -gamma c / max(s, sf)
  std::vector<double> shifted(track.values());
  for (double& v : shifted) v += 0.4;
  SamplePath track_c(g, std::move(shifted));
  const double s = 0.5;
  CHECK(d(s, 1, track_c.full_view()) - d(s, 1, track.full_view()) ==
        doctest::Approx(-gamma * 0.4 / std::max(s, sf)).epsilon(1e-12));

  CHECK_THROWS_AS(d(0.5, 7, track.full_view()), std::invalid_argument);
  CHECK_THROWS_AS(builtin_sk_linear_feedback(gamma, {-1.0, 1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("saturated feedback drift") {
  Message m0 = Message::uniform({0.0, 1.0});
  ChannelDrift d = builtin_saturated_feedback(2.0, m0);
  SamplePath zero = flat_path(0.0);
  CHECK(d(0.5, 0, zero.full_view()) == 0.0);  // tanh(0)

  Rng rng(41);
  TimeGrid g = make_even_grid(1.0, 16);
  for (int probe = 0; probe < 10000; ++probe) {
    std::vector<double> v(g.n_points());
    for (double& x : v) x = 6.0 * rng.uniform01() - 3.0;
    SamplePath p(g, std::move(v));
    const double val = d(rng.uniform01(), rng.next_u64() % 2, p.full_view());
    CHECK(std::abs(val) <= 2.0);
  }

  // |g(y) - g(z)| <= L ||y - z|| on random probe pairs (mean-value bound)
  for (int probe = 0; probe < 2000; ++probe) {
    std::vector<double> v(g.n_points()), w(g.n_points());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = 4.0 * rng.uniform01() - 2.0;
      w[i] = v[i] + 0.5 * (rng.uniform01() - 0.5);
    }
    SamplePath a(g, std::move(v)), b(g, std::move(w));
    const double s = rng.uniform01();
    const std::size_t m = rng.next_u64() % 2;
    const double lhs = std::abs(d(s, m, a.full_view()) - d(s, m, b.full_view()));
    CHECK(lhs <= 2.0 * sup_distance(a, b) + 1e-12);
  }
}

TEST_CASE("check_conditions does not falsify the builtins") {
  auto rep0 = check_conditions(builtin_constant_antipodal(1.0, kPm), kPm, 10000, 5);
  CHECK(!rep0.any_violation());
  CHECK(rep0.max_lipschitz_ratio == 0.0);  // path-independent drift

  auto rep1 = check_conditions(builtin_saturated_feedback(2.0, kPm), kPm, 10000, 6);
  CHECK(!rep1.any_violation());

  auto rep2 = check_conditions(builtin_sk_linear_feedback(0.5, {-1.0, 1.0}, 1.0 / 64.0), kPm, 10000, 7);
  CHECK(!rep2.any_violation());

  auto rep3 = check_conditions(builtin_zero(), kPm, 1000, 8);
  CHECK(!rep3.any_violation());
}

TEST_CASE("check_conditions flags a mislabeled drift") {
  ChannelDrift bad = builtin_saturated_feedback(1.0, kPm);
  bad.lipschitz_L = 0.1;  // actual constant is 1.0
  auto rep = check_conditions(bad, kPm, 10000, 9);
  CHECK(rep.lipschitz_violation);
  CHECK(rep.any_violation());
}

TEST_CASE("average power of deterministic-magnitude drifts") {
  TimeGrid g = make_even_grid(1.0, 32);
  ChannelSpec antipodal(builtin_constant_antipodal(1.0, kPm), kPm, 1.0, 2.0);
  auto pe = estimate_average_power(antipodal, g, 500, 3);
  CHECK(pe.value == 1.0);  // g^2 identically 1
  CHECK(pe.stderr_ == 0.0);

  ChannelSpec zero(builtin_zero(), kPm, 1.0, 2.0);
  auto pz = estimate_average_power(zero, g, 500, 4);
  CHECK(pz.value == 0.0);
  CHECK(pz.stderr_ == 0.0);

  CHECK_THROWS_AS(estimate_average_power(zero, g, 1, 4), std::invalid_argument);
}

TEST_CASE("sk feedback power decays with the horizon") {
  ChannelDrift d = builtin_sk_linear_feedback(0.5, {-1.0, 1.0}, 1.0 / 64.0);
  ChannelSpec s1(d, kPm, 1.0, 2.0);
  ChannelSpec s8(d, kPm, 8.0, 2.0);
  auto p1 = estimate_average_power(s1, make_even_grid(1.0, 64), 1500, 3, 2);
  auto p8 = estimate_average_power(s8, make_even_grid(8.0, 512), 1500, 3, 2);
  CHECK(p8.value < p1.value);  // tracking error decays, so does the input power
}
