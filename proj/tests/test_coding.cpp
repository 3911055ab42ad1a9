#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gfchan/coding.hpp"

using namespace gfchan;

TEST_CASE("code config message counts") {
  TimeGrid g2 = make_even_grid(2.0, 128);
  CHECK(CodeConfig(0.4, 2.0, 2.0, g2).message_count() == 3);  // ceil(e^0.8)
  TimeGrid g8 = make_even_grid(8.0, 128);
  CHECK(CodeConfig(0.4, 8.0, 2.0, g8).message_count() == 25);  // ceil(e^3.2)

  CHECK_THROWS_AS(CodeConfig(0.0, 2.0, 2.0, g2), std::invalid_argument);
  CHECK_THROWS_AS(CodeConfig(-0.4, 2.0, 2.0, g2), std::invalid_argument);
  CHECK_THROWS_AS(CodeConfig(0.4, 2.0, 0.0, g2), std::invalid_argument);
  // grid horizon must match
  CHECK_THROWS_AS(CodeConfig(0.4, 8.0, 2.0, g2), std::invalid_argument);
}

TEST_CASE("message lattice spans [-1, 1] uniformly") {
  auto t = message_lattice(5);
  CHECK(t.front() == -1.0);
  CHECK(t.back() == 1.0);
  CHECK(t[2] == 0.0);
  CHECK_THROWS_AS(message_lattice(1), std::invalid_argument);
}

TEST_CASE("noiseless transmission decodes every message") {
  TimeGrid g = make_even_grid(2.0, 128);
  CodeConfig cfg(0.4, 2.0, 2.0, g);
  SkCode code(cfg, 1.8);
  BrownianPath b0(g, std::vector<double>(g.n_points(), 0.0));
  for (std::size_t m = 1; m <= cfg.message_count(); ++m) {
    auto r = code.transmit(m, b0);
    CHECK(r.sent == m);
    CHECK(r.decoded == m);
    CHECK(!r.error);
  }
}

TEST_CASE("transmission is deterministic and validates the index") {
  TimeGrid g = make_even_grid(2.0, 64);
  CodeConfig cfg(0.4, 2.0, 2.0, g);
  SkCode code(cfg, 1.8);
  BrownianPath b = sample_brownian(g, 33);
  auto r1 = code.transmit(2, b);
  auto r2 = code.transmit(2, b);
  CHECK(r1.decoded == r2.decoded);
  CHECK(r1.realized_power == r2.realized_power);
  CHECK_THROWS_AS(code.transmit(0, b), std::invalid_argument);
  CHECK_THROWS_AS(code.transmit(cfg.message_count() + 1, b), std::invalid_argument);

  // convenience wrapper is deterministic too
  auto r3 = sk_transmit(cfg, 2, b, 5);
  auto r4 = sk_transmit(cfg, 2, b, 5);
  CHECK(r3.decoded == r4.decoded);
  CHECK(r3.error == (r3.sent != r3.decoded));
}

TEST_CASE("zero-rate limit: two messages, growing horizon") {
  // R chosen so ceil(e^{TR}) stays 2 for all tested horizons
  const double R = 0.99 * std::log(2.0) / 4.0;
  TimeGrid g = make_even_grid(1.0, 64);
  CodeConfig base(R, 1.0, 2.0, g);
  auto rows = error_rate_curve(base, {1.0, 2.0, 4.0}, 600, 91, 2);
  for (const auto& r : rows) {
    CHECK(r.message_count == 2);
    CHECK(r.p_error >= 0.0);
    CHECK(r.p_error <= 1.0);
    CHECK(r.stderr_ <= 0.5);
    CHECK(r.realized_power_mean <= base.power + 3.0 * r.realized_power_stderr);
  }
  // decay toward zero error at fixed (sub-capacity) rate
  CHECK(rows.back().p_error <= rows.front().p_error);
  CHECK(rows.back().p_error <= 0.02);

  CHECK_THROWS_AS(error_rate_curve(base, {1.0}, 50, 91), std::invalid_argument);
}
