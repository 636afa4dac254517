#include <doctest.h>

#include <cmath>

#include "dca/protocols.hpp"

using namespace dca;

namespace {

FlowState state(double w, double d_hat, double r_hat, double alpha) {
  FlowState s;
  s.w = w;
  s.d_hat = d_hat;
  s.r_hat = r_hat;
  s.q_hat = r_hat - d_hat;
  s.x = w / r_hat;
  s.mode = ControlMode::Normal;
  s.alpha_effective = alpha;
  return s;
}

FlowConfig with_gamma(double gamma) {
  FlowConfig c;
  c.gamma = gamma;
  return c;
}

}  // namespace

TEST_CASE("fast_update examples") {
  CHECK(fast_update(state(50, 0.1, 0.1, 20), with_gamma(1.0)) == doctest::Approx(70));
  CHECK(fast_update(state(100, 0.1, 0.125, 20), with_gamma(0.5)) == doctest::Approx(100));
  CHECK(fast_update(state(100, 0.1, 0.15, 20), with_gamma(0.5)) == doctest::Approx(93.333333333));
}

TEST_CASE("fast_update rejects non-positive delays") {
  CHECK_THROWS_AS(fast_update(state(10, 0.0, 0.1, 20), with_gamma(0.5)), Error);
  CHECK_THROWS_AS(fast_update(state(10, 0.1, 0.0, 20), with_gamma(0.5)), Error);
}

TEST_CASE("fast_update floors the window at one packet") {
  FlowState s = state(1.0, 0.001, 10.0, 0.0);
  s.alpha_effective = 1e-9;
  CHECK(fast_update(s, with_gamma(1.0)) == doctest::Approx(kMinWindow));
}

TEST_CASE("fast_update is stationary exactly at the fixed-point window") {
  for (double gamma : {0.2, 0.5, 1.0})
    for (double q : {0.001, 0.02, 0.3}) {
      const double d = 0.07;
      const double w = fast_fixed_point_window(20, d, q);
      CHECK(w == doctest::Approx(20 * (d + q) / q));
      CHECK(fast_update(state(w, d, d + q, 20), with_gamma(gamma)) == doctest::Approx(w));
    }
}

TEST_CASE("fast_update moves toward the fixed point and never overshoots for gamma <= 1") {
  const double d = 0.1, q = 0.02, alpha = 50;
  const double star = fast_fixed_point_window(alpha, d, q);
  for (double gamma : {0.1, 0.5, 1.0})
    for (double w : {1.0, 10.0, 100.0, 1000.0, 5000.0}) {
      const double next = fast_update(state(w, d, d + q, alpha), with_gamma(gamma));
      CHECK(std::abs(next - star) <= std::abs(w - star) + 1e-9);
      if (w < star) CHECK(next <= star + 1e-9);
      if (w > star) CHECK(next >= star - 1e-9);
    }
}

TEST_CASE("fast_flow_derivative examples") {
  CHECK(fast_flow_derivative(0.025, 800, 20, 0.5) == doctest::Approx(0.0));
  CHECK(fast_flow_derivative(0.0, 800, 20, 0.5) == doctest::Approx(10.0));
  CHECK(fast_flow_derivative(0.05, 800, 20, 0.5) == doctest::Approx(-10.0));
}

TEST_CASE("fast_flow_derivative sign matches qx against alpha") {
  for (double q : {0.0, 0.01, 0.05})
    for (double x : {100.0, 1000.0, 4000.0}) {
      const double v = fast_flow_derivative(q, x, 20, 0.5);
      if (q * x < 20) CHECK(v > 0);
      if (q * x > 20) CHECK(v < 0);
    }
}

TEST_CASE("fast_equilibrium_rate examples") {
  CHECK(fast_equilibrium_rate(200, 0.010) == doctest::Approx(20000));
  CHECK(fast_equilibrium_rate(20, 0.001) == doctest::Approx(20000));
  CHECK_THROWS_AS(fast_equilibrium_rate(200, 0.0), Error);
  CHECK_THROWS_AS(fast_equilibrium_rate(200, 1e-5, 1e-4), Error);
}

TEST_CASE("equilibrium_backlog examples") {
  CHECK(equilibrium_backlog(1, 200) == doctest::Approx(200));
  CHECK(equilibrium_backlog(8, 200) == doctest::Approx(1600));
  CHECK(equilibrium_backlog(4, 50) == doctest::Approx(200));
}

TEST_CASE("reno_update examples") {
  RenoConfig cfg;
  CHECK(reno_update(state(64, 0.1, 0.1, 0), cfg, true) == doctest::Approx(32));
  CHECK(reno_update(state(64, 0.1, 0.1, 0), cfg, false) == doctest::Approx(65));
  CHECK(reno_update(state(1, 0.1, 0.1, 0), cfg, true) == doctest::Approx(1));
}

TEST_CASE("reno_update never drops below one packet") {
  RenoConfig cfg;
  cfg.multiplicative_decrease = 0.1;
  for (double w : {1.0, 1.5, 5.0, 9.0}) CHECK(reno_update(state(w, 0.1, 0.1, 0), cfg, true) >= 1.0);
}

TEST_CASE("vegas_update examples") {
  const VegasBand band{1, 3};
  // diff = w (1 - d/r)
  CHECK(vegas_update(state(20, 0.1, 0.11, 0), band) == doctest::Approx(20));  // diff 1.82
  CHECK(vegas_update(state(20, 0.1, 0.1, 0), band) == doctest::Approx(21));   // diff 0
  CHECK(vegas_update(state(20, 0.1, 0.125, 0), band) == doctest::Approx(19)); // diff 4
  CHECK(vegas_backlog_estimate(state(20, 0.1, 0.125, 0)) == doctest::Approx(4));
}
