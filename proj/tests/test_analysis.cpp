#include <doctest.h>

#include <cmath>
#include <vector>

#include "dca/analysis.hpp"

using namespace dca;

TEST_CASE("reverse_decay_curve examples") {
  const std::vector<double> grid = {0.0, 0.5};
  const auto at_k0 = reverse_decay_curve(200, 0.01, 0, grid);
  REQUIRE(at_k0.size() == 2);
  CHECK(at_k0[0].x_star == doctest::Approx(20000));
  CHECK(at_k0[1].x_star == doctest::Approx(10000));
  CHECK(reverse_backward_delay(0.01, 1, 0.5) == doctest::Approx(0.02));
  // r = q_f + q_b + k q_f = 0.04, q_b / r = 0.5
  CHECK(0.02 / (0.01 + 0.02 + 0.01) == doctest::Approx(0.5));
}

TEST_CASE("reverse decay round-trips through the backward delay") {
  for (double k : {0.0, 0.5, 1.0, 10.0})
    for (double rho : {0.0, 0.1, 0.3, 0.5, 0.9})
      for (double qf : {0.001, 0.01, 0.05}) {
        const double qb = reverse_backward_delay(qf, k, rho);
        const double back = qb / (qf + qb + k * qf);
        CHECK(std::abs(back - rho) < 1e-12);
        // equilibrium alpha / (q_f + q_b) is the same rate
        CHECK(reverse_decay_rate(200, qf, k, rho) == doctest::Approx(200 / (qf + qb)).epsilon(1e-12));
      }
}

TEST_CASE("reverse decay is decreasing in rho and in k") {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(0.05 * i);
  for (double k : {0.0, 1.0, 10.0}) {
    const auto c = reverse_decay_curve(200, 0.01, k, grid);
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i].x_star < c[i - 1].x_star);
  }
  for (double rho : {0.05, 0.3, 0.7})
    CHECK(reverse_decay_rate(200, 0.01, 10, rho) < reverse_decay_rate(200, 0.01, 1, rho));
}

TEST_CASE("partial_fix_rate") {
  CHECK(partial_fix_rate(200, 0.01, 0.01, 0.10) == doctest::Approx(18000));
  // d = 0, q_b / r = 0.5 -> half the ideal rate
  CHECK(partial_fix_rate(200, 0.01, 0.01, 0.02) == doctest::Approx(10000));
}

TEST_CASE("reno_fast_share_bound") {
  CHECK(reno_fast_share_bound(60, 20) == doctest::Approx(1.0));
  CHECK(reno_fast_share_bound(100, 20) == doctest::Approx(2.0));
  CHECK_THROWS_AS(reno_fast_share_bound(10, 20), Error);
  CHECK_THROWS_AS(reno_fast_share_bound(10, 0), Error);
  for (double b = 25; b < 400; b += 5) CHECK(reno_fast_share_bound(b + 5, 20) > reno_fast_share_bound(b, 20));
  const ShareBand band = reno_vegas_share_band(30, 1, 3);
  CHECK(band.at_low == doctest::Approx(14.5));
  CHECK(band.at_high == doctest::Approx(4.5));
}

TEST_CASE("fast_utility") {
  CHECK(fast_utility(1, 200) == doctest::Approx(0));
  CHECK(fast_utility(std::exp(1.0), 200) == doctest::Approx(200));
  CHECK_THROWS_AS(fast_utility(0, 200), Error);
  for (double x : {0.5, 3.0, 1000.0})
    for (double mu : {0.5, 3.0}) CHECK(scaled_fast_utility(x, 200, mu) == doctest::Approx(mu * fast_utility(x, 200)));
}

TEST_CASE("persistent_overestimate_backlog") {
  const auto exact = persistent_overestimate_backlog(200, 10000, 0.12, 0.1, 0.1);
  CHECK(exact.excess == doctest::Approx(0));
  const auto biased = persistent_overestimate_backlog(200, 10000, 0.14, 0.1, 0.12);
  CHECK(biased.excess == doctest::Approx(200));
  CHECK(biased.queue == doctest::Approx(400));
}

TEST_CASE("jain_index") {
  const std::vector<double> equal = {3, 3, 3, 3};
  CHECK(jain_index(equal) == doctest::Approx(1));
  const std::vector<double> two = {2, 1};
  CHECK(jain_index(two) == doctest::Approx(0.9));
  const std::vector<double> one_hog = {1, 0, 0, 0};
  CHECK(jain_index(one_hog) == doctest::Approx(0.25));
}

TEST_CASE("jain_index is scale invariant and bounded by 1/n and 1") {
  const std::vector<std::vector<double>> cases = {{1, 2, 3}, {5, 5, 0.1}, {7}, {1, 1, 1, 40}};
  for (const auto& r : cases) {
    const double j = jain_index(r);
    CHECK(j <= 1.0 + 1e-12);
    CHECK(j >= 1.0 / r.size() - 1e-12);
    std::vector<double> scaled;
    for (double v : r) scaled.push_back(v * 13.0);
    CHECK(jain_index(scaled) == doctest::Approx(j));
  }
}

TEST_CASE("fairness_report over a hand-built trace") {
  ScenarioSpec spec;
  FlowConfig a, b, c;
  a.id = 0; a.start_time = 0; a.protocol = Protocol::Fast;
  b.id = 1; b.start_time = 5; b.protocol = Protocol::Reno;
  c.id = 2; c.start_time = 5; c.protocol = Protocol::Fast;
  spec.flows = {a, b, c};
  spec.measure_start = 1;
  spec.measure_end = 2;
  std::vector<TraceRecord> trace;
  for (double t : {0.0, 1.0, 1.5, 2.0, 3.0}) {
    TraceRecord r;
    r.t = t;
    const double bump = (t >= 1 && t <= 2) ? 0 : 1000;
    r.flows = {{0, 100 + bump, 0, 0, 0}, {0, 300, 0, 0, 0}, {0, 200, 0, 0, 0}};
    r.fwd_backlog = 10 * t;
    trace.push_back(r);
  }
  const FairnessReport rep = fairness_report(trace, spec);
  REQUIRE(rep.per_flow_mean_rate.size() == 3);
  CHECK(rep.per_flow_mean_rate[0] == doctest::Approx(100));
  CHECK(rep.last_to_first_ratio == doctest::Approx(2.0));  // flow 2 is the last arrival
  REQUIRE(rep.reno_to_fast_ratio.has_value());
  CHECK(*rep.reno_to_fast_ratio == doctest::Approx(300.0 / 150.0));
  CHECK(rep.fwd_mean_backlog == doctest::Approx(15));
  CHECK(rep.jain_index == doctest::Approx(jain_index(std::vector<double>{100, 300, 200})));
  CHECK_THROWS_AS(fairness_report(trace, spec, 10, 20), Error);
}
