#include "dca/analysis.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace dca {

double reverse_backward_delay(double q_f, double k, double rho) {
  return (k + 1.0) * rho * q_f / (1.0 - rho);
}

double reverse_decay_rate(double alpha, double q_f, double k, double rho) {
  return alpha / q_f * (1.0 - rho) / (1.0 + k * rho);
}

std::vector<DecayPoint> reverse_decay_curve(double alpha, double q_f, double k,
                                            std::span<const double> rho_grid) {
  std::vector<DecayPoint> out;
  out.reserve(rho_grid.size());
  for (double rho : rho_grid)
    out.push_back({rho, reverse_decay_rate(alpha, q_f, k, rho), reverse_backward_delay(q_f, k, rho)});
  return out;
}

double partial_fix_rate(double alpha, double q_f, double q_b, double r) {
  return alpha / q_f * (1.0 - q_b / r);
}

double reno_fast_share_bound(double buffer, double k_pkts) {
  if (!(k_pkts > 0.0) || !(k_pkts < buffer))
    throw Error(ErrorCode::Degenerate,
                "need 0 < k < B, got k=" + std::to_string(k_pkts) + " B=" + std::to_string(buffer));
  return (buffer - k_pkts) / (2.0 * k_pkts);
}

ShareBand reno_vegas_share_band(double buffer, double vegas_alpha, double vegas_beta) {
  return {reno_fast_share_bound(buffer, vegas_alpha), reno_fast_share_bound(buffer, vegas_beta)};
}

double fast_utility(double x, double alpha) {
  if (!(x > 0.0)) throw Error(ErrorCode::NonpositiveRate, "x=" + std::to_string(x));
  return alpha * std::log(x);
}

double scaled_fast_utility(double x, double alpha, double mu) { return fast_utility(x, mu * alpha); }

OverestimateBacklog persistent_overestimate_backlog(double alpha, double capacity, double r_star,
                                                    double d, double d_hat) {
  OverestimateBacklog out;
  out.queue = capacity * (r_star - d);
  // With alpha = C (r* - d_hat) this equals queue - alpha.
  out.excess = capacity * (d_hat - d);
  (void)alpha;
  return out;
}

double jain_index(std::span<const double> rates) {
  if (rates.empty()) return 0.0;
  double sum = 0.0;
  double sq = 0.0;
  for (double x : rates) {
    sum += x;
    sq += x * x;
  }
  if (!(sq > 0.0)) return 0.0;
  return sum * sum / (static_cast<double>(rates.size()) * sq);
}

FairnessReport fairness_report(std::span<const TraceRecord> trace, const ScenarioSpec& spec) {
  return fairness_report(trace, spec, spec.measure_start, spec.measure_end);
}

FairnessReport fairness_report(std::span<const TraceRecord> trace, const ScenarioSpec& spec,
                               double from, double to) {
  const std::size_t n = spec.flows.size();
  constexpr double kEps = 1e-9;
  FairnessReport rep;
  rep.per_flow_mean_rate.assign(n, 0.0);
  std::size_t count = 0;
  for (const auto& rec : trace) {
    if (rec.t < from - kEps || rec.t > to + kEps) continue;
    ++count;
    for (std::size_t i = 0; i < n && i < rec.flows.size(); ++i)
      rep.per_flow_mean_rate[i] += rec.flows[i].x;
    rep.fwd_mean_backlog += rec.fwd_backlog;
    rep.bwd_mean_backlog += rec.bwd_backlog;
  }
  if (count == 0 || n == 0)
    throw Error(ErrorCode::EmptyWindow,
                "no samples in [" + std::to_string(from) + ", " + std::to_string(to) + "]");
  const double c = static_cast<double>(count);
  for (double& x : rep.per_flow_mean_rate) x /= c;
  rep.fwd_mean_backlog /= c;
  rep.bwd_mean_backlog /= c;
  rep.jain_index = jain_index(rep.per_flow_mean_rate);

  std::size_t first = 0;
  std::size_t last = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (spec.flows[i].start_time < spec.flows[first].start_time) first = i;
    if (spec.flows[i].start_time >= spec.flows[last].start_time) last = i;
  }
  const double x_first = rep.per_flow_mean_rate[first];
  rep.last_to_first_ratio = x_first > 0.0 ? rep.per_flow_mean_rate[last] / x_first : 0.0;

  double reno = 0.0;
  double fast = 0.0;
  int n_reno = 0;
  int n_fast = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.flows[i].protocol == Protocol::Reno) {
      reno += rep.per_flow_mean_rate[i];
      ++n_reno;
    } else if (spec.flows[i].protocol == Protocol::Fast) {
      fast += rep.per_flow_mean_rate[i];
      ++n_fast;
    }
  }
  if (n_reno > 0 && n_fast > 0 && fast > 0.0)
    rep.reno_to_fast_ratio = (reno / n_reno) / (fast / n_fast);
  return rep;
}

}  // namespace dca
