#pragma once

// Closed-form equilibria and bounds, plus trace post-processing.

#include <optional>
#include <span>
#include <vector>

#include "dca/model.hpp"

namespace dca {

struct DecayPoint {
  double rho = 0.0;
  double x_star = 0.0;  // packets/s
  double q_b = 0.0;     // backward queuing delay that produces rho, seconds
};

// Backward queuing delay for a given rho = q_b / r and d = k q_f:
//   q_b = (k + 1) rho q_f / (1 - rho).
double reverse_backward_delay(double q_f, double k, double rho);

// Equilibrium rate under reverse-path queuing, (alpha/q_f)(1 - rho)/(1 + k rho).
double reverse_decay_rate(double alpha, double q_f, double k, double rho);

std::vector<DecayPoint> reverse_decay_curve(double alpha, double q_f, double k,
                                            std::span<const double> rho_grid);

// Equilibrium rate when r' = r - q_b is fed to the window update:
// (alpha/q_f)(1 - q_b/r).
double partial_fix_rate(double alpha, double q_f, double q_b, double r);

// Reno-to-FAST throughput ratio when FAST keeps k packets in a buffer of B:
// (B - k) / (2k).
double reno_fast_share_bound(double buffer, double k_pkts);

struct ShareBand {
  double at_low = 0.0;   // k = vegas alpha
  double at_high = 0.0;  // k = vegas beta
};
ShareBand reno_vegas_share_band(double buffer, double vegas_alpha, double vegas_beta);

// alpha log(x), natural log.
double fast_utility(double x, double alpha);

// mu * U(x; alpha) written as U(x; mu alpha).
double scaled_fast_utility(double x, double alpha, double mu);

struct OverestimateBacklog {
  double queue = 0.0;   // l = C (r* - d)
  double excess = 0.0;  // l - alpha = C (d_hat - d)
};

// Backlog held by a single FAST flow whose propagation estimate is d_hat >= d.
OverestimateBacklog persistent_overestimate_backlog(double alpha, double capacity,
                                                    double r_star, double d, double d_hat);

// Jain index (sum x)^2 / (n sum x^2).
double jain_index(std::span<const double> rates);

struct FairnessReport {
  std::vector<double> per_flow_mean_rate;
  double jain_index = 0.0;
  double last_to_first_ratio = 0.0;
  std::optional<double> reno_to_fast_ratio;
  double fwd_mean_backlog = 0.0;
  double bwd_mean_backlog = 0.0;

  friend bool operator==(const FairnessReport&, const FairnessReport&) = default;
};

// Means over samples with measure_start <= t <= measure_end. Throws
// EmptyWindow when no sample falls inside.
FairnessReport fairness_report(std::span<const TraceRecord> trace, const ScenarioSpec& spec);

// Same, over an explicit window.
FairnessReport fairness_report(std::span<const TraceRecord> trace, const ScenarioSpec& spec,
                               double from, double to);

}  // namespace dca
