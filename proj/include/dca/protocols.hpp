#pragma once

// Side-effect-free congestion controller laws.

#include "dca/model.hpp"

namespace dca {

enum class ControlMode {
  Inactive,
  Normal,
  Paused,   // persistent-congestion pause in progress
  Probing,  // error-estimation probe in progress
};

struct FlowState {
  double w = 0.0;      // packets
  double d_hat = 0.0;  // seconds, running min RTT (possibly remedy-corrected)
  double r_hat = 0.0;  // seconds, smoothed RTT
  double q_hat = 0.0;  // seconds, r_hat - d_hat
  double x = 0.0;      // packets/s
  ControlMode mode = ControlMode::Inactive;
  double alpha_effective = 0.0;
};

struct VegasBand {
  double alpha = 1.0;
  double beta = 3.0;
};

inline constexpr double kMinWindow = 1.0;

// One packet-level FAST window update:
//   w' = gamma * (d_hat * w / r_hat + alpha) + (1 - gamma) * w
// floored at one packet. Uses state.alpha_effective and cfg.gamma.
double fast_update(const FlowState& state, const FlowConfig& cfg);

// Flow-level FAST window drift, gamma * alpha * (1 - q x / alpha).
double fast_flow_derivative(double q, double x, double alpha, double gamma);

// Equilibrium rate alpha / q*. Throws ZeroQueueDelay when q* is not above
// `resolution` (a queue that small cannot be measured).
double fast_equilibrium_rate(double alpha, double q_star, double resolution = 0.0);

// Window at which fast_update is stationary for a frozen queuing delay.
double fast_fixed_point_window(double alpha, double d_hat, double q_hat);

// Total bottleneck backlog held by n homogeneous FAST flows.
double equilibrium_backlog(int n, double alpha);

// Per-RTT AIMD: halve (by multiplicative_decrease) on a loss event, else add
// additive_increase. Never below one packet.
double reno_update(const FlowState& state, const RenoConfig& cfg, bool loss_event);

// Packets the flow believes it keeps queued: w * (1 - d_hat / r_hat).
double vegas_backlog_estimate(const FlowState& state);

// Vegas band controller applied once per RTT.
double vegas_update(const FlowState& state, VegasBand band);

}  // namespace dca
