#pragma once

// Fixes for the three delay-based pathologies: reverse-path queuing,
// persistent congestion and unfairness against loss-based flows. Each fix is
// a small pure function; the engine owns the per-flow state and decides when
// to call them.

#include <deque>
#include <span>

#include "dca/model.hpp"

namespace dca {

// ---------------------------------------------------------------------------
// Reverse-path compensation

enum class ReverseCompMode { PartialSubtract, ExactPropAdd, EcnTrack };

struct ReverseCompState {
  double q_b_hat = 0.0;  // estimated backward queuing delay, seconds
  ReverseCompMode mode = ReverseCompMode::PartialSubtract;
  double ecn_baseline = 0.0;  // mark probability seen when the flow started
};

// r' = r_hat - q_b_hat. The equilibrium this produces still carries the
// (1 - q_b / r) throughput bias.
double reverse_partial_fix(double r_hat, double q_b_hat);

// d' = d_hat + q_b_hat: backward queuing treated as propagation delay.
double reverse_exact_fix(double d_hat, double q_b_hat);

// Inverts the RED marking law on the reverse link:
//   q_b_hat = min_th + p (max_th - min_th), clamped to [min_th, max_th].
// Throws UnreliableSignal when the forward link also marks.
double reverse_ecn_track(double mark_prob, ReverseCompState& state, const LinkConfig& bwd_link,
                         const LinkConfig& fwd_link);

// ---------------------------------------------------------------------------
// Persistent congestion

enum class PcPhase { Settling, Probing, Corrected, Paused };

struct PersistentCongestionState {
  PcPhase phase = PcPhase::Settling;
  int n_hat = 0;
  double c_hat = 0.0;
  double epsilon_hat = 0.0;  // alpha * n_hat / c_hat
  double probe_burst = 0.0;
  double d_prime = 0.0;
  int attempts = 0;
};

// Smallest round-trip propagation delay for which pausing one RTT drains a
// queue held by n flows of alpha packets each: n alpha sqrt(1 + 4n) / (2C).
double pause_feasibility_bound(int n, double alpha, double capacity);

// True when the last `window + 1` update-time rates differ by less than
// `tolerance` (relative spread).
bool rates_settled(std::span<const double> recent_rates, int window = 5, double tolerance = 0.01);

// Pause length: one RTT, capped.
double pause_duration(double r_hat, double cap);

// C_hat from a probe of `burst` packets that raised the queuing delay by
// delta_q.
double probe_capacity_estimate(double burst, double delta_q);

// Number of older flows behind a settled newcomer's rate. With n older flows
// holding alpha packets each at the true delay and the newcomer holding its
// own alpha at the biased delay, the shares satisfy
//   n = (C/x) (C/x - 1).
int estimate_older_flows(double c_hat, double own_rate);

// d' = d_hat - alpha n_hat / C_hat, kept above `floor` and never above d_hat.
double error_estimation_correction(double d_hat, double alpha, int n_hat, double c_hat,
                                   double floor);

// ---------------------------------------------------------------------------
// Alpha adaptation against loss-based flows

struct AlphaAdaptState {
  double lambda_hat = 0.0;  // long-term loss fraction
  double q_hat_long = 0.0;  // long-term queuing delay, seconds
  double alpha_target = 0.0;
  bool initialized = false;
};

struct AlphaAdaptParams {
  double gain = 0.1;
  double alpha_min = 2.0;
  double alpha_max = 1e4;
};

// alpha <- alpha + gain (q/lambda - alpha), clamped. Leaves alpha untouched
// when no loss has been observed.
double alpha_adapt(AlphaAdaptState& state, double alpha, double q_long, double lambda_long,
                   const AlphaAdaptParams& params);

}  // namespace dca
