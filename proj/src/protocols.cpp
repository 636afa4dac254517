#include "dca/protocols.hpp"

#include <algorithm>
#include <string>

namespace dca {

namespace {

void require_rtts(const FlowState& s) {
  if (!(s.r_hat > 0.0) || !(s.d_hat > 0.0))
    throw Error(ErrorCode::NonpositiveRtt,
                "r_hat=" + std::to_string(s.r_hat) + " d_hat=" + std::to_string(s.d_hat));
}

}  // namespace

double fast_update(const FlowState& state, const FlowConfig& cfg) {
  require_rtts(state);
  const double g = cfg.gamma;
  const double w = state.w;
  const double next = g * (state.d_hat * w / state.r_hat + state.alpha_effective) + (1.0 - g) * w;
  return std::max(kMinWindow, next);
}

double fast_flow_derivative(double q, double x, double alpha, double gamma) {
  return gamma * alpha * (1.0 - q * x / alpha);
}

double fast_equilibrium_rate(double alpha, double q_star, double resolution) {
  if (!(q_star > resolution) || !(q_star > 0.0))
    throw Error(ErrorCode::ZeroQueueDelay, "q*=" + std::to_string(q_star));
  return alpha / q_star;
}

double fast_fixed_point_window(double alpha, double d_hat, double q_hat) {
  if (!(q_hat > 0.0)) throw Error(ErrorCode::ZeroQueueDelay, "q_hat=" + std::to_string(q_hat));
  return alpha * (d_hat + q_hat) / q_hat;
}

double equilibrium_backlog(int n, double alpha) { return static_cast<double>(n) * alpha; }

double reno_update(const FlowState& state, const RenoConfig& cfg, bool loss_event) {
  if (loss_event) return std::max(kMinWindow, state.w * cfg.multiplicative_decrease);
  return std::max(kMinWindow, state.w + cfg.additive_increase);
}

double vegas_backlog_estimate(const FlowState& state) {
  require_rtts(state);
  // (w/d - w/r) * d
  return state.w * (1.0 - state.d_hat / state.r_hat);
}

double vegas_update(const FlowState& state, VegasBand band) {
  const double diff = vegas_backlog_estimate(state);
  if (diff < band.alpha) return state.w + 1.0;
  if (diff > band.beta) return std::max(kMinWindow, state.w - 1.0);
  return state.w;
}

}  // namespace dca
