#include "dca/remedies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dca {

double reverse_partial_fix(double r_hat, double q_b_hat) {
  const double r = r_hat - q_b_hat;
  if (r < 0.0)
    throw Error(ErrorCode::NegativeCorrectedRtt,
                "r_hat=" + std::to_string(r_hat) + " q_b_hat=" + std::to_string(q_b_hat));
  return r;
}

double reverse_exact_fix(double d_hat, double q_b_hat) { return d_hat + std::max(0.0, q_b_hat); }

double reverse_ecn_track(double mark_prob, ReverseCompState& state, const LinkConfig& bwd_link,
                         const LinkConfig& fwd_link) {
  if (fwd_link.discipline == Discipline::Red)
    throw Error(ErrorCode::UnreliableSignal, "forward link also runs RED");
  if (!bwd_link.red) throw Error(ErrorCode::UnreliableSignal, "reverse link does not run RED");
  const RedConfig& red = *bwd_link.red;
  const double p = std::clamp(mark_prob, 0.0, 1.0);
  state.q_b_hat = red.min_th + p * (red.max_th - red.min_th);
  return state.q_b_hat;
}

double pause_feasibility_bound(int n, double alpha, double capacity) {
  const double nn = static_cast<double>(n);
  return nn * alpha * std::sqrt(1.0 + 4.0 * nn) / (2.0 * capacity);
}

bool rates_settled(std::span<const double> recent_rates, int window, double tolerance) {
  const auto need = static_cast<std::size_t>(window) + 1;
  if (recent_rates.size() < need) return false;
  const auto tail = recent_rates.last(need);
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  if (!(*hi > 0.0)) return false;
  return (*hi - *lo) / *hi < tolerance;
}

double pause_duration(double r_hat, double cap) { return std::min(r_hat, cap); }

double probe_capacity_estimate(double burst, double delta_q) {
  if (!(delta_q > 0.0)) throw Error(ErrorCode::QueueDrained, "probe produced no queue growth");
  return burst / delta_q;
}

int estimate_older_flows(double c_hat, double own_rate) {
  if (!(own_rate > 0.0)) return 0;
  const double s = c_hat / own_rate;
  return std::max(0, static_cast<int>(std::lround(s * (s - 1.0))));
}

double error_estimation_correction(double d_hat, double alpha, int n_hat, double c_hat,
                                   double floor) {
  if (n_hat <= 0 || !(c_hat > 0.0)) return d_hat;
  const double corrected = d_hat - alpha * static_cast<double>(n_hat) / c_hat;
  return std::min(d_hat, std::max(corrected, floor));
}

double alpha_adapt(AlphaAdaptState& state, double alpha, double q_long, double lambda_long,
                   const AlphaAdaptParams& params) {
  state.lambda_hat = lambda_long;
  state.q_hat_long = q_long;
  if (!(lambda_long > 0.0)) {
    state.alpha_target = alpha;
    return alpha;
  }
  state.alpha_target = q_long / lambda_long;
  const double next = alpha + params.gain * (state.alpha_target - alpha);
  return std::clamp(next, params.alpha_min, params.alpha_max);
}

}  // namespace dca
