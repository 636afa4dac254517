#include "dca/model.hpp"

#include <algorithm>
#include <cmath>

namespace dca {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Validation: return "VALIDATION";
    case ErrorCode::NonpositiveRtt: return "NONPOSITIVE_RTT";
    case ErrorCode::ZeroQueueDelay: return "ZERO_QUEUE_DELAY";
    case ErrorCode::NegativeCorrectedRtt: return "NEGATIVE_CORRECTED_RTT";
    case ErrorCode::UnreliableSignal: return "UNRELIABLE_SIGNAL";
    case ErrorCode::ProbeLoss: return "PROBE_LOSS";
    case ErrorCode::QueueDrained: return "QUEUE_DRAINED";
    case ErrorCode::Degenerate: return "DEGENERATE";
    case ErrorCode::NonpositiveRate: return "NONPOSITIVE_RATE";
    case ErrorCode::EmptyWindow: return "EMPTY_WINDOW";
    case ErrorCode::Parse: return "PARSE";
    case ErrorCode::UnknownKey: return "UNKNOWN_KEY";
    case ErrorCode::MissingSection: return "MISSING_SECTION";
    case ErrorCode::Io: return "IO";
  }
  return "UNKNOWN";
}

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::Fast: return "fast";
    case Protocol::Reno: return "reno";
    case Protocol::Vegas: return "vegas";
  }
  return "?";
}

std::string_view to_string(Remedy r) {
  switch (r) {
    case Remedy::ReversePartial: return "reverse_partial";
    case Remedy::ReverseExact: return "reverse_exact";
    case Remedy::ReverseEcnTrack: return "reverse_ecn_track";
    case Remedy::PcPause: return "pc_pause";
    case Remedy::PcErrorEstimation: return "pc_error_estimation";
    case Remedy::AlphaAdapt: return "alpha_adapt";
  }
  return "?";
}

std::string_view to_string(Discipline d) {
  return d == Discipline::Red ? "red" : "drop-tail";
}

std::string_view to_string(LinkDir d) { return d == LinkDir::Fwd ? "fwd" : "bwd"; }

namespace {

std::string join_issues(const std::vector<ValidationIssue>& issues) {
  std::string out;
  for (const auto& i : issues) {
    if (!out.empty()) out += "; ";
    out += i.field + " " + i.rule;
  }
  return out;
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

void check_link(const LinkConfig& link, const std::string& name,
                std::vector<ValidationIssue>& out) {
  if (!(std::isfinite(link.capacity) && link.capacity > 0.0))
    out.push_back({name + ".capacity", "> 0"});
  if (!(std::isfinite(link.buffer) && link.buffer > 0.0))
    out.push_back({name + ".buffer", "> 0"});
  const bool is_red = link.discipline == Discipline::Red;
  if (is_red != link.red.has_value())
    out.push_back({name + ".discipline", "RED iff red parameters present"});
  if (link.red) {
    const auto& red = *link.red;
    if (!(finite_nonneg(red.min_th) && std::isfinite(red.max_th) && red.min_th < red.max_th))
      out.push_back({name + ".min_th", "0 <= min_th < max_th"});
    if (!(red.avg_weight > 0.0 && red.avg_weight <= 1.0))
      out.push_back({name + ".avg_weight", "in (0,1]"});
  }
}

}  // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : Error(ErrorCode::Validation, join_issues(issues)), issues_(std::move(issues)) {}

std::vector<ValidationIssue> check_scenario(const ScenarioSpec& spec) {
  std::vector<ValidationIssue> out;

  if (spec.flows.empty()) out.push_back({"flows", "non-empty"});

  double min_prop = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.flows.size(); ++i) {
    const FlowConfig& f = spec.flows[i];
    const std::string p = "flow[" + std::to_string(i) + "].";
    if (!(std::isfinite(f.alpha) && f.alpha > 0.0)) out.push_back({p + "alpha", "> 0"});
    if (!(f.gamma > 0.0 && f.gamma <= 1.0)) out.push_back({p + "gamma", "in (0,1]"});
    if (!(std::isfinite(f.w0) && f.w0 >= 1.0)) out.push_back({p + "w0", ">= 1"});
    if (!finite_nonneg(f.fwd_prop_delay)) out.push_back({p + "fwd_prop", ">= 0"});
    if (!finite_nonneg(f.bwd_prop_delay)) out.push_back({p + "bwd_prop", ">= 0"});
    if (!(f.prop_delay() > 0.0)) out.push_back({p + "prop_delay", "fwd_prop + bwd_prop > 0"});
    if (!finite_nonneg(f.start_time)) out.push_back({p + "start", "finite, >= 0"});
    if (!f.update_interval.per_rtt &&
        !(std::isfinite(f.update_interval.seconds) && f.update_interval.seconds > 0.0))
      out.push_back({p + "update_interval", "> 0 seconds"});
    if (f.remedies.contains(Remedy::ReversePartial) && f.remedies.contains(Remedy::ReverseExact))
      out.push_back({p + "remedies", "reverse_partial and reverse_exact are mutually exclusive"});
    if (!(std::isfinite(f.mu) && f.mu > 0.0)) out.push_back({p + "mu", "> 0"});
    if (!(finite_nonneg(f.vegas_alpha) && std::isfinite(f.vegas_beta) &&
          f.vegas_alpha <= f.vegas_beta))
      out.push_back({p + "vegas_band", "0 <= vegas_alpha <= vegas_beta"});
    const auto& r = f.remedy;
    if (!(r.pause_cap > 0.0)) out.push_back({p + "pause_cap", "> 0"});
    if (!finite_nonneg(r.probe_burst)) out.push_back({p + "probe_burst", ">= 0"});
    if (r.oracle_older_flows && *r.oracle_older_flows < 0)
      out.push_back({p + "ee_oracle_n", ">= 0"});
    if (r.oracle_capacity && !(*r.oracle_capacity > 0.0))
      out.push_back({p + "ee_oracle_capacity", "> 0"});
    if (!(r.adapt_gain > 0.0 && r.adapt_gain <= 1.0)) out.push_back({p + "adapt_gain", "in (0,1]"});
    if (!(r.adapt_every_rtts >= 1.0)) out.push_back({p + "adapt_every_rtts", ">= 1"});
    if (!(r.alpha_min > 0.0 && r.alpha_min <= r.alpha_max))
      out.push_back({p + "alpha_min", "0 < alpha_min <= alpha_max"});
    if (f.remedies.contains(Remedy::ReverseEcnTrack) && spec.bwd_link.discipline != Discipline::Red)
      out.push_back({p + "remedies", "reverse_ecn_track needs a RED reverse link"});
    if (f.prop_delay() > 0.0) min_prop = std::min(min_prop, f.prop_delay());
  }

  const RenoConfig& reno = spec.reno;
  if (!(reno.kappa > 0.0)) out.push_back({"reno.kappa", "> 0"});
  if (!(reno.beta_exponent > 0.0)) out.push_back({"reno.beta", "> 0"});
  if (!(reno.additive_increase > 0.0)) out.push_back({"reno.additive_increase", "> 0"});
  if (!(reno.multiplicative_decrease > 0.0 && reno.multiplicative_decrease < 1.0))
    out.push_back({"reno.multiplicative_decrease", "in (0,1)"});

  check_link(spec.fwd_link, "fwd_link", out);
  check_link(spec.bwd_link, "bwd_link", out);

  for (std::size_t i = 0; i < spec.cross_traffic.size(); ++i) {
    const auto& c = spec.cross_traffic[i];
    const std::string p = "cross[" + std::to_string(i) + "].";
    if (!finite_nonneg(c.rate)) out.push_back({p + "rate", ">= 0"});
    if (!(finite_nonneg(c.on_time) && c.on_time <= c.off_time))
      out.push_back({p + "on", "0 <= on <= off"});
  }

  if (!finite_nonneg(spec.duration)) out.push_back({"sim.duration", "finite, >= 0"});
  if (!(std::isfinite(spec.step) && spec.step > 0.0)) {
    out.push_back({"sim.step", "> 0"});
  } else if (std::isfinite(min_prop) && spec.step > min_prop / 10.0 * (1.0 + 1e-9)) {
    out.push_back({"sim.step", "<= min propagation delay / 10"});
  }
  if (!(std::isfinite(spec.sample_every) && spec.sample_every > 0.0 &&
        spec.sample_every >= spec.step * (1.0 - 1e-9)))
    out.push_back({"sim.sample_every", ">= step"});
  if (!(finite_nonneg(spec.measure_start) && spec.measure_start <= spec.measure_end &&
        spec.measure_end <= spec.duration))
    out.push_back({"sim.measure_window", "0 <= start <= end <= duration"});
  if (!finite_nonneg(spec.ack_ratio)) out.push_back({"sim.ack_ratio", ">= 0"});

  return out;
}

ScenarioSpec validate_scenario(ScenarioSpec spec) {
  auto issues = check_scenario(spec);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return spec;
}

std::vector<std::string> check_trace_record(const TraceRecord& rec, const ScenarioSpec& spec) {
  std::vector<std::string> bad;
  constexpr double kTol = 1e-9;
  if (!(rec.t >= 0.0)) bad.emplace_back("t < 0");
  const double k = rec.t / spec.step;
  if (std::abs(k - std::round(k)) > 1e-6) bad.emplace_back("t not a multiple of step");
  if (rec.fwd_backlog < 0.0 || rec.fwd_backlog > spec.fwd_link.buffer + kTol)
    bad.emplace_back("fwd_backlog out of [0,B]");
  if (rec.bwd_backlog < 0.0 || rec.bwd_backlog > spec.bwd_link.buffer + kTol)
    bad.emplace_back("bwd_backlog out of [0,B]");
  if (rec.fwd_loss_rate < 0.0 || rec.fwd_loss_rate > 1.0 + kTol) bad.emplace_back("loss rate");
  if (rec.ecn_mark_prob < 0.0 || rec.ecn_mark_prob > 1.0 + kTol) bad.emplace_back("mark prob");
  for (std::size_t i = 0; i < rec.flows.size(); ++i) {
    const auto& f = rec.flows[i];
    const std::string p = "flow[" + std::to_string(i) + "] ";
    if (f.x < 0.0) bad.push_back(p + "x < 0");
    if (f.w < 0.0) bad.push_back(p + "w < 0");
    if (f.q_hat < -kTol) bad.push_back(p + "q_hat < 0");
    if (std::abs(f.q_hat - (f.r_hat - f.d_hat)) > kTol * std::max(1.0, f.r_hat))
      bad.push_back(p + "q_hat != r_hat - d_hat");
  }
  return bad;
}

}  // namespace dca
