#include "dca/engine.hpp"

#include <algorithm>
#include <cmath>

namespace dca {

namespace {

std::size_t to_steps(double seconds, double dt) {
  return static_cast<std::size_t>(std::llround(seconds / dt));
}

double cross_rate(const std::vector<CrossTraffic>& cross, LinkDir dir, double t) {
  double sum = 0.0;
  for (const auto& c : cross)
    if (c.target == dir && c.active_at(t)) sum += c.rate;
  return sum;
}

constexpr std::size_t kRateHistory = 16;
constexpr int kMaxProbeAttempts = 8;
constexpr double kProbeAgreement = 0.02;

}  // namespace

std::string_view to_string(RemedyEventKind k) {
  switch (k) {
    case RemedyEventKind::PauseStart: return "pause_start";
    case RemedyEventKind::PauseEnd: return "pause_end";
    case RemedyEventKind::ProbeStart: return "probe_start";
    case RemedyEventKind::ProbeLoss: return "probe_loss";
    case RemedyEventKind::QueueDrained: return "queue_drained";
    case RemedyEventKind::CapacityEstimate: return "capacity_estimate";
    case RemedyEventKind::FlowCountEstimate: return "flow_count_estimate";
    case RemedyEventKind::PropDelayCorrected: return "prop_delay_corrected";
    case RemedyEventKind::AlphaAdapted: return "alpha_adapted";
    case RemedyEventKind::AlphaGuardHeld: return "alpha_guard_held";
  }
  return "?";
}

LinkStepResult advance_queue(LinkState& link, const LinkConfig& cfg, double arrival_rate,
                             double dt) {
  const double inflow = std::max(0.0, arrival_rate) * dt;
  const double available = link.backlog + inflow;
  LinkStepResult r;
  r.departures = std::min(available, cfg.capacity * dt);
  double backlog = available - r.departures;
  r.overflow = std::max(0.0, backlog - cfg.buffer);
  backlog -= r.overflow;
  link.backlog = std::clamp(backlog, 0.0, cfg.buffer);
  link.cum_arrivals += inflow;
  link.cum_delivered += r.departures;
  link.cum_losses += r.overflow;
  return r;
}

double red_mark_probability(double avg_backlog, const LinkConfig& link) {
  if (!link.red) return 0.0;
  const RedConfig& red = *link.red;
  const double excess = std::max(0.0, avg_backlog / link.capacity - red.min_th);
  return std::clamp(excess / (red.max_th - red.min_th), 0.0, 1.0);
}

RttSample measure_rtt(double fwd_prop, double bwd_prop, double q_fwd, double q_bwd,
                      double previous_d_hat) {
  RttSample s;
  s.r_sample = fwd_prop + q_fwd + bwd_prop + q_bwd;
  s.d_hat = std::min(previous_d_hat, s.r_sample);
  return s;
}

Engine::Engine(ScenarioSpec spec) : spec_(validate_scenario(std::move(spec))), rng_(spec_.seed) {
  for (const auto& f : spec_.flows)
    if (f.remedies.contains(Remedy::ReverseEcnTrack) &&
        spec_.fwd_link.discipline == Discipline::Red)
      throw Error(ErrorCode::UnreliableSignal,
                  "flow " + std::to_string(f.id) + ": ECN tracking with a RED forward link");

  const double dt = spec_.step;
  total_steps_ = static_cast<std::uint64_t>(std::floor(spec_.duration / dt + 1e-9));
  sample_stride_ = std::max<std::uint64_t>(1, std::llround(spec_.sample_every / dt));

  std::size_t depth = 1;
  flows_.resize(spec_.flows.size());
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    Flow& f = flows_[i];
    f.cfg = &spec_.flows[i];
    f.lag_rtt = std::max<std::size_t>(1, to_steps(f.cfg->prop_delay(), dt));
    f.lag_to_fwd = std::min(f.lag_rtt, to_steps(f.cfg->fwd_prop_delay / 2.0, dt));
    f.lag_sample_fwd = f.lag_rtt - f.lag_to_fwd;
    f.lag_sample_bwd = std::min(f.lag_sample_fwd, to_steps(f.cfg->bwd_prop_delay / 2.0, dt));
    f.lag_fwd_to_bwd = f.lag_sample_fwd - f.lag_sample_bwd;
    f.start_step = static_cast<std::uint64_t>(std::llround(f.cfg->start_time / dt));
    f.send = DelayLine<double>(f.lag_to_fwd);
    f.acks = DelayLine<double>(f.lag_fwd_to_bwd);
    f.congestion = DelayLine<CongestionMass>(f.lag_sample_fwd);
    f.sent_at = DelayLine<double>(f.lag_rtt);
    depth = std::max(depth, f.lag_sample_fwd);
  }
  q_fwd_ = History(depth);
  q_bwd_ = History(depth);
  p_fwd_ = History(depth);
  p_bwd_ = History(depth);
}

void Engine::emit(double t, int flow, RemedyEventKind kind, double value) {
  events_.push_back({t, flow, kind, value});
}

double Engine::effective_d_hat(const Flow& f) const {
  const auto& rem = f.cfg->remedies;
  if (!rem.contains(Remedy::ReverseExact)) return f.st.d_hat;
  const double q_b = rem.contains(Remedy::ReverseEcnTrack) ? f.reverse.q_b_hat : f.q_b_component;
  return std::min(f.st.r_hat, reverse_exact_fix(f.st.d_hat, q_b));
}

void Engine::activate(Flow& f) {
  const FlowConfig& cfg = *f.cfg;
  const double t = time();
  const double handshake = cfg.prop_delay() + q_fwd_.ago(0) + q_bwd_.ago(0);
  f.active = true;
  f.st.w = cfg.w0;
  f.st.d_hat = handshake;
  f.st.r_hat = handshake;
  f.d_min = handshake;
  f.st.alpha_effective = cfg.alpha * cfg.mu;
  f.st.mode = ControlMode::Normal;
  f.q_b_component = q_bwd_.ago(0);
  f.next_update = t + (cfg.update_interval.per_rtt ? handshake : cfg.update_interval.seconds);
  f.pc.probe_burst =
      cfg.remedy.probe_burst > 0.0 ? cfg.remedy.probe_burst : f.st.alpha_effective / 4.0;
  const auto& rem = cfg.remedies;
  f.reverse.mode = rem.contains(Remedy::ReverseEcnTrack) ? ReverseCompMode::EcnTrack
                   : rem.contains(Remedy::ReverseExact) ? ReverseCompMode::ExactPropAdd
                                                        : ReverseCompMode::PartialSubtract;
  f.reverse.ecn_baseline = 1.0 - (1.0 - p_fwd_.ago(0)) * (1.0 - p_bwd_.ago(0));
  f.adapt.alpha_target = f.st.alpha_effective;
  refresh_rate(f);
}

void Engine::refresh_rate(Flow& f) {
  if (!f.active) {
    f.send_rate = 0.0;
    return;
  }
  f.st.x = f.st.mode == ControlMode::Paused ? 0.0 : f.st.w / f.st.r_hat;
  f.st.q_hat = std::max(0.0, f.st.r_hat - effective_d_hat(f));
  f.send_rate = f.st.x;
  if (f.st.mode == ControlMode::Probing && f.probe_step == step_index_ + 1)
    f.send_rate += f.probe_mass / spec_.step;
}

void Engine::on_sample(Flow& f, double t) {
  const double q_f = q_fwd_.ago(f.lag_sample_fwd);
  const double q_b = q_bwd_.ago(f.lag_sample_bwd);
  const RttSample s = measure_rtt(f.cfg->fwd_prop_delay, f.cfg->bwd_prop_delay, q_f, q_b,
                                  f.st.d_hat);
  f.raw_sample = s.r_sample;
  f.have_sample = true;
  f.d_min = std::min(f.d_min, s.r_sample);
  f.st.d_hat = s.d_hat;
  f.st.r_hat = kRttSmoothing * s.r_sample + (1.0 - kRttSmoothing) * f.st.r_hat;
  f.q_b_component = kRttSmoothing * q_b + (1.0 - kRttSmoothing) * f.q_b_component;
  f.mark_seen = 1.0 - (1.0 - p_fwd_.ago(f.lag_sample_fwd)) * (1.0 - p_bwd_.ago(f.lag_sample_bwd));
  if (f.cfg->remedies.contains(Remedy::ReverseEcnTrack))
    reverse_ecn_track(f.mark_seen, f.reverse, spec_.bwd_link, spec_.fwd_link);
  else
    f.reverse.q_b_hat = f.q_b_component;

  if (f.st.mode != ControlMode::Probing) return;

  // The burst left the sender at probe_step; its echo is the sample that
  // arrives lag_rtt steps later, the baseline the one just before it.
  const std::uint64_t k = step_index_;  // index of the step being completed
  if (k + 1 == f.probe_step + f.lag_rtt) {
    f.probe_baseline = s.r_sample;
    return;
  }
  if (k != f.probe_step + f.lag_rtt) return;

  const int id = f.cfg->id;
  f.st.mode = ControlMode::Normal;
  ++f.pc.attempts;
  const bool give_up = f.pc.attempts >= kMaxProbeAttempts;
  if (f.probe_lost) {
    emit(t, id, RemedyEventKind::ProbeLoss, f.probe_mass);
    f.update_rates.clear();
    f.pc.probe_burst /= 2.0;
    f.pc.phase = give_up ? PcPhase::Corrected : PcPhase::Settling;
    f.pc_done = give_up;
    return;
  }
  const double delta_q = s.r_sample - f.probe_baseline;
  const bool drained = f.probe_baseline - f.st.d_hat <= 0.0;
  if (drained || !(delta_q > 0.0)) {
    emit(t, id, RemedyEventKind::QueueDrained, delta_q);
    f.update_rates.clear();
    f.pc.phase = give_up ? PcPhase::Corrected : PcPhase::Settling;
    f.pc_done = give_up;
    return;
  }
  const double c_hat = probe_capacity_estimate(f.probe_mass, delta_q);
  const int n_hat = estimate_older_flows(c_hat, f.probe_rate_before);
  emit(t, id, RemedyEventKind::CapacityEstimate, c_hat);
  emit(t, id, RemedyEventKind::FlowCountEstimate, n_hat);
  // Act only on two consecutive probes that agree; a probe taken while the
  // bottleneck is still moving gives a stray estimate.
  const bool agrees = f.pc.attempts > 1 && n_hat == f.pc.n_hat &&
                      std::abs(c_hat - f.pc.c_hat) <= kProbeAgreement * f.pc.c_hat;
  f.pc.c_hat = c_hat;
  f.pc.n_hat = n_hat;
  if (!agrees) {
    if (give_up) {
      f.pc.phase = PcPhase::Corrected;
      f.pc_done = true;
      return;
    }
    start_probe(f, t);
    return;
  }
  f.pc.epsilon_hat = f.st.alpha_effective * f.pc.n_hat / f.pc.c_hat;
  f.pc.d_prime = error_estimation_correction(f.st.d_hat, f.st.alpha_effective, f.pc.n_hat,
                                             f.pc.c_hat, spec_.step);
  emit(t, id, RemedyEventKind::PropDelayCorrected, f.pc.d_prime);
  f.st.d_hat = f.pc.d_prime;
  f.pc.phase = PcPhase::Corrected;
  f.pc_done = true;
}

void Engine::fast_step(Flow& f, std::size_t, double) {
  const FlowConfig& cfg = *f.cfg;
  FlowState view = f.st;
  view.d_hat = effective_d_hat(f);
  if (cfg.remedies.contains(Remedy::ReversePartial) ||
      (cfg.remedies.contains(Remedy::ReverseEcnTrack) &&
       !cfg.remedies.contains(Remedy::ReverseExact))) {
    const double r_prime = reverse_partial_fix(f.st.r_hat, std::min(f.reverse.q_b_hat, f.st.r_hat));
    view.r_hat = std::max(r_prime, view.d_hat);
  }
  f.st.w = fast_update(view, cfg);
}

void Engine::start_probe(Flow& f, double t) {
  f.pc.phase = PcPhase::Probing;
  f.st.mode = ControlMode::Probing;
  f.probe_step = step_index_ + 1;
  f.probe_mass = f.pc.probe_burst;
  f.probe_rate_before = f.st.x;
  f.probe_baseline = 0.0;
  f.probe_lost = false;
  emit(t, f.cfg->id, RemedyEventKind::ProbeStart, f.probe_mass);
}

void Engine::persistent_remedies(Flow& f, std::size_t, double t) {
  const FlowConfig& cfg = *f.cfg;
  const bool pause = cfg.remedies.contains(Remedy::PcPause);
  const bool ee = cfg.remedies.contains(Remedy::PcErrorEstimation);
  if (f.pc_done || (!pause && !ee) || f.pc.phase != PcPhase::Settling) return;
  if (!rates_settled(f.update_rates)) return;

  const int id = cfg.id;
  if (ee) {
    const auto& r = cfg.remedy;
    if (r.oracle_older_flows && r.oracle_capacity) {
      f.pc.n_hat = *r.oracle_older_flows;
      f.pc.c_hat = *r.oracle_capacity;
      f.pc.epsilon_hat = f.st.alpha_effective * f.pc.n_hat / f.pc.c_hat;
      f.pc.d_prime = error_estimation_correction(f.st.d_hat, f.st.alpha_effective, f.pc.n_hat,
                                                 f.pc.c_hat, spec_.step);
      emit(t, id, RemedyEventKind::PropDelayCorrected, f.pc.d_prime);
      f.st.d_hat = f.pc.d_prime;
      f.pc.phase = PcPhase::Corrected;
      f.pc_done = true;
      return;
    }
    start_probe(f, t);
    return;
  }

  f.pc.phase = PcPhase::Paused;
  f.st.mode = ControlMode::Paused;
  f.resume_w = f.st.w;
  f.pause_until = t + pause_duration(f.st.r_hat, cfg.remedy.pause_cap);
  emit(t, id, RemedyEventKind::PauseStart, f.st.d_hat);
}

void Engine::adapt_alpha(Flow& f, std::size_t, double t) {
  const RemedyParams& r = f.cfg->remedy;
  const double q = f.st.q_hat;
  const double weight = 1.0 / r.adapt_every_rtts;
  // Long-run loss fraction as a ratio of smoothed totals; per-interval
  // fractions are too bursty to average directly.
  // Packets are indivisible: any overflow in the interval costs whole packets.
  const double lost = std::ceil(f.interval_lost - 1e-9);
  if (!f.adapt.initialized) {
    f.lost_long = lost;
    f.sent_long = f.interval_sent;
    f.adapt.q_hat_long = q;
    f.adapt.initialized = true;
  } else {
    f.lost_long += weight * (lost - f.lost_long);
    f.sent_long += weight * (f.interval_sent - f.sent_long);
    f.adapt.q_hat_long += weight * (q - f.adapt.q_hat_long);
  }
  f.interval_sent = 0.0;
  f.interval_lost = 0.0;
  f.adapt.lambda_hat = f.sent_long > 0.0 ? std::clamp(f.lost_long / f.sent_long, 0.0, 1.0) : 0.0;
  if (++f.updates_since_adapt < static_cast<int>(r.adapt_every_rtts)) return;
  f.updates_since_adapt = 0;
  const double before = f.st.alpha_effective;
  f.st.alpha_effective = alpha_adapt(f.adapt, before, f.adapt.q_hat_long, f.adapt.lambda_hat,
                                     {r.adapt_gain, r.alpha_min, r.alpha_max});
  emit(t, f.cfg->id,
       f.adapt.lambda_hat > 0.0 ? RemedyEventKind::AlphaAdapted : RemedyEventKind::AlphaGuardHeld,
       f.st.alpha_effective);
}

void Engine::on_update(Flow& f, std::size_t index, double t) {
  const FlowConfig& cfg = *f.cfg;
  if (cfg.update_interval.per_rtt) {
    f.next_update = t + f.st.r_hat;
  } else {
    while (f.next_update <= t + 1e-12) f.next_update += cfg.update_interval.seconds;
  }
  if (f.st.mode == ControlMode::Paused || f.st.mode == ControlMode::Probing) return;

  switch (cfg.protocol) {
    case Protocol::Fast:
      fast_step(f, index, t);
      break;
    case Protocol::Reno:
      f.st.w = reno_update(f.st, spec_.reno, false);
      break;
    case Protocol::Vegas: {
      FlowState view = f.st;
      view.d_hat = effective_d_hat(f);
      f.st.w = vegas_update(view, {cfg.vegas_alpha, cfg.vegas_beta});
      break;
    }
  }

  f.update_rates.push_back(f.st.w / f.st.r_hat);
  if (f.update_rates.size() > kRateHistory)
    f.update_rates.erase(f.update_rates.begin());

  persistent_remedies(f, index, t);
  if (cfg.protocol == Protocol::Fast && cfg.remedies.contains(Remedy::AlphaAdapt))
    adapt_alpha(f, index, t);
}

void Engine::step() {
  if (done()) return;
  const double dt = spec_.step;
  const double t0 = time();

  for (Flow& f : flows_)
    if (!f.active && f.start_step == step_index_) activate(f);

  // Forward bottleneck.
  double fwd_in = cross_rate(spec_.cross_traffic, LinkDir::Fwd, t0);
  for (Flow& f : flows_) {
    f.arrival = f.send.push(f.send_rate);
    fwd_in += f.arrival;
  }
  if (spec_.fwd_link.red) {
    const double w = spec_.fwd_link.red->avg_weight;
    fwd_.avg_backlog = (1.0 - w) * fwd_.avg_backlog + w * fwd_.backlog;
    fwd_.mark_prob = red_mark_probability(fwd_.avg_backlog, spec_.fwd_link);
  }
  const LinkStepResult fr = advance_queue(fwd_, spec_.fwd_link, fwd_in, dt);
  const double loss_frac = fwd_in > 0.0 ? fr.overflow / (fwd_in * dt) : 0.0;
  const double serve_frac = fwd_in > 0.0 ? fr.departures / (fwd_in * dt) : 0.0;

  // Reverse bottleneck, fed by ACKs of delivered data plus cross traffic.
  double bwd_in = cross_rate(spec_.cross_traffic, LinkDir::Bwd, t0);
  std::vector<CongestionMass> mass(flows_.size());
  std::vector<double> delivered(flows_.size());
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    Flow& f = flows_[i];
    double mark = fwd_.mark_prob;
    if (spec_.red_random && spec_.fwd_link.red) {
      std::bernoulli_distribution coin(fwd_.mark_prob);
      mark = coin(rng_) ? 1.0 : 0.0;
    }
    mass[i].lost = loss_frac * f.arrival * dt;
    mass[i].marked = mark * f.arrival * dt;
    fwd_.cum_marks += mass[i].marked;
    delivered[i] = serve_frac * f.arrival;
    bwd_in += spec_.ack_ratio * f.acks.push(delivered[i]);
  }
  if (spec_.bwd_link.red) {
    const double w = spec_.bwd_link.red->avg_weight;
    bwd_.avg_backlog = (1.0 - w) * bwd_.avg_backlog + w * bwd_.backlog;
    bwd_.mark_prob = red_mark_probability(bwd_.avg_backlog, spec_.bwd_link);
  }
  advance_queue(bwd_, spec_.bwd_link, bwd_in, dt);

  q_fwd_.record(fwd_.backlog / spec_.fwd_link.capacity);
  q_bwd_.record(bwd_.backlog / spec_.bwd_link.capacity);
  p_fwd_.record(fwd_.mark_prob);
  p_bwd_.record(bwd_.mark_prob);
  sample_arrivals_ += fwd_in * dt;
  sample_losses_ += fr.overflow;

  // Sender side at the end of the step.
  const double t = t0 + dt;
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    Flow& f = flows_[i];
    const CongestionMass fb = f.congestion.push(mass[i]);
    const double echoed = f.sent_at.push(f.send_rate);
    if (!f.active) continue;

    f.interval_sent += f.send_rate * dt;
    f.interval_lost += fb.lost;
    if (f.st.mode == ControlMode::Probing && fb.lost > 0.0 &&
        step_index_ == f.probe_step + f.lag_rtt)
      f.probe_lost = true;

    if (echoed > 0.0) on_sample(f, t);

    if (f.cfg->protocol == Protocol::Reno && fb.lost + fb.marked > 0.0 &&
        t - f.last_decrease >= f.st.r_hat) {
      f.st.w = reno_update(f.st, spec_.reno, true);
      f.last_decrease = t;
    }

    if (f.st.mode == ControlMode::Paused && t >= f.pause_until - 1e-12) {
      f.st.mode = ControlMode::Normal;
      f.st.w = f.resume_w;
      f.pc.phase = PcPhase::Corrected;
      f.pc_done = true;
      f.next_update = t + f.st.r_hat;
      emit(t, f.cfg->id, RemedyEventKind::PauseEnd, f.st.d_hat);
    }

    if (t >= f.next_update - 1e-12) on_update(f, i, t);
    refresh_rate(f);
  }

  ++step_index_;
  if (step_index_ % sample_stride_ == 0) record_sample(t);
}

void Engine::record_sample(double t) {
  TraceRecord rec;
  rec.t = t;
  rec.flows.reserve(flows_.size());
  for (const Flow& f : flows_) {
    FlowSample s;
    if (f.active) {
      s.w = f.st.w;
      s.x = f.st.x;
      s.d_hat = effective_d_hat(f);
      s.r_hat = f.st.r_hat;
      s.q_hat = s.r_hat - s.d_hat;
    }
    rec.flows.push_back(s);
  }
  rec.fwd_backlog = fwd_.backlog;
  rec.bwd_backlog = bwd_.backlog;
  rec.fwd_loss_rate = sample_arrivals_ > 0.0 ? sample_losses_ / sample_arrivals_ : 0.0;
  rec.ecn_mark_prob = 1.0 - (1.0 - fwd_.mark_prob) * (1.0 - bwd_.mark_prob);
  sample_arrivals_ = 0.0;
  sample_losses_ = 0.0;
  trace_.push_back(std::move(rec));
}

RunResult Engine::finish() && {
  RunResult out;
  out.trace = std::move(trace_);
  out.events = std::move(events_);
  out.fwd = fwd_;
  out.bwd = bwd_;
  out.flows.reserve(flows_.size());
  for (const Flow& f : flows_) {
    FlowFinal ff;
    ff.state = f.st;
    ff.state.d_hat = f.active ? effective_d_hat(f) : 0.0;
    ff.reverse = f.reverse;
    ff.persistent = f.pc;
    ff.adapt = f.adapt;
    ff.active = f.active;
    out.flows.push_back(ff);
  }
  return out;
}

RunResult run(const ScenarioSpec& spec) {
  Engine engine(spec);
  while (!engine.done()) engine.step();
  return std::move(engine).finish();
}

}  // namespace dca
