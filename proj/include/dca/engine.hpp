#pragma once

// Fixed-step fluid simulation of a dumbbell with one forward and one reverse
// bottleneck.
//
// Timing model for flow i with one-way propagation delays df (data) and db
// (ACKs): data sent at s reaches the forward queue at s + df/2, the ACK it
// triggers reaches the reverse queue at s + df + db/2 and the sender at
// s + df + db. Queuing delays add to the RTT sample but not to these lags, so
// the RTT sample received at t is
//   df + db + q_fwd(t - db - df/2) + q_bwd(t - db/2).
// All lags are rounded to whole steps.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dca/delay_line.hpp"
#include "dca/model.hpp"
#include "dca/protocols.hpp"
#include "dca/remedies.hpp"

namespace dca {

struct LinkState {
  double backlog = 0.0;
  double avg_backlog = 0.0;  // EWMA used by RED
  double cum_losses = 0.0;
  double cum_arrivals = 0.0;
  double cum_delivered = 0.0;
  double cum_marks = 0.0;
  double mark_prob = 0.0;
};

struct LinkStepResult {
  double departures = 0.0;  // mass served this step
  double overflow = 0.0;    // mass dropped this step
};

// Advances one queue by dt with aggregate arrival rate `arrival_rate`.
// Serves min(backlog + arrivals, C dt), then drops whatever exceeds B.
LinkStepResult advance_queue(LinkState& link, const LinkConfig& cfg, double arrival_rate,
                             double dt);

// RED marking law on average backlog, clip((avg/C - min_th)^+ / (max_th - min_th), 0, 1).
double red_mark_probability(double avg_backlog, const LinkConfig& link);

struct RttSample {
  double r_sample = 0.0;
  double d_hat = 0.0;
};

// RTT sample composed from both queue delays plus propagation, and the
// min-filtered propagation estimate that results.
RttSample measure_rtt(double fwd_prop, double bwd_prop, double q_fwd, double q_bwd,
                      double previous_d_hat);

// Smoothing weight applied to each raw RTT sample.
inline constexpr double kRttSmoothing = 0.5;

enum class RemedyEventKind {
  PauseStart,
  PauseEnd,
  ProbeStart,
  ProbeLoss,
  QueueDrained,
  CapacityEstimate,
  FlowCountEstimate,
  PropDelayCorrected,
  AlphaAdapted,
  AlphaGuardHeld,
};

std::string_view to_string(RemedyEventKind k);

struct RemedyEvent {
  double t = 0.0;
  int flow = 0;
  RemedyEventKind kind = RemedyEventKind::PauseStart;
  double value = 0.0;
};

struct FlowFinal {
  FlowState state;
  ReverseCompState reverse;
  PersistentCongestionState persistent;
  AlphaAdaptState adapt;
  bool active = false;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  std::vector<FlowFinal> flows;
  LinkState fwd;
  LinkState bwd;
  std::vector<RemedyEvent> events;
};

class Engine {
 public:
  // Throws ValidationError for an invalid spec and UnreliableSignal when ECN
  // tracking is combined with a marking forward link.
  explicit Engine(ScenarioSpec spec);

  // Advances by one step; no-op once the duration is reached.
  void step();
  bool done() const { return step_index_ >= total_steps_; }
  double time() const { return static_cast<double>(step_index_) * spec_.step; }
  std::uint64_t step_index() const { return step_index_; }

  const ScenarioSpec& spec() const { return spec_; }
  const LinkState& fwd() const { return fwd_; }
  const LinkState& bwd() const { return bwd_; }
  const FlowState& flow_state(std::size_t i) const { return flows_[i].st; }
  const AlphaAdaptState& adapt_state(std::size_t i) const { return flows_[i].adapt; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  const std::vector<RemedyEvent>& events() const { return events_; }

  RunResult finish() &&;

 private:
  struct CongestionMass {
    double lost = 0.0;
    double marked = 0.0;
  };

  struct Flow {
    const FlowConfig* cfg = nullptr;
    FlowState st;
    bool active = false;
    std::uint64_t start_step = 0;

    std::size_t lag_to_fwd = 0;     // sender -> forward queue
    std::size_t lag_fwd_to_bwd = 0; // forward queue -> reverse queue
    std::size_t lag_sample_fwd = 0; // forward queue -> sender
    std::size_t lag_sample_bwd = 0; // reverse queue -> sender
    std::size_t lag_rtt = 0;

    DelayLine<double> send;
    DelayLine<double> acks;
    DelayLine<CongestionMass> congestion;
    DelayLine<double> sent_at;  // rate the sample's packet was sent with

    double send_rate = 0.0;  // rate pushed this step (x plus any probe burst)
    double arrival = 0.0;    // rate arriving at the forward queue this step
    double next_update = 0.0;
    double last_decrease = -1e300;
    double raw_sample = 0.0;
    bool have_sample = false;
    double q_b_component = 0.0;  // smoothed reverse-queue part of the RTT
    double mark_seen = 0.0;      // mark probability carried by the latest ACK
    double d_min = 0.0;          // plain min-filter on raw samples

    std::vector<double> update_rates;

    ReverseCompState reverse;
    PersistentCongestionState pc;
    double pause_until = 0.0;
    double resume_w = 0.0;
    bool pc_done = false;
    // error-estimation probe bookkeeping
    std::uint64_t probe_step = 0;
    double probe_mass = 0.0;
    double probe_rate_before = 0.0;
    double probe_baseline = 0.0;
    bool probe_lost = false;

    AlphaAdaptState adapt;
    double interval_sent = 0.0;
    double interval_lost = 0.0;
    double sent_long = 0.0;
    double lost_long = 0.0;
    int updates_since_adapt = 0;
  };

  void activate(Flow& f);
  void on_sample(Flow& f, double t);
  void on_update(Flow& f, std::size_t index, double t);
  void fast_step(Flow& f, std::size_t index, double t);
  void persistent_remedies(Flow& f, std::size_t index, double t);
  void start_probe(Flow& f, double t);
  void adapt_alpha(Flow& f, std::size_t index, double t);
  double effective_d_hat(const Flow& f) const;
  void refresh_rate(Flow& f);
  void record_sample(double t);
  void emit(double t, int flow, RemedyEventKind kind, double value);

  ScenarioSpec spec_;
  std::uint64_t total_steps_ = 0;
  std::uint64_t step_index_ = 0;
  std::uint64_t sample_stride_ = 1;

  std::vector<Flow> flows_;
  LinkState fwd_;
  LinkState bwd_;
  History q_fwd_;
  History q_bwd_;
  History p_fwd_;
  History p_bwd_;
  std::mt19937_64 rng_;

  double sample_arrivals_ = 0.0;
  double sample_losses_ = 0.0;

  std::vector<TraceRecord> trace_;
  std::vector<RemedyEvent> events_;
};

// Runs a spec from t = 0 to its duration.
RunResult run(const ScenarioSpec& spec);

}  // namespace dca
