#pragma once

// Scenario description shared by every other module. Units throughout:
// rates in packets/second, delays in seconds, windows and backlogs in
// (fractional) packets.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dca/error.hpp"

namespace dca {

enum class Protocol { Fast, Reno, Vegas };

enum class Remedy : unsigned {
  ReversePartial = 0,
  ReverseExact,
  ReverseEcnTrack,
  PcPause,
  PcErrorEstimation,
  AlphaAdapt,
};
inline constexpr unsigned kRemedyCount = 6;

enum class Discipline { DropTail, Red };

enum class LinkDir { Fwd, Bwd };

std::string_view to_string(Protocol p);
std::string_view to_string(Remedy r);
std::string_view to_string(Discipline d);
std::string_view to_string(LinkDir d);

class RemedySet {
 public:
  RemedySet() = default;
  RemedySet(std::initializer_list<Remedy> rs) {
    for (Remedy r : rs) insert(r);
  }

  void insert(Remedy r) { bits_ |= bit(r); }
  void erase(Remedy r) { bits_ &= ~bit(r); }
  bool contains(Remedy r) const { return (bits_ & bit(r)) != 0; }
  bool empty() const { return bits_ == 0; }
  unsigned bits() const { return bits_; }

  friend bool operator==(RemedySet, RemedySet) = default;

 private:
  static unsigned bit(Remedy r) { return 1u << static_cast<unsigned>(r); }
  unsigned bits_ = 0;
};

struct UpdateInterval {
  bool per_rtt = true;
  double seconds = 0.0;  // used when !per_rtt

  static UpdateInterval every_rtt() { return {}; }
  static UpdateInterval fixed(double s) { return {false, s}; }

  friend bool operator==(const UpdateInterval&, const UpdateInterval&) = default;
};

// Knobs for the per-flow remedies. Zero/absent means "use the default".
struct RemedyParams {
  double pause_cap = std::numeric_limits<double>::infinity();
  double probe_burst = 0.0;  // 0 -> alpha/4
  std::optional<int> oracle_older_flows;
  std::optional<double> oracle_capacity;
  double adapt_gain = 0.1;
  double adapt_every_rtts = 100.0;
  double alpha_min = 2.0;
  double alpha_max = 1e4;

  friend bool operator==(const RemedyParams&, const RemedyParams&) = default;
};

struct FlowConfig {
  int id = 0;
  Protocol protocol = Protocol::Fast;
  double alpha = 1.0;  // packets
  double gamma = 0.5;
  double w0 = 2.0;  // packets
  UpdateInterval update_interval;
  double start_time = 0.0;
  double fwd_prop_delay = 0.0;
  double bwd_prop_delay = 0.0;
  RemedySet remedies;
  // Utility weight; the controller runs with alpha * mu.
  double mu = 1.0;
  double vegas_alpha = 1.0;
  double vegas_beta = 3.0;
  RemedyParams remedy;

  double prop_delay() const { return fwd_prop_delay + bwd_prop_delay; }

  friend bool operator==(const FlowConfig&, const FlowConfig&) = default;
};

struct RenoConfig {
  double kappa = 1.0;
  double beta_exponent = 2.0;
  double additive_increase = 1.0;  // packets per RTT
  double multiplicative_decrease = 0.5;

  friend bool operator==(const RenoConfig&, const RenoConfig&) = default;
};

struct RedConfig {
  double min_th = 0.0;  // seconds of queuing delay
  double max_th = 0.0;
  double avg_weight = 0.002;  // EWMA weight per engine step

  friend bool operator==(const RedConfig&, const RedConfig&) = default;
};

struct LinkConfig {
  double capacity = 0.0;  // packets/s
  double buffer = 0.0;    // packets
  Discipline discipline = Discipline::DropTail;
  std::optional<RedConfig> red;

  friend bool operator==(const LinkConfig&, const LinkConfig&) = default;
};

// Unresponsive constant-rate traffic active on [on_time, off_time).
struct CrossTraffic {
  LinkDir target = LinkDir::Fwd;
  double rate = 0.0;
  double on_time = 0.0;
  double off_time = std::numeric_limits<double>::infinity();

  bool active_at(double t) const { return t >= on_time && t < off_time; }

  friend bool operator==(const CrossTraffic&, const CrossTraffic&) = default;
};

struct ScenarioSpec {
  std::vector<FlowConfig> flows;
  RenoConfig reno;
  LinkConfig fwd_link;
  LinkConfig bwd_link;
  std::vector<CrossTraffic> cross_traffic;
  double duration = 0.0;
  double step = 0.001;
  double sample_every = 0.1;
  double measure_start = 0.0;
  double measure_end = 0.0;
  std::uint64_t seed = 1;
  // Reverse-link packets generated per delivered forward packet.
  double ack_ratio = 0.05;
  // Per-step Bernoulli marking instead of deterministic thinning.
  bool red_random = false;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

struct FlowSample {
  double w = 0.0;
  double x = 0.0;
  double d_hat = 0.0;
  double r_hat = 0.0;
  double q_hat = 0.0;

  friend bool operator==(const FlowSample&, const FlowSample&) = default;
};

struct TraceRecord {
  double t = 0.0;
  std::vector<FlowSample> flows;
  double fwd_backlog = 0.0;
  double bwd_backlog = 0.0;
  double fwd_loss_rate = 0.0;
  double ecn_mark_prob = 0.0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct ValidationIssue {
  std::string field;
  std::string rule;

  friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

// Every violated invariant, in declaration order. Empty means valid.
std::vector<ValidationIssue> check_scenario(const ScenarioSpec& spec);

// Returns the spec unchanged, or throws ValidationError listing each issue.
ScenarioSpec validate_scenario(ScenarioSpec spec);

// Checks a sampled record against the TraceRecord invariants.
std::vector<std::string> check_trace_record(const TraceRecord& rec, const ScenarioSpec& spec);

}  // namespace dca
