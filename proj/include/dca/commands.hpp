#pragma once

// The three CLI subcommands as library calls, so tests can drive them without
// spawning processes.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dca/csv.hpp"
#include "dca/model.hpp"

namespace dca {

struct RunManifest {
  std::string scenario;  // path of the input, empty for analytic runs
  std::string out_dir;
  std::vector<std::string> files;  // relative to out_dir, in emission order
  std::string spec_hash;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

std::string manifest_to_json(const RunManifest& m);

// Runs the engine and writes trace.csv, report.csv, optional plot.svg and
// manifest.json into out_dir (created if missing).
RunManifest cmd_simulate(const ScenarioSpec& spec, const std::string& scenario_path,
                         const std::filesystem::path& out_dir, bool svg);

enum class AnalyticKind { Fig1, Bound14, Eq15 };
AnalyticKind parse_analytic_kind(std::string_view name);

struct AnalyticParams {
  double alpha = 200.0;
  double q_f = 0.01;                       // fig1
  std::vector<double> k = {0.0, 1.0, 10.0};  // fig1, d = k q_f
  std::vector<double> rho;                 // fig1; empty -> 0, 0.05, ..., 0.95
  std::vector<double> n;                   // bound14; empty -> 1..20
  double capacity = 10000.0;               // bound14
  double k_pkts = 10.0;                    // eq15
  std::vector<double> buffers;             // eq15; empty -> 2k..20k
  std::optional<double> vegas_alpha;       // eq15 band, both or neither
  std::optional<double> vegas_beta;
};

// fig1: columns k,rho,x_star,q_b. bound14: n,d_min. eq15: B,ratio plus
// ratio_at_vegas_alpha,ratio_at_vegas_beta when the band is requested.
Table analytic_table(AnalyticKind kind, const AnalyticParams& params);

RunManifest cmd_analytic(AnalyticKind kind, const AnalyticParams& params,
                         const std::filesystem::path& out_dir, bool svg);

// Sweepable keys: buffer, capacity, bwd_buffer, bwd_capacity, prop_delay
// (split evenly between directions), fwd_prop, bwd_prop, alpha, gamma, mu,
// start_spacing, n, seed, duration. Throws UnknownKey otherwise.
ScenarioSpec apply_axis(const ScenarioSpec& base, std::string_view axis, double value);

// One run per value, rows in ascending value order; a failing run yields a
// row with its error text instead of aborting.
std::vector<SweepRow> run_sweep(const ScenarioSpec& base, std::string_view axis,
                                std::vector<double> values);

RunManifest cmd_sweep(const ScenarioSpec& base, const std::string& scenario_path,
                      std::string_view axis, const std::vector<double>& values,
                      const std::filesystem::path& out_dir);

}  // namespace dca
