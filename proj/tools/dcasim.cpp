// dcasim: simulate scenarios, print closed-form curves, sweep a parameter.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dca/commands.hpp"
#include "dca/scenario_io.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

int exit_code_for(dca::ErrorCode code) {
  switch (code) {
    case dca::ErrorCode::Parse:
    case dca::ErrorCode::UnknownKey:
    case dca::ErrorCode::MissingSection:
    case dca::ErrorCode::Validation:
    case dca::ErrorCode::Degenerate:
    case dca::ErrorCode::NonpositiveRate:
      return kExitInput;
    default:
      return kExitRuntime;
  }
}

void print_manifest(const dca::RunManifest& m) {
  for (const auto& f : m.files) std::cout << m.out_dir << '/' << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fluid simulator for delay-based congestion control"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool svg = false;

  auto* sim = app.add_subcommand("simulate", "run a scenario and write trace.csv and report.csv");
  sim->add_option("scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
  sim->add_option("-o,--out", out_dir, "output directory")->required();
  sim->add_option("--seed", seed, "override the scenario seed");
  sim->add_flag("--svg", svg, "also write plot.svg");

  std::string kind;
  dca::AnalyticParams params;
  std::optional<double> vegas_alpha;
  std::optional<double> vegas_beta;
  auto* ana = app.add_subcommand("analytic", "write closed-form curves to curves.csv");
  ana->add_option("kind", kind, "fig1 | bound14 | eq15")
      ->required()
      ->check(CLI::IsMember({"fig1", "bound14", "eq15"}));
  ana->add_option("-o,--out", out_dir, "output directory")->required();
  ana->add_option("--alpha", params.alpha, "packets kept in queue")->capture_default_str();
  ana->add_option("--qf", params.q_f, "forward queuing delay, fig1")->capture_default_str();
  ana->add_option("--k", params.k, "d / q_f ratios, fig1")->delimiter(',');
  ana->add_option("--rho", params.rho, "rho grid, fig1")->delimiter(',');
  ana->add_option("--n", params.n, "flow counts, bound14")->delimiter(',');
  ana->add_option("--capacity", params.capacity, "pkt/s, bound14")->capture_default_str();
  ana->add_option("--kpkts", params.k_pkts, "FAST backlog k, eq15")->capture_default_str();
  ana->add_option("--buffers", params.buffers, "buffer sizes, eq15")->delimiter(',');
  ana->add_option("--vegas-alpha", vegas_alpha, "lower Vegas threshold, eq15 band");
  ana->add_option("--vegas-beta", vegas_beta, "upper Vegas threshold, eq15 band");
  ana->add_flag("--svg", svg, "also write plot.svg");

  std::string axis;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "run a scenario once per axis value");
  sweep->add_option("scenario", scenario, "template scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--axis", axis, "key to vary")->required();
  sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
  sweep->add_option("-o,--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*sim) {
      dca::ScenarioSpec spec = dca::load_scenario(scenario);
      if (seed) spec.seed = *seed;
      spec = dca::validate_scenario(std::move(spec));
      print_manifest(dca::cmd_simulate(spec, scenario, out_dir, svg));
    } else if (*ana) {
      params.vegas_alpha = vegas_alpha;
      params.vegas_beta = vegas_beta;
      print_manifest(dca::cmd_analytic(dca::parse_analytic_kind(kind), params, out_dir, svg));
    } else if (*sweep) {
      const dca::ScenarioSpec spec = dca::load_scenario(scenario);
      print_manifest(dca::cmd_sweep(spec, scenario, axis, values, out_dir));
    }
  } catch (const dca::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
