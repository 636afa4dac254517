#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dca/commands.hpp"
#include "dca/engine.hpp"
#include "dca/scenario_io.hpp"
#include "scenarios.hpp"

using namespace dca;
using namespace dca::testing;
namespace fs = std::filesystem;

namespace {

const char* const kMinimal = R"(# one flow
[flow]
alpha = 200
fwd_prop = 0.05
bwd_prop = 0.05
[fwd_link]
capacity = 10000
buffer = 1000
[sim]
duration = 2
)";

ErrorCode parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("parse succeeded");
  return ErrorCode::Io;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dca_test_" + name);
  fs::remove_all(p);
  return p;
}

ScenarioSpec eight_flows() { return consecutive_arrivals(0.1, PcMode::None); }

}  // namespace

TEST_CASE("a minimal scenario fills in defaults") {
  const ScenarioSpec s = parse_scenario(kMinimal);
  REQUIRE(s.flows.size() == 1);
  CHECK(s.flows[0].gamma == 0.5);
  CHECK(s.flows[0].protocol == Protocol::Fast);
  CHECK(s.flows[0].update_interval.per_rtt);
  CHECK(s.bwd_link == s.fwd_link);
  CHECK(s.measure_start == 1.0);
  CHECK(s.measure_end == 2.0);
  CHECK(check_scenario(s).empty());
}

TEST_CASE("scenario parse errors") {
  std::string bad = kMinimal;
  bad.replace(bad.find("alpha = 200"), 11, "gamma = 1.5");
  CHECK(parse_error(bad) == ErrorCode::Parse);

  bad = kMinimal;
  bad.replace(bad.find("alpha = 200"), 11, "alpha = 200\nalpha = 100");
  CHECK(parse_error(bad) == ErrorCode::Parse);

  bad = kMinimal;
  bad.replace(bad.find("alpha = 200"), 11, "colour = red");
  CHECK(parse_error(bad) == ErrorCode::UnknownKey);

  bad = kMinimal;
  bad.erase(bad.find("[sim]"));
  CHECK(parse_error(bad) == ErrorCode::MissingSection);

  CHECK(parse_error("[flow]\nalpha 200\n") == ErrorCode::Parse);
  CHECK(parse_error("[nonsense]\n") == ErrorCode::Parse);
}

TEST_CASE("parse errors carry the line number") {
  std::string bad = kMinimal;
  bad.replace(bad.find("buffer = 1000"), 13, "buffer = lots");
  try {
    parse_scenario(bad);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 8") != std::string::npos);
  }
}

TEST_CASE("count expands a flow group") {
  std::string text = kMinimal;
  text.replace(text.find("alpha = 200"), 11, "alpha = 200\ncount = 3\nstart_spacing = 2");
  const ScenarioSpec s = parse_scenario(text);
  REQUIRE(s.flows.size() == 3);
  CHECK(s.flows[2].id == 2);
  CHECK(s.flows[2].start_time == 4.0);
}

TEST_CASE("the canonical form round-trips") {
  const std::vector<ScenarioSpec> specs = {
      parse_scenario(kMinimal), eight_flows(), reverse_path(0.3, 1, ReverseFix::Partial).spec,
      reno_vs_fast(26), adapting_fast(), consecutive_arrivals(0.05, PcMode::Probe)};
  for (const ScenarioSpec& s : specs) {
    const std::string text = format_scenario(s);
    const ScenarioSpec back = parse_scenario(text);
    CHECK(back == s);
    CHECK(format_scenario(back) == text);
    CHECK(spec_hash(back) == spec_hash(s));
  }
}

TEST_CASE("any change to the spec changes its hash") {
  const ScenarioSpec base = eight_flows();
  const std::string h = spec_hash(base);
  CHECK(h.size() == 16);
  ScenarioSpec s = base;
  s.flows[3].alpha += 1e-9;
  CHECK(spec_hash(s) != h);
  s = base;
  s.seed = base.seed + 99;
  CHECK(spec_hash(s) != h);
  s = base;
  s.fwd_link.buffer += 1;
  CHECK(spec_hash(s) != h);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("CSV forms are fixed points of parse then emit") {
  const ScenarioSpec s = reverse_path(0.3, 1, ReverseFix::None).spec;
  const RunResult r = run(s);
  const std::string trace = trace_to_csv(r.trace, s.flows.size());
  CHECK(trace_to_csv(trace_from_csv(trace), s.flows.size()) == trace);

  const std::string rep = report_to_csv(fairness_report(r.trace, s));
  CHECK(report_to_csv(report_from_csv(rep)) == rep);

  const std::vector<SweepRow> rows = {{1, "ok", fairness_report(r.trace, s)}, {2, "bad value", std::nullopt}};
  const std::string sweep = sweep_to_csv("buffer", rows);
  CHECK(sweep_from_csv(sweep).size() == 2);
  CHECK_FALSE(sweep_from_csv(sweep)[1].report);
  CHECK(sweep_to_csv("buffer", sweep_from_csv(sweep)) == sweep);

  const Table t = analytic_table(AnalyticKind::Fig1, {});
  const std::string curves = table_to_csv(t);
  CHECK(table_to_csv(table_from_csv(curves)) == curves);
}

TEST_CASE("malformed CSV is rejected") {
  CHECK_THROWS_AS(trace_from_csv("t,x\n1,2\n"), Error);
  CHECK_THROWS_AS(report_from_csv("jain_index\n1\n"), Error);
  CHECK_THROWS_AS(table_from_csv("a,b\n1\n"), Error);
  CHECK_THROWS_AS(parse_number("1.0x"), Error);
}

TEST_CASE("simulate writes deterministic outputs") {
  const ScenarioSpec s = eight_flows();
  const fs::path a = scratch_dir("sim_a");
  const fs::path b = scratch_dir("sim_b");
  const RunManifest ma = cmd_simulate(s, "eight.scn", a, true);
  cmd_simulate(s, "eight.scn", b, true);
  CHECK(ma.files == std::vector<std::string>{"trace.csv", "report.csv", "plot.svg", "manifest.json"});
  for (const char* f : {"trace.csv", "report.csv", "plot.svg"}) CHECK(slurp(a / f) == slurp(b / f));

  const auto j = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(j["spec_hash"] == spec_hash(s));
  CHECK(j["files"].size() == 4);

  const FairnessReport rep = report_from_csv(slurp(a / "report.csv"));
  CHECK(rep.per_flow_mean_rate.size() == 8);
  // Equal propagation delays, but later arrivals see a standing queue.
  CHECK(rep.last_to_first_ratio > 2.0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("simultaneous starts are fair") {
  ScenarioSpec s = homogeneous(std::vector<double>(8, 0.1), 200, 10000, 40);
  const FairnessReport rep = fairness_report(run(s).trace, s);
  CHECK(rep.jain_index >= 0.99);
}

TEST_CASE("analytic tables") {
  AnalyticParams p;
  p.k = {0};
  p.rho = {0.0, 0.5};
  Table t = analytic_table(AnalyticKind::Fig1, p);
  CHECK(t.columns == std::vector<std::string>{"k", "rho", "x_star", "q_b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][2] == doctest::Approx(20000));
  CHECK(t.rows[1][2] == doctest::Approx(10000));

  p = {};
  p.n = {1, 8};
  t = analytic_table(AnalyticKind::Bound14, p);
  CHECK(t.rows[0][1] == doctest::Approx(0.0223606798));
  CHECK(t.rows[1][1] == doctest::Approx(0.459565012));

  p = {};
  p.buffers = {30};
  p.vegas_alpha = 1;
  p.vegas_beta = 3;
  t = analytic_table(AnalyticKind::Eq15, p);
  CHECK(t.columns.size() == 4);
  CHECK(t.rows[0][2] == doctest::Approx(14.5));
  CHECK(t.rows[0][3] == doctest::Approx(4.5));

  p = {};
  p.rho = {1.0};
  CHECK_THROWS_AS(analytic_table(AnalyticKind::Fig1, p), Error);
  CHECK_THROWS_AS(parse_analytic_kind("fig2"), Error);
}

TEST_CASE("analytic output is byte-stable") {
  const fs::path a = scratch_dir("ana_a");
  const fs::path b = scratch_dir("ana_b");
  const RunManifest ma = cmd_analytic(AnalyticKind::Fig1, {}, a, true);
  const RunManifest mb = cmd_analytic(AnalyticKind::Fig1, {}, b, true);
  CHECK(ma.spec_hash == mb.spec_hash);
  CHECK(slurp(a / "curves.csv") == slurp(b / "curves.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sweeping the buffer orders rows and reports each run") {
  ScenarioSpec s = homogeneous({0.05, 0.05}, 50, 2000, 10);
  s.flows[1].protocol = Protocol::Reno;
  s.measure_start = 5;
  const auto rows = run_sweep(s, "buffer", {120, 40, 80});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].value == 40);
  CHECK(rows[2].value == 120);
  for (const auto& r : rows) {
    CHECK(r.status == "ok");
    REQUIRE(r.report);
    CHECK(r.report->reno_to_fast_ratio.has_value());
  }
  CHECK(*rows[0].report->reno_to_fast_ratio < *rows[2].report->reno_to_fast_ratio);
  CHECK_THROWS_AS(run_sweep(s, "colour", {1}), Error);
}

TEST_CASE("a failing sweep point becomes an error row") {
  const ScenarioSpec s = homogeneous({0.05}, 50, 2000, 5);
  const auto rows = run_sweep(s, "gamma", {0.5, 2.0});
  CHECK(rows[0].status == "ok");
  CHECK(rows[1].status != "ok");
  CHECK_FALSE(rows[1].report);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch_dir("cli");
  fs::create_directories(dir);
  const auto write = [&](const char* name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const auto status = [](const std::string& args) {
    const std::string cmd = std::string(DCASIM_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  const std::string good = write("good.scn", kMinimal);
  std::string text = kMinimal;
  text.replace(text.find("alpha = 200"), 11, "gamma = 1.5");
  const std::string bad_gamma = write("gamma.scn", text);
  text = kMinimal;
  text.replace(text.find("alpha = 200"), 11, "colour = red");
  const std::string unknown = write("unknown.scn", text);
  const std::string out = (dir / "out").string();

  CHECK(status("simulate " + good + " -o " + out) == 0);
  CHECK(fs::exists(dir / "out" / "manifest.json"));
  CHECK(status("simulate " + bad_gamma + " -o " + out) == 2);
  CHECK(status("simulate " + unknown + " -o " + out) == 2);
  CHECK(status("analytic bound14 -o " + out) == 0);
  CHECK(status("analytic fig1 --rho 1.5 -o " + out) == 2);
  CHECK(status("sweep " + good + " --axis colour --values 1,2 -o " + out) == 2);
  CHECK(status("sweep " + good + " --axis buffer --values 100,200 -o " + out) == 0);
  CHECK(status("simulate " + good + " -o /proc/forbidden") == 3);
  fs::remove_all(dir);
}
