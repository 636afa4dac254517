#include "dca/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "dca/analysis.hpp"
#include "dca/engine.hpp"
#include "dca/remedies.hpp"
#include "dca/scenario_io.hpp"
#include "dca/svg.hpp"

namespace dca {
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << bytes;
  if (!out.flush()) throw Error(ErrorCode::Io, "short write to " + path.string());
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::Io, "cannot create " + dir.string());
}

void finish_manifest(RunManifest& m, const fs::path& dir) {
  m.files.push_back("manifest.json");
  write_file(dir / "manifest.json", manifest_to_json(m));
}

std::vector<double> linspace(double from, double step, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(from + step * i);
  return out;
}

}  // namespace

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["scenario"] = m.scenario;
  j["output_dir"] = m.out_dir;
  j["files"] = m.files;
  j["spec_hash"] = m.spec_hash;
  j["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json(nullptr);
  return j.dump(2) + '\n';
}

RunManifest cmd_simulate(const ScenarioSpec& spec, const std::string& scenario_path,
                         const fs::path& out_dir, bool svg) {
  const RunResult result = run(spec);
  prepare_dir(out_dir);
  RunManifest m{scenario_path, out_dir.string(), {}, spec_hash(spec), spec.seed};

  write_file(out_dir / "trace.csv", trace_to_csv(result.trace, spec.flows.size()));
  m.files.push_back("trace.csv");
  write_file(out_dir / "report.csv", report_to_csv(fairness_report(result.trace, spec)));
  m.files.push_back("report.csv");

  if (svg) {
    std::vector<Series> series(spec.flows.size());
    for (std::size_t i = 0; i < series.size(); ++i) series[i].name = "flow " + std::to_string(i);
    for (const TraceRecord& r : result.trace)
      for (std::size_t i = 0; i < series.size(); ++i) {
        series[i].x.push_back(r.t);
        series[i].y.push_back(r.flows[i].x);
      }
    write_file(out_dir / "plot.svg", line_chart_svg("Sending rates", "time (s)", "rate (pkt/s)", series));
    m.files.push_back("plot.svg");
  }
  finish_manifest(m, out_dir);
  return m;
}

AnalyticKind parse_analytic_kind(std::string_view name) {
  if (name == "fig1") return AnalyticKind::Fig1;
  if (name == "bound14") return AnalyticKind::Bound14;
  if (name == "eq15") return AnalyticKind::Eq15;
  throw Error(ErrorCode::Parse, "unknown analytic kind '" + std::string(name) + "'");
}

Table analytic_table(AnalyticKind kind, const AnalyticParams& p) {
  Table t;
  switch (kind) {
    case AnalyticKind::Fig1: {
      if (!(p.q_f > 0.0)) throw Error(ErrorCode::Degenerate, "q_f must be > 0");
      const std::vector<double> rho = p.rho.empty() ? linspace(0.0, 0.05, 20) : p.rho;
      for (double r : rho)
        if (!(r >= 0.0 && r < 1.0)) throw Error(ErrorCode::Degenerate, "rho must be in [0, 1)");
      t.columns = {"k", "rho", "x_star", "q_b"};
      for (double k : p.k) {
        if (!(k >= 0.0)) throw Error(ErrorCode::Degenerate, "k must be >= 0");
        for (const DecayPoint& d : reverse_decay_curve(p.alpha, p.q_f, k, rho))
          t.rows.push_back({k, d.rho, d.x_star, d.q_b});
      }
      break;
    }
    case AnalyticKind::Bound14: {
      const std::vector<double> n = p.n.empty() ? linspace(1.0, 1.0, 20) : p.n;
      t.columns = {"n", "d_min"};
      for (double v : n) {
        if (!(v >= 1.0) || v != std::floor(v)) throw Error(ErrorCode::Degenerate, "n must be a positive integer");
        t.rows.push_back({v, pause_feasibility_bound(static_cast<int>(v), p.alpha, p.capacity)});
      }
      break;
    }
    case AnalyticKind::Eq15: {
      const std::vector<double> buffers =
          p.buffers.empty() ? linspace(2.0 * p.k_pkts, p.k_pkts, 19) : p.buffers;
      const bool band = p.vegas_alpha && p.vegas_beta;
      if (p.vegas_alpha.has_value() != p.vegas_beta.has_value())
        throw Error(ErrorCode::Degenerate, "vegas band needs both alpha and beta");
      t.columns = {"B", "ratio"};
      if (band) {
        t.columns.push_back("ratio_at_vegas_alpha");
        t.columns.push_back("ratio_at_vegas_beta");
      }
      for (double b : buffers) {
        std::vector<double> row = {b, reno_fast_share_bound(b, p.k_pkts)};
        if (band) {
          const ShareBand s = reno_vegas_share_band(b, *p.vegas_alpha, *p.vegas_beta);
          row.push_back(s.at_low);
          row.push_back(s.at_high);
        }
        t.rows.push_back(std::move(row));
      }
      break;
    }
  }
  return t;
}

RunManifest cmd_analytic(AnalyticKind kind, const AnalyticParams& params, const fs::path& out_dir,
                         bool svg) {
  const Table t = analytic_table(kind, params);
  prepare_dir(out_dir);
  const std::string csv = table_to_csv(t);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(csv)));
  RunManifest m{"", out_dir.string(), {}, hash, std::nullopt};
  write_file(out_dir / "curves.csv", csv);
  m.files.push_back("curves.csv");

  if (svg) {
    std::vector<Series> series;
    std::string title;
    std::string xl;
    std::string yl;
    if (kind == AnalyticKind::Fig1) {
      title = "Equilibrium rate under reverse queuing";
      xl = "rho = q_b / r";
      yl = "x* (pkt/s)";
      for (const auto& row : t.rows) {
        if (series.empty() || series.back().name != "k = " + format_number(row[0]))
          series.push_back({"k = " + format_number(row[0]), {}, {}});
        series.back().x.push_back(row[1]);
        series.back().y.push_back(row[2]);
      }
    } else {
      title = kind == AnalyticKind::Bound14 ? "Minimum propagation delay for pausing" : "Reno to FAST share";
      xl = kind == AnalyticKind::Bound14 ? "flows" : "buffer (pkts)";
      yl = kind == AnalyticKind::Bound14 ? "d_min (s)" : "ratio";
      for (std::size_t c = 1; c < t.columns.size(); ++c) {
        Series s{t.columns[c], {}, {}};
        for (const auto& row : t.rows) {
          s.x.push_back(row[0]);
          s.y.push_back(row[c]);
        }
        series.push_back(std::move(s));
      }
    }
    write_file(out_dir / "plot.svg", line_chart_svg(title, xl, yl, series));
    m.files.push_back("plot.svg");
  }
  finish_manifest(m, out_dir);
  return m;
}

ScenarioSpec apply_axis(const ScenarioSpec& base, std::string_view axis, double v) {
  ScenarioSpec s = base;
  const auto each_flow = [&](auto&& fn) {
    for (FlowConfig& f : s.flows) fn(f);
  };
  if (axis == "buffer") s.fwd_link.buffer = v;
  else if (axis == "capacity") s.fwd_link.capacity = v;
  else if (axis == "bwd_buffer") s.bwd_link.buffer = v;
  else if (axis == "bwd_capacity") s.bwd_link.capacity = v;
  else if (axis == "prop_delay") each_flow([&](FlowConfig& f) { f.fwd_prop_delay = f.bwd_prop_delay = v / 2.0; });
  else if (axis == "fwd_prop") each_flow([&](FlowConfig& f) { f.fwd_prop_delay = v; });
  else if (axis == "bwd_prop") each_flow([&](FlowConfig& f) { f.bwd_prop_delay = v; });
  else if (axis == "alpha") each_flow([&](FlowConfig& f) { f.alpha = v; });
  else if (axis == "gamma") each_flow([&](FlowConfig& f) { f.gamma = v; });
  else if (axis == "mu") each_flow([&](FlowConfig& f) { f.mu = v; });
  else if (axis == "start_spacing") {
    for (std::size_t i = 0; i < s.flows.size(); ++i) s.flows[i].start_time = static_cast<double>(i) * v;
  } else if (axis == "n") {
    if (!(v >= 1.0) || v != std::floor(v)) throw Error(ErrorCode::Degenerate, "n must be a positive integer");
    if (s.flows.empty()) throw Error(ErrorCode::Degenerate, "template has no flows");
    const double spacing = base.flows.size() > 1 ? base.flows[1].start_time - base.flows[0].start_time : 0.0;
    const FlowConfig proto = base.flows.front();
    s.flows.clear();
    for (int i = 0; i < static_cast<int>(v); ++i) {
      FlowConfig f = proto;
      f.id = i;
      f.start_time = proto.start_time + spacing * i;
      s.flows.push_back(f);
    }
  } else if (axis == "seed") {
    if (!(v >= 0.0) || v != std::floor(v)) throw Error(ErrorCode::Degenerate, "seed must be a non-negative integer");
    s.seed = static_cast<std::uint64_t>(v);
  } else if (axis == "duration") {
    const double scale = base.duration > 0.0 ? v / base.duration : 1.0;
    s.duration = v;
    s.measure_start = base.measure_start * scale;
    s.measure_end = base.measure_end * scale;
  } else {
    throw Error(ErrorCode::UnknownKey, "sweep axis '" + std::string(axis) + "'");
  }
  return s;
}

std::vector<SweepRow> run_sweep(const ScenarioSpec& base, std::string_view axis, std::vector<double> values) {
  static constexpr std::string_view kAxes[] = {"buffer", "capacity", "bwd_buffer", "bwd_capacity",
                                               "prop_delay", "fwd_prop", "bwd_prop", "alpha",
                                               "gamma", "mu", "start_spacing", "n", "seed", "duration"};
  if (std::find(std::begin(kAxes), std::end(kAxes), axis) == std::end(kAxes))
    throw Error(ErrorCode::UnknownKey, "sweep axis '" + std::string(axis) + "'");
  std::sort(values.begin(), values.end());
  std::vector<SweepRow> rows;
  for (double v : values) {
    SweepRow row;
    row.value = v;
    try {
      const ScenarioSpec s = apply_axis(base, axis, v);
      const RunResult r = run(s);
      row.report = fairness_report(r.trace, s);
    } catch (const std::exception& e) {
      row.status = e.what();
      row.report.reset();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

RunManifest cmd_sweep(const ScenarioSpec& base, const std::string& scenario_path, std::string_view axis,
                      const std::vector<double>& values, const fs::path& out_dir) {
  const std::vector<SweepRow> rows = run_sweep(base, axis, values);
  prepare_dir(out_dir);
  RunManifest m{scenario_path, out_dir.string(), {}, spec_hash(base), base.seed};
  write_file(out_dir / "report.csv", sweep_to_csv(axis, rows));
  m.files.push_back("report.csv");
  finish_manifest(m, out_dir);
  return m;
}

}  // namespace dca
