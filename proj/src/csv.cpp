#include "dca/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace dca {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::string_view l : split(text, '\n')) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

[[noreturn]] void csv_error(const std::string& what) { throw Error(ErrorCode::Parse, "csv: " + what); }

const char* const kReportColumns =
    "jain_index,last_to_first_ratio,reno_to_fast_ratio,fwd_mean_backlog,bwd_mean_backlog,"
    "per_flow_mean_rate";

std::string report_cells(const FairnessReport& r) {
  std::string out = format_number(r.jain_index) + ',' + format_number(r.last_to_first_ratio) + ',';
  if (r.reno_to_fast_ratio) out += format_number(*r.reno_to_fast_ratio);
  out += ',' + format_number(r.fwd_mean_backlog) + ',' + format_number(r.bwd_mean_backlog) + ',';
  for (std::size_t i = 0; i < r.per_flow_mean_rate.size(); ++i) {
    if (i) out += ';';
    out += format_number(r.per_flow_mean_rate[i]);
  }
  return out;
}

FairnessReport report_from_cells(const std::vector<std::string_view>& c, std::size_t at) {
  FairnessReport r;
  r.jain_index = parse_number(c[at]);
  r.last_to_first_ratio = parse_number(c[at + 1]);
  if (!c[at + 2].empty()) r.reno_to_fast_ratio = parse_number(c[at + 2]);
  r.fwd_mean_backlog = parse_number(c[at + 3]);
  r.bwd_mean_backlog = parse_number(c[at + 4]);
  if (!c[at + 5].empty())
    for (std::string_view v : split(c[at + 5], ';')) r.per_flow_mean_rate.push_back(parse_number(v));
  return r;
}

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double parse_number(std::string_view cell) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    csv_error("not a number: '" + std::string(cell) + "'");
  return v;
}

std::string trace_csv_header(std::size_t flows) {
  std::string h = "t";
  for (std::size_t i = 0; i < flows; ++i) {
    const std::string s = std::to_string(i);
    h += ",w_" + s + ",x_" + s + ",d_hat_" + s + ",r_hat_" + s + ",q_hat_" + s;
  }
  h += ",fwd_backlog,bwd_backlog,fwd_loss_rate,ecn_mark_prob";
  return h;
}

std::string trace_to_csv(const std::vector<TraceRecord>& trace, std::size_t flows) {
  std::string out = trace_csv_header(flows) + '\n';
  for (const TraceRecord& r : trace) {
    out += format_number(r.t);
    for (std::size_t i = 0; i < flows; ++i) {
      const FlowSample& f = r.flows.at(i);
      for (double v : {f.w, f.x, f.d_hat, f.r_hat, f.q_hat}) {
        out += ',';
        out += format_number(v);
      }
    }
    for (double v : {r.fwd_backlog, r.bwd_backlog, r.fwd_loss_rate, r.ecn_mark_prob}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<TraceRecord> trace_from_csv(std::string_view text) {
  const auto ls = lines(text);
  if (ls.empty()) csv_error("empty trace");
  const std::size_t cols = split(ls[0], ',').size();
  if (cols < 5 || (cols - 5) % 5 != 0) csv_error("unexpected trace header");
  const std::size_t flows = (cols - 5) / 5;
  if (ls[0] != trace_csv_header(flows)) csv_error("unexpected trace header");
  std::vector<TraceRecord> out;
  for (std::size_t li = 1; li < ls.size(); ++li) {
    const auto c = split(ls[li], ',');
    if (c.size() != cols) csv_error("row " + std::to_string(li) + " has " + std::to_string(c.size()) + " cells");
    TraceRecord r;
    r.t = parse_number(c[0]);
    for (std::size_t i = 0; i < flows; ++i) {
      const std::size_t b = 1 + 5 * i;
      r.flows.push_back({parse_number(c[b]), parse_number(c[b + 1]), parse_number(c[b + 2]),
                         parse_number(c[b + 3]), parse_number(c[b + 4])});
    }
    const std::size_t b = 1 + 5 * flows;
    r.fwd_backlog = parse_number(c[b]);
    r.bwd_backlog = parse_number(c[b + 1]);
    r.fwd_loss_rate = parse_number(c[b + 2]);
    r.ecn_mark_prob = parse_number(c[b + 3]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string report_to_csv(const FairnessReport& report) {
  return std::string(kReportColumns) + '\n' + report_cells(report) + '\n';
}

FairnessReport report_from_csv(std::string_view text) {
  const auto ls = lines(text);
  if (ls.size() != 2 || ls[0] != kReportColumns) csv_error("unexpected report layout");
  const auto c = split(ls[1], ',');
  if (c.size() != 6) csv_error("report row needs 6 cells");
  return report_from_cells(c, 0);
}

std::string sweep_to_csv(std::string_view axis, const std::vector<SweepRow>& rows) {
  std::string out = std::string(axis) + ",status," + kReportColumns + '\n';
  for (const SweepRow& r : rows) {
    out += format_number(r.value) + ',' + sanitize(r.status) + ',';
    out += r.report ? report_cells(*r.report) : std::string(",,,,,");
    out += '\n';
  }
  return out;
}

std::vector<SweepRow> sweep_from_csv(std::string_view text) {
  const auto ls = lines(text);
  if (ls.empty()) csv_error("empty sweep");
  std::vector<SweepRow> out;
  for (std::size_t li = 1; li < ls.size(); ++li) {
    const auto c = split(ls[li], ',');
    if (c.size() != 8) csv_error("sweep row needs 8 cells");
    SweepRow r;
    r.value = parse_number(c[0]);
    r.status = std::string(c[1]);
    if (r.status == "ok") r.report = report_from_cells(c, 2);
    out.push_back(std::move(r));
  }
  return out;
}

std::string table_to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

Table table_from_csv(std::string_view text) {
  const auto ls = lines(text);
  if (ls.empty()) csv_error("empty table");
  Table t;
  for (std::string_view c : split(ls[0], ',')) t.columns.emplace_back(c);
  for (std::size_t li = 1; li < ls.size(); ++li) {
    const auto c = split(ls[li], ',');
    if (c.size() != t.columns.size()) csv_error("ragged table row " + std::to_string(li));
    std::vector<double> row;
    for (std::string_view v : c) row.push_back(parse_number(v));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace dca
