#pragma once

// CSV emitters and readers. Numbers use 9 significant digits, '.' as the
// decimal separator, no locale; emit(parse(text)) reproduces text exactly.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dca/analysis.hpp"
#include "dca/model.hpp"

namespace dca {

// "%.9g", with "inf"/"-inf" for infinities.
std::string format_number(double v);
double parse_number(std::string_view cell);

// Header: t, then w_i,x_i,d_hat_i,r_hat_i,q_hat_i per flow, then
// fwd_backlog,bwd_backlog,fwd_loss_rate,ecn_mark_prob.
std::string trace_csv_header(std::size_t flows);
std::string trace_to_csv(const std::vector<TraceRecord>& trace, std::size_t flows);
std::vector<TraceRecord> trace_from_csv(std::string_view text);

// One header line and one row. reno_to_fast_ratio is empty when absent;
// per-flow mean rates are ';'-separated in the last column.
std::string report_to_csv(const FairnessReport& report);
FairnessReport report_from_csv(std::string_view text);

// Sweep output: the axis value and a status column ahead of the report
// columns. status is "ok" or the error text; report fields are empty then.
struct SweepRow {
  double value = 0.0;
  std::string status = "ok";
  std::optional<FairnessReport> report;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};
std::string sweep_to_csv(std::string_view axis, const std::vector<SweepRow>& rows);
std::vector<SweepRow> sweep_from_csv(std::string_view text);

// Plain numeric table.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  friend bool operator==(const Table&, const Table&) = default;
};
std::string table_to_csv(const Table& table);
Table table_from_csv(std::string_view text);

}  // namespace dca
