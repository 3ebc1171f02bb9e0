#pragma once

#include <string>
#include <vector>

#include "evrp/instance.hpp"

namespace evrp {

// One benchmark measurement. CSV column order is fixed:
// dataset,nC,nS,method,d,v,ed,t,cost. Node counts and `vehicles` are
// doubles because family-average rows hold fractional means.
struct ReportRow {
  std::string dataset;
  double n_customers = 0.0;
  double n_stations = 0.0;
  std::string method;
  double distance = 0.0;
  double vehicles = 0.0;
  double energy_discharged = 0.0;
  double wall_seconds = 0.0;
  double cost = 0.0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

// "c101_25" -> "c1_25": letter prefix, first series digit, size suffix.
// Names without that shape map to themselves, so family names are fixed
// points and never aggregate twice.
std::string family_of(const std::string& dataset);

// Signed residual of cost = y1 d + y2 v - y3 ed / R on the row's own fields.
double cost_identity_residual(const ReportRow& row, const CostWeights& w,
                              double discharge_rate);

// Column-mean rows per (dataset family, method) in first-appearance order.
// Rows whose family equals their own name contribute nothing.
std::vector<ReportRow> family_averages(const std::vector<ReportRow>& rows);

std::string report_csv(const std::vector<ReportRow>& rows);

// Inverse of report_csv; throws std::runtime_error naming the line.
std::vector<ReportRow> parse_report_csv(const std::string& text);

// Aligned columns for reading; presentation only, excluded from
// determinism contracts.
std::string report_table(const std::vector<ReportRow>& rows);

struct CompareRow {
  std::string dataset;
  double cost_a = 0.0;
  double cost_b = 0.0;
  double gap_pct = 0.0;     // (cost_b - cost_a) / cost_a * 100
  double time_ratio = 0.0;  // t_a / t_b
};

// Gap spread within one node-count group (nC + nS rounded); standard
// deviations are sample (n - 1), zero for singletons.
struct CompareStats {
  std::string scope;  // node count ("25", "50", ...) or "all"
  int rows = 0;
  double mean_gap_pct = 0.0;
  double std_gap_pct = 0.0;
  double mean_time_ratio = 0.0;
};

struct Comparison {
  std::vector<CompareRow> rows;     // report a order
  std::vector<CompareStats> stats;  // node counts ascending, then "all"
};

// Joins on dataset name: both reports must carry exactly the same names,
// each once. Family-average rows get gap rows too but stay out of the
// stats. Throws std::invalid_argument on mismatched sets, duplicates, or a
// zero cost_a.
Comparison compare_reports(const std::vector<ReportRow>& a,
                           const std::vector<ReportRow>& b);

// Two blocks, each with its own header: gap rows, then family stats.
std::string comparison_csv(const Comparison& cmp);

std::string comparison_table(const Comparison& cmp);

struct VerifyRow {
  ReportRow row;
  double recomputed = 0.0;
  double residual = 0.0;  // absolute
  bool pass = false;
};

// Recomputes every row's cost from its own d/v/ed columns.
std::vector<VerifyRow> verify_rows(const std::vector<ReportRow>& rows,
                                   const CostWeights& w, double discharge_rate,
                                   double tolerance);

// One PASS/FAIL line per row plus a tally.
std::string verify_report(const std::vector<VerifyRow>& rows);

}  // namespace evrp
