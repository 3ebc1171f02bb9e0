#include "evrp/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "evrp/simulate.hpp"
#include "evrp/text.hpp"

namespace evrp {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("report csv: line " + std::to_string(line) + ": " +
                           what);
}

constexpr const char* kHeader = "dataset,nC,nS,method,d,v,ed,t,cost";

double parse_num(const std::string& v, int line) {
  const char* s = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(s, &end);
  if (end == s || *end != '\0') fail(line, "expected a number, got '" + v + "'");
  return x;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

void check_name(const std::string& s) {
  if (s.empty() || s.find(',') != std::string::npos ||
      s.find('\n') != std::string::npos)
    throw std::invalid_argument("report: name unusable in csv: '" + s + "'");
}

// Integral values print bare, everything else with two decimals.
std::string pretty(double x) {
  if (!std::isfinite(x)) return format_double(x);
  if (x == std::floor(x) && std::abs(x) < 1e15)
    return std::to_string(std::llround(x));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string fixed4(double x) {
  if (!std::isfinite(x)) return format_double(x);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

// Right-aligns every column except those in `left`; two spaces between.
std::string render_table(const std::vector<std::vector<std::string>>& cells,
                         const std::vector<bool>& left) {
  std::vector<std::size_t> width(left.size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c)
      width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::size_t pad = width[c] - row[c].size();
      if (c > 0) out += "  ";
      if (left[c]) {
        out += row[c];
        if (c + 1 < row.size()) out += std::string(pad, ' ');
      } else {
        out += std::string(pad, ' ');
        out += row[c];
      }
    }
    out += '\n';
  }
  return out;
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / double(xs.size() - 1));
}

}  // namespace

std::string family_of(const std::string& dataset) {
  std::size_t i = 0;
  while (i < dataset.size() && std::isalpha((unsigned char)dataset[i])) ++i;
  if (i == 0) return dataset;
  std::size_t j = i;
  while (j < dataset.size() && std::isdigit((unsigned char)dataset[j])) ++j;
  if (j == i) return dataset;
  if (j >= dataset.size() || dataset[j] != '_') return dataset;
  std::size_t e = j + 1;
  while (e < dataset.size() && std::isdigit((unsigned char)dataset[e])) ++e;
  if (e == j + 1 || e != dataset.size()) return dataset;
  return dataset.substr(0, i) + dataset[i] + dataset.substr(j);
}

double cost_identity_residual(const ReportRow& row, const CostWeights& w,
                              double discharge_rate) {
  return row.cost - evaluate_cost_from_energy(row.distance, row.vehicles,
                                              row.energy_discharged,
                                              discharge_rate, w);
}

std::vector<ReportRow> family_averages(const std::vector<ReportRow>& rows) {
  using Key = std::pair<std::string, std::string>;
  std::vector<Key> order;
  std::map<Key, std::pair<ReportRow, int>> acc;
  for (const ReportRow& r : rows) {
    const std::string fam = family_of(r.dataset);
    if (fam == r.dataset) continue;
    const Key key{fam, r.method};
    auto [it, fresh] = acc.try_emplace(key);
    if (fresh) order.push_back(key);
    ReportRow& s = it->second.first;
    s.n_customers += r.n_customers;
    s.n_stations += r.n_stations;
    s.distance += r.distance;
    s.vehicles += r.vehicles;
    s.energy_discharged += r.energy_discharged;
    s.wall_seconds += r.wall_seconds;
    s.cost += r.cost;
    ++it->second.second;
  }
  std::vector<ReportRow> out;
  for (const Key& key : order) {
    const auto& [sum, n] = acc.at(key);
    ReportRow r = sum;
    r.dataset = key.first;
    r.method = key.second;
    r.n_customers /= n;
    r.n_stations /= n;
    r.distance /= n;
    r.vehicles /= n;
    r.energy_discharged /= n;
    r.wall_seconds /= n;
    r.cost /= n;
    out.push_back(std::move(r));
  }
  return out;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = std::string(kHeader) + "\n";
  for (const ReportRow& r : rows) {
    check_name(r.dataset);
    check_name(r.method);
    out += r.dataset + ',' + format_double(r.n_customers) + ',' +
           format_double(r.n_stations) + ',' + r.method + ',' +
           format_double(r.distance) + ',' + format_double(r.vehicles) + ',' +
           format_double(r.energy_discharged) + ',' +
           format_double(r.wall_seconds) + ',' + format_double(r.cost) + '\n';
  }
  return out;
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<ReportRow> rows;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kHeader)
        fail(lineno, "expected header '" + std::string(kHeader) + "'");
      saw_header = true;
      continue;
    }
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 9)
      fail(lineno, "expected 9 fields, got " + std::to_string(f.size()));
    ReportRow r;
    r.dataset = f[0];
    r.n_customers = parse_num(f[1], lineno);
    r.n_stations = parse_num(f[2], lineno);
    r.method = f[3];
    r.distance = parse_num(f[4], lineno);
    r.vehicles = parse_num(f[5], lineno);
    r.energy_discharged = parse_num(f[6], lineno);
    r.wall_seconds = parse_num(f[7], lineno);
    r.cost = parse_num(f[8], lineno);
    if (r.dataset.empty()) fail(lineno, "empty dataset name");
    if (r.method.empty()) fail(lineno, "empty method name");
    rows.push_back(std::move(r));
  }
  if (!saw_header) fail(lineno, "missing header");
  return rows;
}

std::string report_table(const std::vector<ReportRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(
      {"dataset", "nC", "nS", "method", "d", "v", "ed", "t", "cost"});
  for (const ReportRow& r : rows)
    cells.push_back({r.dataset, pretty(r.n_customers), pretty(r.n_stations),
                     r.method, pretty(r.distance), pretty(r.vehicles),
                     pretty(r.energy_discharged), pretty(r.wall_seconds),
                     pretty(r.cost)});
  return render_table(cells, {true, false, false, true, false, false, false,
                              false, false});
}

Comparison compare_reports(const std::vector<ReportRow>& a,
                           const std::vector<ReportRow>& b) {
  std::map<std::string, const ReportRow*> bmap;
  for (const ReportRow& r : b)
    if (!bmap.emplace(r.dataset, &r).second)
      throw std::invalid_argument("compare: duplicate dataset '" + r.dataset +
                                  "' in report b");
  std::map<std::string, bool> seen;
  if (a.size() != b.size())
    throw std::invalid_argument("compare: reports cover different sets");

  Comparison cmp;
  std::map<long long, std::vector<std::size_t>> by_scope;
  std::vector<std::size_t> instance_rows;

  // Family names derived from members mark the aggregate rows.
  std::map<std::string, bool> families;
  for (const ReportRow& r : a) {
    const std::string fam = family_of(r.dataset);
    if (fam != r.dataset) families[fam] = true;
  }

  for (const ReportRow& ra : a) {
    if (!seen.emplace(ra.dataset, true).second)
      throw std::invalid_argument("compare: duplicate dataset '" + ra.dataset +
                                  "' in report a");
    const auto it = bmap.find(ra.dataset);
    if (it == bmap.end())
      throw std::invalid_argument("compare: dataset '" + ra.dataset +
                                  "' missing from report b");
    const ReportRow& rb = *it->second;
    if (ra.cost == 0.0)
      throw std::invalid_argument("compare: zero cost for '" + ra.dataset +
                                  "' in report a");
    CompareRow row;
    row.dataset = ra.dataset;
    row.cost_a = ra.cost;
    row.cost_b = rb.cost;
    row.gap_pct = (rb.cost - ra.cost) / ra.cost * 100.0;
    row.time_ratio = rb.wall_seconds > 0.0
                         ? ra.wall_seconds / rb.wall_seconds
                         : std::numeric_limits<double>::infinity();
    if (!families.count(ra.dataset)) {
      const long long scope = std::llround(ra.n_customers + ra.n_stations);
      by_scope[scope].push_back(cmp.rows.size());
      instance_rows.push_back(cmp.rows.size());
    }
    cmp.rows.push_back(std::move(row));
  }

  auto stats_over = [&](const std::string& scope,
                        const std::vector<std::size_t>& idx) {
    CompareStats st;
    st.scope = scope;
    st.rows = int(idx.size());
    std::vector<double> gaps, ratios;
    for (std::size_t i : idx) {
      gaps.push_back(cmp.rows[i].gap_pct);
      ratios.push_back(cmp.rows[i].time_ratio);
    }
    st.mean_gap_pct = mean(gaps);
    st.std_gap_pct = sample_std(gaps);
    st.mean_time_ratio = mean(ratios);
    return st;
  };
  for (const auto& [scope, idx] : by_scope)
    cmp.stats.push_back(stats_over(std::to_string(scope), idx));
  if (!instance_rows.empty())
    cmp.stats.push_back(stats_over("all", instance_rows));
  return cmp;
}

std::string comparison_csv(const Comparison& cmp) {
  std::string out = "dataset,cost_a,cost_b,gap_pct,time_ratio\n";
  for (const CompareRow& r : cmp.rows)
    out += r.dataset + ',' + format_double(r.cost_a) + ',' +
           format_double(r.cost_b) + ',' + format_double(r.gap_pct) + ',' +
           format_double(r.time_ratio) + '\n';
  out += "scope,rows,mean_gap_pct,std_gap_pct,mean_time_ratio\n";
  for (const CompareStats& s : cmp.stats)
    out += s.scope + ',' + std::to_string(s.rows) + ',' +
           format_double(s.mean_gap_pct) + ',' +
           format_double(s.std_gap_pct) + ',' +
           format_double(s.mean_time_ratio) + '\n';
  return out;
}

std::string comparison_table(const Comparison& cmp) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"dataset", "cost_a", "cost_b", "gap%", "t_a/t_b"});
  for (const CompareRow& r : cmp.rows)
    cells.push_back({r.dataset, pretty(r.cost_a), pretty(r.cost_b),
                     pretty(r.gap_pct), pretty(r.time_ratio)});
  std::string out = render_table(cells, {true, false, false, false, false});

  cells.clear();
  cells.push_back({"scope", "rows", "mean gap%", "std gap%", "mean t_a/t_b"});
  for (const CompareStats& s : cmp.stats)
    cells.push_back({s.scope, std::to_string(s.rows), pretty(s.mean_gap_pct),
                     pretty(s.std_gap_pct), pretty(s.mean_time_ratio)});
  out += '\n';
  out += render_table(cells, {true, false, false, false, false});
  return out;
}

std::vector<VerifyRow> verify_rows(const std::vector<ReportRow>& rows,
                                   const CostWeights& w, double discharge_rate,
                                   double tolerance) {
  std::vector<VerifyRow> out;
  for (const ReportRow& r : rows) {
    VerifyRow v;
    v.row = r;
    v.recomputed = evaluate_cost_from_energy(
        r.distance, r.vehicles, r.energy_discharged, discharge_rate, w);
    v.residual = std::abs(r.cost - v.recomputed);
    v.pass = v.residual <= tolerance;
    out.push_back(std::move(v));
  }
  return out;
}

std::string verify_report(const std::vector<VerifyRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(
      {"result", "dataset", "method", "cost", "recomputed", "residual"});
  int passed = 0;
  for (const VerifyRow& v : rows) {
    passed += v.pass ? 1 : 0;
    cells.push_back({v.pass ? "PASS" : "FAIL", v.row.dataset, v.row.method,
                     pretty(v.row.cost), fixed4(v.recomputed),
                     fixed4(v.residual)});
  }
  std::string out =
      render_table(cells, {true, true, true, false, false, false});
  out += std::to_string(passed) + "/" + std::to_string(rows.size()) +
         " rows pass\n";
  return out;
}

}  // namespace evrp
