#include "evrp/lp_export.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "evrp/text.hpp"

namespace evrp {

namespace {

const auto fmt = format_double;

std::string arc(int i, int j) {
  return "a_" + std::to_string(i) + "_" + std::to_string(j);
}

struct Row {
  std::string name;
  std::vector<std::pair<double, std::string>> terms;
  const char* sense;
  double rhs;
};

// One row per line, wrapped every eight terms; every term carries an
// explicit sign and coefficient so downstream parsing stays trivial.
void emit_terms(std::ostringstream& os,
                const std::vector<std::pair<double, std::string>>& terms) {
  int on_line = 0;
  for (const auto& [c, v] : terms) {
    if (on_line == 8) {
      os << "\n   ";
      on_line = 0;
    }
    os << (c < 0.0 ? " - " : " + ") << fmt(std::abs(c)) << ' ' << v;
    ++on_line;
  }
}

void emit_row(std::ostringstream& os, const Row& r) {
  if (r.terms.empty()) return;
  os << ' ' << r.name << ':';
  emit_terms(os, r.terms);
  os << ' ' << r.sense << ' ' << fmt(r.rhs) << '\n';
}

}  // namespace

std::string export_milp(const Instance& inst) {
  const CostWeights& w = inst.weights();
  const double l0 = inst.horizon();
  const double cap_q = inst.battery();
  const double cap_c = inst.capacity();
  const double rate_h = inst.consumption_rate();
  const double rate_r = inst.discharge_rate();

  std::vector<int> custs, stats;
  for (const Customer& c : inst.customers()) custs.push_back(c.id);
  for (const Station& s : inst.stations()) stats.push_back(s.id);
  std::sort(custs.begin(), custs.end());
  std::sort(stats.begin(), stats.end());
  std::vector<int> nodes = custs;
  nodes.insert(nodes.end(), stats.begin(), stats.end());
  std::sort(nodes.begin(), nodes.end());
  std::vector<int> tails{Instance::kDepotId};
  tails.insert(tails.end(), nodes.begin(), nodes.end());

  auto span = [&](int id) {
    const Station& s = inst.station(id);
    return s.grid_stop - s.grid_start;
  };
  auto service = [&](int id) {
    if (id == Instance::kDepotId) return 0.0;
    return inst.kind(id) == NodeKind::customer ? inst.customer(id).service_time
                                               : 0.0;
  };
  auto demand = [&](int id) {
    if (id == Instance::kDepotId) return 0.0;
    return inst.kind(id) == NodeKind::customer ? inst.customer(id).demand : 0.0;
  };
  auto dist = [&](int i, int j) { return inst.travel(i, j).distance; };
  auto time = [&](int i, int j) { return inst.travel(i, j).time; };

  std::ostringstream os;
  os << "\\ Electric-fleet delivery routing with paid grid discharge.\n"
     << "\\ Node 0 is the depot; other ids are the instance's customers and\n"
     << "\\ stations. Variables:\n"
     << "\\   a_i_j     binary, 1 iff some vehicle drives the arc i -> j\n"
     << "\\   tau_i     service start at node i (waiting is allowed first)\n"
     << "\\   theta_i   battery charge on arrival at node i\n"
     << "\\   lambda_i  cargo on arrival at node i\n"
     << "\\   gamma_i   discharge duration at station i, 0 unless visited\n"
     << "\\ Row families:\n"
     << "\\   visit_i   each customer is departed exactly once\n"
     << "\\   flow_i    arcs in == arcs out at every node, depot included\n"
     << "\\   tc_i_j    service-start propagation, tail customer or depot;\n"
     << "\\             slack below tau_j is waiting time at j\n"
     << "\\   ts_i_j    service-start propagation, tail station (adds the\n"
     << "\\             discharge stay gamma_i)\n"
     << "\\   bc_i_j    battery propagation, tail customer or depot\n"
     << "\\   bs_i_j    battery propagation, tail station\n"
     << "\\   load_i_j  cargo propagation along active arcs\n"
     << "\\   gs_i/ge_i peak-window gates on discharge at visited stations\n"
     << "\\   gz_i      gamma_i forced to zero at unvisited stations\n"
     << "\\   rt_i/re_i horizon and battery on return arcs into the depot\n"
     << "\\   sv_i      a station is visited at most once\n"
     << "\\   fleet     number of dispatched vehicles within the fleet size\n"
     << "\\ Customer time windows and demand floors are bounds: tau_i in\n"
     << "\\ [open_i, close_i] and lambda_i >= demand_i (arrival cargo covers\n"
     << "\\ the stop being served).\n"
     << "\\ The stay duration enters time and battery rows as the bilinear\n"
     << "\\ product gamma_i * a_i_j; it is rewritten with the standard big-M\n"
     << "\\ bound gamma_i <= span_i (the peak-window length), exact because\n"
     << "\\ gz_i pins gamma_i to zero when station i is unvisited.\n"
     << "\\ Big-M constants: the horizon for time rows, battery capacity for\n"
     << "\\ charge rows, cargo capacity for load rows, each widened by span_i\n"
     << "\\ where gamma_i occurs.\n"
     << "\\ Subtours are excluded by the time rows whenever inter-node travel\n"
     << "\\ times are positive; exactly coincident nodes would need extra\n"
     << "\\ ordering rows.\n";

  os << "Minimize\n obj:";
  {
    std::vector<std::pair<double, std::string>> terms;
    for (int i : tails)
      for (int j : tails) {
        if (i == j) continue;
        double c = w.per_distance * dist(i, j);
        if (i == Instance::kDepotId) c += w.per_vehicle;
        terms.push_back({c, arc(i, j)});
      }
    for (int i : stats)
      terms.push_back({-w.per_discharge_time, "gamma_" + std::to_string(i)});
    emit_terms(os, terms);
  }
  os << "\nSubject To\n";

  for (int i : custs) {
    Row r{"visit_" + std::to_string(i), {}, "=", 1.0};
    for (int j : tails)
      if (j != i) r.terms.push_back({1.0, arc(i, j)});
    emit_row(os, r);
  }

  for (int i : tails) {
    Row r{"flow_" + std::to_string(i), {}, "=", 0.0};
    for (int j : tails)
      if (j != i) {
        r.terms.push_back({1.0, arc(i, j)});
        r.terms.push_back({-1.0, arc(j, i)});
      }
    emit_row(os, r);
  }

  // tau_j >= tau_i + service_i (+ gamma_i) + travel_ij when the arc is
  // active; tau_0 = 0 is substituted out on depot tails.
  for (int i : tails) {
    if (inst.has_node(i) && inst.kind(i) == NodeKind::station) continue;
    for (int j : nodes) {
      if (i == j) continue;
      Row r{"tc_" + std::to_string(i) + "_" + std::to_string(j), {}, "<=", l0};
      if (i != Instance::kDepotId) r.terms.push_back({1.0, "tau_" + std::to_string(i)});
      r.terms.push_back({-1.0, "tau_" + std::to_string(j)});
      r.terms.push_back({time(i, j) + service(i) + l0, arc(i, j)});
      emit_row(os, r);
    }
  }
  for (int i : stats)
    for (int j : nodes) {
      if (i == j) continue;
      Row r{"ts_" + std::to_string(i) + "_" + std::to_string(j), {}, "<=",
            l0 + span(i)};
      r.terms.push_back({1.0, "tau_" + std::to_string(i)});
      r.terms.push_back({-1.0, "tau_" + std::to_string(j)});
      r.terms.push_back({time(i, j) + l0 + span(i), arc(i, j)});
      r.terms.push_back({1.0, "gamma_" + std::to_string(i)});
      emit_row(os, r);
    }

  // theta_j <= theta_i - consumption when the arc is active; theta_0 = full
  // battery is substituted out on depot tails.
  for (int i : tails) {
    if (inst.has_node(i) && inst.kind(i) == NodeKind::station) continue;
    for (int j : nodes) {
      if (i == j) continue;
      Row r{"bc_" + std::to_string(i) + "_" + std::to_string(j), {}, "<=",
            cap_q};
      r.terms.push_back({1.0, "theta_" + std::to_string(j)});
      if (i == Instance::kDepotId)
        r.rhs = 2.0 * cap_q;
      else
        r.terms.push_back({-1.0, "theta_" + std::to_string(i)});
      r.terms.push_back({rate_h * dist(i, j) + cap_q, arc(i, j)});
      emit_row(os, r);
    }
  }
  for (int i : stats)
    for (int j : nodes) {
      if (i == j) continue;
      Row r{"bs_" + std::to_string(i) + "_" + std::to_string(j), {}, "<=",
            rate_r * span(i) + cap_q};
      r.terms.push_back({1.0, "theta_" + std::to_string(j)});
      r.terms.push_back({-1.0, "theta_" + std::to_string(i)});
      r.terms.push_back(
          {rate_h * dist(i, j) + rate_r * span(i) + cap_q, arc(i, j)});
      r.terms.push_back({rate_r, "gamma_" + std::to_string(i)});
      emit_row(os, r);
    }

  // lambda_j <= lambda_i - demand_i when the arc is active; the depot tail
  // uses a full load in place of lambda_0.
  for (int i : tails)
    for (int j : nodes) {
      if (i == j) continue;
      Row r{"load_" + std::to_string(i) + "_" + std::to_string(j), {}, "<=",
            cap_c};
      r.terms.push_back({1.0, "lambda_" + std::to_string(j)});
      if (i == Instance::kDepotId)
        r.rhs = 2.0 * cap_c;
      else
        r.terms.push_back({-1.0, "lambda_" + std::to_string(i)});
      r.terms.push_back({demand(i) + cap_c, arc(i, j)});
      emit_row(os, r);
    }

  for (int i : stats) {
    const Station& st = inst.station(i);
    const std::string si = std::to_string(i);
    Row gs{"gs_" + si, {{1.0, "tau_" + si}}, ">=", 0.0};
    Row ge{"ge_" + si, {{1.0, "tau_" + si}, {1.0, "gamma_" + si}}, "<=",
           l0 + span(i)};
    Row gz{"gz_" + si, {{1.0, "gamma_" + si}}, "<=", 0.0};
    Row sv{"sv_" + si, {}, "<=", 1.0};
    for (int j : tails)
      if (j != i) {
        gs.terms.push_back({-st.grid_start, arc(i, j)});
        ge.terms.push_back({l0 + span(i) - st.grid_stop, arc(i, j)});
        gz.terms.push_back({-span(i), arc(i, j)});
        sv.terms.push_back({1.0, arc(i, j)});
      }
    emit_row(os, gs);
    emit_row(os, ge);
    emit_row(os, gz);
    emit_row(os, sv);
  }

  // Return arcs have no head variables; make the horizon and the battery
  // floor explicit on them instead.
  for (int i : nodes) {
    const bool st = inst.kind(i) == NodeKind::station;
    const double sp = st ? span(i) : 0.0;
    const std::string si = std::to_string(i);
    Row rt{"rt_" + si, {{1.0, "tau_" + si}}, "<=", l0 + sp};
    Row re{"re_" + si, {{-1.0, "theta_" + si}}, "<=", rate_r * sp};
    if (st) {
      rt.terms.push_back({1.0, "gamma_" + si});
      re.terms.push_back({rate_r, "gamma_" + si});
    }
    rt.terms.push_back(
        {service(i) + time(i, Instance::kDepotId) + sp, arc(i, 0)});
    re.terms.push_back(
        {rate_h * dist(i, Instance::kDepotId) + rate_r * sp, arc(i, 0)});
    emit_row(os, rt);
    emit_row(os, re);
  }

  {
    Row r{"fleet", {}, "<=", double(inst.fleet_size())};
    for (int j : nodes) r.terms.push_back({1.0, arc(Instance::kDepotId, j)});
    emit_row(os, r);
  }

  os << "Bounds\n";
  for (int i : custs) {
    const Customer& c = inst.customer(i);
    os << ' ' << fmt(c.window_open) << " <= tau_" << i << " <= "
       << fmt(c.window_close) << '\n';
  }
  for (int i : stats)
    os << " 0 <= tau_" << i << " <= " << fmt(l0) << '\n';
  for (int i : nodes)
    os << " 0 <= theta_" << i << " <= " << fmt(cap_q) << '\n';
  for (int i : nodes)
    os << ' ' << fmt(demand(i)) << " <= lambda_" << i << " <= " << fmt(cap_c)
       << '\n';
  for (int i : stats)
    os << " 0 <= gamma_" << i << " <= " << fmt(span(i)) << '\n';

  os << "Binary\n";
  for (int i : tails)
    for (int j : tails)
      if (i != j) os << ' ' << arc(i, j) << '\n';
  os << "End\n";
  return os.str();
}

}  // namespace evrp
