#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "evrp/config.hpp"
#include "evrp/exact.hpp"
#include "evrp/ga.hpp"
#include "evrp/instance_io.hpp"
#include "evrp/report.hpp"
#include "evrp/rl.hpp"
#include "evrp/simulate.hpp"
#include "evrp/solomon.hpp"
#include "evrp/text.hpp"
#include "evrp/value_net.hpp"

namespace {

using namespace evrp;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct CommonOpts {
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out_path;
};

ToolConfig config_of(const CommonOpts& c) {
  if (c.config_path.empty()) return ToolConfig{};
  return load_config_file(c.config_path);
}

int cmd_convert(const CommonOpts& common, const std::string& input,
                int stations, const std::vector<int>& station_ids,
                const std::vector<double>& grid_window) {
  std::ifstream probe(input);
  if (!probe) {
    std::cerr << "evrp: cannot open " << input << "\n";
    return 2;
  }
  probe.close();

  const RawSolomon raw = parse_solomon(slurp(input));
  std::optional<std::pair<double, double>> grid;
  if (!grid_window.empty()) {
    if (grid_window.size() != 2)
      throw std::invalid_argument("--grid-window needs start,stop");
    grid = {grid_window[0], grid_window[1]};
  }
  const Instance inst = convert_to_evrptwd(raw, stations, grid, station_ids);

  std::string ids;
  for (const Station& s : inst.stations())
    ids += (ids.empty() ? "" : ",") + std::to_string(s.id);
  std::string header = "# converted from " +
                       std::filesystem::path(input).filename().string() +
                       " (" + raw.name + ")\n";
  header += "# customers=" + std::to_string(inst.customers().size()) +
            " stations=" + std::to_string(inst.stations().size());
  if (!inst.stations().empty()) {
    const Station& s = inst.stations().front();
    header += " station_ids=" + ids + " grid=[" + format_double(s.grid_start) +
              "," + format_double(s.grid_stop) + "]";
  }
  header += "\n";

  std::string out = common.out_path;
  if (out.empty())
    out = std::filesystem::path(input).stem().string() + ".evrp";
  spill(out, header + write_instance(inst));
  std::cout << "wrote " << out << ": " << inst.customers().size()
            << " customers, " << inst.stations().size() << " stations\n";
  return 0;
}

int cmd_run(const CommonOpts& common, const std::string& method,
            const std::vector<std::string>& paths,
            const std::string& checkpoint_path) {
  const ToolConfig cfg = config_of(common);
  std::optional<Checkpoint> ckpt;
  if (method == "rl") {
    if (checkpoint_path.empty()) {
      std::cerr << "evrp: run rl requires --checkpoint <file>\n";
      return 2;
    }
    std::ifstream in(checkpoint_path);
    if (!in) {
      std::cerr << "evrp: cannot open " << checkpoint_path << "\n";
      return 2;
    }
    ckpt = load_checkpoint(in);
  }

  std::vector<ReportRow> rows;
  std::vector<std::string> notes;
  for (const std::string& path : paths) {
    const Instance inst = read_instance_file(path);
    const std::string dataset = std::filesystem::path(path).stem().string();

    ReportRow row;
    row.dataset = dataset;
    row.n_customers = double(inst.customers().size());
    row.n_stations = double(inst.stations().size());
    row.method = method;

    Metrics m;
    if (method == "exact") {
      const auto t0 = std::chrono::steady_clock::now();
      const ExactResult res = solve_exact(inst, cfg.exact);
      row.wall_seconds = seconds_since(t0);
      if (!res.solution) {
        notes.push_back(dataset + ": no feasible plan" +
                        (res.proven_optimal ? " (proven)" : " within limits"));
      } else {
        m = res.solution->metrics;
        if (!res.proven_optimal)
          notes.push_back(dataset + ": search limits hit, plan not proven");
      }
    } else if (method == "ga") {
      GaConfig g = cfg.ga;
      g.seed = common.seed;
      const auto t0 = std::chrono::steady_clock::now();
      const GaResult res = run_ga(inst, g);
      row.wall_seconds = seconds_since(t0);
      m = res.best.metrics;
      const bool feasible = check_solution(inst, res.best).empty() &&
                            m.vehicles <= inst.fleet_size();
      if (!feasible) notes.push_back(dataset + ": best plan infeasible");
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      const RolloutResult res = infer(ckpt->network, inst);
      row.wall_seconds = seconds_since(t0);
      m = res.solution.metrics;
      if (!res.unserved.empty())
        notes.push_back(dataset + ": " + std::to_string(res.unserved.size()) +
                        " customers unserved");
    }
    row.distance = m.distance;
    row.vehicles = double(m.vehicles);
    row.energy_discharged = m.energy_discharged;
    row.cost = m.cost;
    rows.push_back(std::move(row));
  }

  const std::vector<ReportRow> averages = family_averages(rows);
  rows.insert(rows.end(), averages.begin(), averages.end());

  std::cout << report_table(rows);
  for (const std::string& n : notes) std::cout << "note: " << n << "\n";
  if (!common.out_path.empty()) spill(common.out_path, report_csv(rows));
  return 0;
}

int cmd_train(const CommonOpts& common, const std::string& curve_path) {
  if (common.out_path.empty()) {
    std::cerr << "evrp: train requires --out <checkpoint>\n";
    return 2;
  }
  RlTrainConfig tc = config_of(common).rl;
  tc.seed = common.seed;
  const RlTrainResult res = train(tc);

  std::ostringstream ckpt;
  save_checkpoint(ckpt, res.network, tc.seed);
  spill(common.out_path, ckpt.str());
  if (!curve_path.empty()) spill(curve_path, curve_csv(res.curve));

  double tail = 0.0;
  const std::size_t n = res.curve.size();
  const std::size_t k = std::min<std::size_t>(25, n);
  for (std::size_t i = n - k; i < n; ++i) tail += res.curve[i].fulfilment;
  std::cout << "episodes: " << n << "\n";
  std::cout << "final fulfilment ratio: "
            << format_double(res.curve.back().fulfilment) << "\n";
  std::cout << "mean fulfilment, last " << k << " episodes: "
            << format_double(tail / double(k)) << "\n";
  std::cout << "checkpoint: " << common.out_path << "\n";
  return 0;
}

int cmd_compare(const CommonOpts& common, const std::string& path_a,
                const std::string& path_b) {
  const std::vector<ReportRow> a = parse_report_csv(slurp(path_a));
  const std::vector<ReportRow> b = parse_report_csv(slurp(path_b));
  const Comparison cmp = compare_reports(a, b);
  std::cout << comparison_table(cmp);
  if (!common.out_path.empty()) spill(common.out_path, comparison_csv(cmp));
  return 0;
}

int cmd_verify(const CommonOpts& common, const std::string& path,
               double tolerance) {
  const ToolConfig cfg = config_of(common);
  const std::vector<ReportRow> rows = parse_report_csv(slurp(path));
  const std::vector<VerifyRow> checked =
      verify_rows(rows, cfg.weights, cfg.gen.discharge_rate, tolerance);
  std::cout << "tolerance: " << format_double(tolerance) << "\n";
  std::cout << verify_report(checked);
  for (const VerifyRow& v : checked)
    if (!v.pass) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Electric-fleet routing bench: convert datasets, run solvers, train "
      "the dispatch policy, compare reports"};
  app.require_subcommand(1);

  CommonOpts common;

  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--config", common.config_path,
                    "key=value settings file");
    sub->add_option("--out", common.out_path, "output file");
    if (with_seed)
      sub->add_option("--seed", common.seed, "solver / training seed")
          ->capture_default_str();
  };

  // convert
  std::string conv_input;
  int conv_stations = 3;
  std::vector<int> conv_ids;
  std::vector<double> conv_grid;
  CLI::App* conv = app.add_subcommand(
      "convert", "Rewrite a Solomon benchmark as a discharge-enabled instance");
  conv->add_option("input", conv_input, "Solomon file")->required();
  conv->add_option("--stations", conv_stations,
                   "customers converted to stations")
      ->capture_default_str();
  conv->add_option("--station-ids", conv_ids,
                   "explicit customer numbers to convert (comma separated)")
      ->delimiter(',');
  conv->add_option("--grid-window", conv_grid,
                   "absolute grid peak start,stop (default 0.35,0.65 of "
                   "horizon)")
      ->delimiter(',');
  add_common(conv, false);

  // run
  std::string run_method;
  std::vector<std::string> run_paths;
  std::string run_checkpoint;
  CLI::App* run =
      app.add_subcommand("run", "Solve instances and report d/v/ed/t/cost");
  run->add_option("method", run_method, "exact, ga, or rl")
      ->required()
      ->check(CLI::IsMember({"exact", "ga", "rl"}));
  run->add_option("instances", run_paths, "instance files")->required();
  run->add_option("--checkpoint", run_checkpoint,
                  "trained network (required for rl)");
  add_common(run, true);

  // train
  std::string train_curve;
  CLI::App* tr = app.add_subcommand(
      "train", "Train the dispatch policy on random instances");
  tr->add_option("--curve", train_curve, "learning-curve CSV path");
  add_common(tr, true);

  // compare
  std::string cmp_a, cmp_b;
  CLI::App* cm = app.add_subcommand(
      "compare", "Per-instance cost gap and time ratio of two run reports");
  cm->add_option("report_a", cmp_a, "baseline report CSV")->required();
  cm->add_option("report_b", cmp_b, "candidate report CSV")->required();
  add_common(cm, false);

  // verify-tables
  std::string ver_path;
  double ver_tolerance = 0.02;
  CLI::App* ver = app.add_subcommand(
      "verify-tables", "Recompute each row's cost from its own d/v/ed");
  ver->add_option("table", ver_path, "report-layout CSV")->required();
  ver->add_option("--tolerance", ver_tolerance, "max |residual| to pass")
      ->capture_default_str();
  add_common(ver, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (conv->parsed())
      return cmd_convert(common, conv_input, conv_stations, conv_ids,
                         conv_grid);
    if (run->parsed())
      return cmd_run(common, run_method, run_paths, run_checkpoint);
    if (tr->parsed()) return cmd_train(common, train_curve);
    if (cm->parsed()) return cmd_compare(common, cmp_a, cmp_b);
    if (ver->parsed()) return cmd_verify(common, ver_path, ver_tolerance);
  } catch (const std::exception& e) {
    std::cerr << "evrp: " << e.what() << "\n";
    return 2;
  }
  return 2;  // unreachable: require_subcommand(1)
}
