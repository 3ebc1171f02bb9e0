#include "evrp/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace evrp {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::invalid_argument("config: line " + std::to_string(line) + ": " +
                              what);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, int line) {
  const char* s = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(s, &end);
  if (end == s || *end != '\0') fail(line, "expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& v, int line) {
  const char* s = v.c_str();
  char* end = nullptr;
  const long long x = std::strtoll(s, &end, 10);
  if (end == s || *end != '\0')
    fail(line, "expected an integer, got '" + v + "'");
  return x;
}

void apply(ToolConfig& cfg, const std::string& key, const std::string& val,
           int line) {
  auto d = [&] { return to_double(val, line); };
  auto i = [&] { return int(to_int(val, line)); };

  if (key == "gen.n_customers") cfg.gen.n_customers = i();
  else if (key == "gen.n_stations") cfg.gen.n_stations = i();
  else if (key == "gen.n_vehicles") cfg.gen.n_vehicles = i();
  else if (key == "gen.coord_min") cfg.gen.coord_range[0] = d();
  else if (key == "gen.coord_max") cfg.gen.coord_range[1] = d();
  else if (key == "gen.depot_min") cfg.gen.depot_range[0] = d();
  else if (key == "gen.depot_max") cfg.gen.depot_range[1] = d();
  else if (key == "gen.demand_rate") cfg.gen.demand_scale = d();
  else if (key == "gen.capacity") cfg.gen.capacity = d();
  else if (key == "gen.battery") cfg.gen.battery = d();
  else if (key == "gen.speed") cfg.gen.speed = d();
  else if (key == "gen.consumption_rate") cfg.gen.consumption_rate = d();
  else if (key == "gen.discharge_rate") cfg.gen.discharge_rate = d();
  else if (key == "gen.window_open_min") cfg.gen.window_open_range[0] = d();
  else if (key == "gen.window_open_max") cfg.gen.window_open_range[1] = d();
  else if (key == "gen.width_mean") cfg.gen.width_mean = d();
  else if (key == "gen.width_std") cfg.gen.width_std = d();
  else if (key == "gen.width_min") cfg.gen.width_min = d();
  else if (key == "gen.grid_start_frac") cfg.gen.grid_start_frac = d();
  else if (key == "gen.grid_stop_frac") cfg.gen.grid_stop_frac = d();
  else if (key == "ga.population_size") cfg.ga.population_size = i();
  else if (key == "ga.elite_fraction") cfg.ga.elite_fraction = d();
  else if (key == "ga.mutation_prob") cfg.ga.mutation_prob = d();
  else if (key == "ga.stagnation_limit") cfg.ga.stagnation_limit = i();
  else if (key == "ga.generation_cap") cfg.ga.generation_cap = i();
  else if (key == "rl.episodes") cfg.rl.episodes = i();
  else if (key == "rl.batch_size") cfg.rl.batch_size = i();
  else if (key == "rl.buffer_capacity")
    cfg.rl.buffer_capacity = std::size_t(to_int(val, line));
  else if (key == "rl.exploration_episodes") cfg.rl.exploration_episodes = i();
  else if (key == "exact.max_nodes_expanded")
    cfg.exact.max_nodes_expanded = std::uint64_t(to_int(val, line));
  else if (key == "exact.wall_time_budget") cfg.exact.wall_time_budget = d();
  else if (key == "weights.per_distance") cfg.weights.per_distance = d();
  else if (key == "weights.per_vehicle") cfg.weights.per_vehicle = d();
  else if (key == "weights.per_discharge_time")
    cfg.weights.per_discharge_time = d();
  else fail(line, "unknown key '" + key + "'");
}

}  // namespace

ToolConfig parse_config(const std::string& text) {
  ToolConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const std::size_t hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    if (val.empty()) fail(lineno, "empty value for '" + key + "'");
    apply(cfg, key, val, lineno);
  }
  cfg.rl.gen = cfg.gen;
  return cfg;
}

ToolConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace evrp
