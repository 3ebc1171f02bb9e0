#pragma once

#include <string>

#include "evrp/exact.hpp"
#include "evrp/ga.hpp"
#include "evrp/generate.hpp"
#include "evrp/instance.hpp"
#include "evrp/rl.hpp"

namespace evrp {

// Tool settings parsed from a line-oriented key=value file; '#' starts a
// comment. Keys are dotted by section: gen.*, ga.*, rl.*, exact.*,
// weights.* (see config.cpp for the full list). Seeds come from the
// command line, never from the file, so one run has one seed source.
struct ToolConfig {
  GenParams gen;
  GaConfig ga;
  RlTrainConfig rl;  // rl.gen mirrors gen after parsing
  SearchLimits exact;
  CostWeights weights;
};

// Throws std::invalid_argument naming the line on unknown keys, missing
// '=', or unparseable values.
ToolConfig parse_config(const std::string& text);

// File convenience wrapper; std::runtime_error on I/O failure.
ToolConfig load_config_file(const std::string& path);

}  // namespace evrp
