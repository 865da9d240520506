#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include "ising/analysis.hpp"
#include "ising/engine.hpp"

namespace ising {

// Everything the command line surface is driven by: the sweep plan, the
// evaluation parameters and the directory layout. Parsed from a flat
// `key = value` file ('#' starts a comment line); unknown keys are rejected
// with their line number.
struct CliConfig {
  SweepPlan plan;
  AnalysisConfig analysis;
  std::filesystem::path data_dir = "data";
  std::filesystem::path output_dir = "figures";
};

// Desk-scale defaults: L in {8, 16, 32, 64}, T from 2.21 to 2.33 in steps
// of 0.005 (a window bracketing the critical region), 2e5 measurements per
// point.
CliConfig default_config();

CliConfig parse_config(std::istream& in, const std::string& source_name);
CliConfig load_config(const std::filesystem::path& path);

}  // namespace ising
