#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "json.hpp"

namespace levelflow::cli {

enum class TableFormat { csv, json };

struct RunOptions {
  double tol_scale = 1.0;
  TableFormat format = TableFormat::csv;
};

/// What a subcommand produced: a JSON report, optional tables, and whether every check passed.
struct Outcome {
  nlohmann::ordered_json report;
  /// (file stem, table) pairs written next to the report when --out is given.
  std::vector<std::pair<std::string, std::string>> tables;
  bool pass = true;
};

Outcome run_profile(const ScenarioConfig& config, const RunOptions& options);
Outcome run_convexity(const ScenarioConfig& config, const RunOptions& options);
Outcome run_residuals(const ScenarioConfig& config, const RunOptions& options);
Outcome run_audit(const ScenarioConfig& config, const RunOptions& options);
Outcome run_bic(const ScenarioConfig& config, const RunOptions& options);
Outcome run_counterexample(const ScenarioConfig& config, const RunOptions& options);
/// Built-in scenarios: flat, hyperbolic, sphere-cap, conical; an empty name runs all four.
Outcome run_examples(const std::string& name, const RunOptions& options);

std::vector<std::string> example_names();

/// Full command line; returns the exit code (0 pass, 1 failed check, 2 input error).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace levelflow::cli
