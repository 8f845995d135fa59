#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace mcnls::cli {

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  /// "<=", ">=" or empty when the check combines several comparisons.
  std::string relation = "<=";
  /// Reported in the manifest without affecting the exit status.
  bool informational = false;
};

struct ScenarioOutcome {
  std::vector<Check> checks;
  nlohmann::json results = nlohmann::json::object();
  std::vector<std::string> artifacts;
  std::vector<std::string> warnings;

  bool passed() const;
  /// Comma-separated names of failing gated checks.
  std::string failing_names() const;
};

/// Runs one scenario, writing its artifacts under `out_dir` (which must
/// exist). Numerical failures surface as exceptions.
ScenarioOutcome run_scenario(const Config& cfg, const std::filesystem::path& out_dir);

}  // namespace mcnls::cli
