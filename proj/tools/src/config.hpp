#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcnls/grid.hpp"

namespace mcnls::cli {

/// Malformed or inconsistent configuration (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { kSimulate, kGroundState, kMorawetz, kSmoothEnvelope, kGnCheck, kWeightCheck };

const std::vector<std::string>& scenario_names();
std::string to_string(Scenario s);

struct GridConfig {
  int d = 1;
  int n = 1024;
  double L = 20.0;
};

struct EvolutionSection {
  double mu = -1.0;
  double dt = 1e-3;
  double t_end = 1.0;
  int stride = 10;
  bool adaptive = false;
  bool dealias = true;
};

struct InitialSection {
  std::string kind = "gaussian";
  double amplitude = 1.0;
  double width = 1.0;
  Point center{};
  Point velocity{};
  double factor = 1.0;   // soliton, boosted-soliton
  double scale = 1.0;    // soliton, boosted-soliton
  Point xi{};            // boosted-soliton
  double t0 = -1.0;      // pseudoconformal
  std::filesystem::path path;  // snapshot
};

struct WeightsSection {
  double M = 8.0;
  double R = 4.0;
  double Ntilde = 1.0;
  double Ntilde_prime = 0.0;
};

struct EnvelopeSection {
  double J0 = 2.0;
  int m = 1;
  std::optional<std::filesystem::path> input;
};

struct OutputSection {
  std::filesystem::path dir = "mcnls-out";
  bool emit_snapshots = false;
};

struct Config {
  Scenario scenario = Scenario::kSimulate;
  GridConfig grid;
  EvolutionSection evolution;
  InitialSection initial;
  WeightsSection weights;
  EnvelopeSection envelope;
  OutputSection output;
  bool has_initial = false;
  bool has_envelope_input = false;
  nlohmann::json echo;
};

/// Parses and validates a configuration document. Relative input paths
/// (envelope.input, initial.path) are resolved against `base_dir`. Throws
/// ConfigError naming the offending key.
Config parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

Config load_config(const std::filesystem::path& path);

/// Best-effort extraction of output.dir from a document that failed to parse.
std::optional<std::filesystem::path> output_dir_hint(const std::filesystem::path& path);

}  // namespace mcnls::cli
