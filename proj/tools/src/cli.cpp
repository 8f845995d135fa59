#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "mcnls/grid.hpp"
#include "mcnls/version.hpp"
#include "scenarios.hpp"

namespace mcnls::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string scenario_list() {
  std::string s = "Scenarios:\n";
  const char* const blurbs[] = {
      "evolve initial data, write diagnostics.csv, check mass conservation",
      "solve for the ground state Q, check residual and Pohozaev identities",
      "evolve and evaluate the interaction Morawetz action and flux (morawetz.csv)",
      "smooth a lattice envelope CSV m times and certify the variation bounds",
      "evaluate the sharp Gagliardo-Nirenberg ratio of Q and optional initial data",
      "tabulate the Morawetz weight family and check its invariants and conditions",
  };
  const auto& names = scenario_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    s += "  " + names[i] + std::string(18 - names[i].size(), ' ') + blurbs[i] + "\n";
  }
  s += "\nExit status: 0 all checks pass, 1 a check failed, 2 usage or config error.";
  return s;
}

json versions() {
  return {{"mcnls", kVersion},
          {"fftw", fft_backend_version()},
          {"compiler", __VERSION__},
          {"cxx_standard", static_cast<long>(__cplusplus)}};
}

struct Manifest {
  json doc = json::object();
  fs::path dir;

  void write(std::ostream& err) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) {
      err << "mcnls: cannot write " << (dir / "manifest.json").string() << "\n";
      return;
    }
    out << doc.dump(2) << '\n';
  }
};

json checks_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const auto& c : checks) {
    json j = {{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}};
    if (!c.relation.empty()) j["relation"] = c.relation;
    if (c.informational) j["informational"] = true;
    arr.push_back(std::move(j));
  }
  return arr;
}

int run_config(const fs::path& config_path, const std::optional<fs::path>& dir_override, std::ostream& out,
               std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Manifest m;
  m.doc["tool"] = "mcnls";
  m.doc["config_path"] = config_path.string();
  m.doc["versions"] = versions();
  m.doc["config"] = nullptr;

  const auto finish = [&](int code, const std::string& status, const std::string& reason) {
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
    m.doc["status"] = status;
    m.doc["exit_code"] = code;
    m.doc["wall_time_s"] = wall.count();
    m.doc["failure_reason"] = reason.empty() ? json(nullptr) : json(reason);
    m.write(err);
    if (!reason.empty()) err << "mcnls: " << reason << "\n";
    out << status << ": manifest written to " << (m.dir / "manifest.json").string() << "\n";
    return code;
  };

  Config cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    m.dir = dir_override.value_or(output_dir_hint(config_path).value_or(OutputSection{}.dir));
    return finish(kUsageError, "config-error", e.what());
  }
  m.dir = dir_override.value_or(cfg.output.dir);
  m.doc["config"] = cfg.echo;
  m.doc["scenario"] = to_string(cfg.scenario);

  std::error_code ec;
  fs::create_directories(m.dir, ec);
  if (ec) return finish(kUsageError, "config-error", "cannot create output directory: " + ec.message());

  ScenarioOutcome result;
  try {
    result = run_scenario(cfg, m.dir);
  } catch (const ConfigError& e) {
    return finish(kUsageError, "config-error", e.what());
  } catch (const std::exception& e) {
    m.doc["checks"] = checks_json(result.checks);
    return finish(kCheckFailure, "error", std::string("scenario aborted: ") + e.what());
  }

  for (const auto& w : result.warnings) err << "mcnls: warning: " << w << "\n";
  m.doc["checks"] = checks_json(result.checks);
  m.doc["results"] = result.results;
  m.doc["warnings"] = result.warnings;
  m.doc["artifacts"] = result.artifacts;
  for (const auto& c : result.checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value;
    out << " (" << (c.relation.empty() ? "bound" : c.relation) << " " << c.bound << ")";
    if (c.informational) out << " [informational]";
    out << "\n";
  }
  if (!result.passed()) return finish(kCheckFailure, "check-failure", "failing checks: " + result.failing_names());
  return finish(kPass, "pass", "");
}

}  // namespace

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mass-critical NLS experiments: simulation, Morawetz diagnostics and envelope smoothing.", "mcnls"};
  app.footer(scenario_list());
  app.set_version_flag("--version", std::string("mcnls ") + kVersion);
  app.require_subcommand(1);

  std::string config;
  std::string output_dir;
  auto* run = app.add_subcommand("run", "Run the scenario described by a JSON config file");
  run->add_option("config", config, "Path to the JSON config")->required();
  run->add_option("--output-dir", output_dir, "Override output.dir from the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "mcnls: " << e.what() << "\nRun 'mcnls --help' for usage.\n";
    return kUsageError;
  }

  std::optional<fs::path> dir;
  if (!output_dir.empty()) dir = fs::path(output_dir);
  return run_config(config, dir, out, err);
}

}  // namespace mcnls::cli
