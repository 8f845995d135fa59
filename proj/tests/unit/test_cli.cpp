#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "mcnls/envelope.hpp"
#include "mcnls/ground_state.hpp"
#include "mcnls/snapshot.hpp"
#include "mcnls/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mcnls");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = mcnls::cli::run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mcnls_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const json& doc) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const json* find_check(const json& manifest, const std::string& name) {
  for (const auto& c : manifest.at("checks")) {
    if (c.at("name") == name) return &c;
  }
  return nullptr;
}

json soliton_config() {
  return {{"scenario", "simulate"},
          {"grid", {{"d", 1}, {"n", 1024}, {"L", 20.0}}},
          {"evolution", {{"mu", -1}, {"dt", 1e-3}, {"t_end", 1.0}, {"stride", 100}}},
          {"initial", {{"kind", "soliton"}}}};
}

const fs::path kConfigDir = MCNLS_CONFIG_DIR;

}  // namespace

TEST_CASE("help lists the six scenarios and version is one line") {
  const Run help = run_cli({"--help"});
  CHECK(help.code == 0);
  for (const char* s : {"simulate", "ground-state", "morawetz", "smooth-envelope", "gn-check", "weight-check"}) {
    CHECK_MESSAGE(help.out.find(s) != std::string::npos, s);
  }
  const Run version = run_cli({"--version"});
  CHECK(version.code == 0);
  CHECK(version.out == std::string("mcnls ") + mcnls::kVersion + "\n");
  CHECK(run_cli({"--version"}).out == version.out);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"run"}).code == 2);
  CHECK(run_cli({"run", "a.json", "--bogus"}).code == 2);
}

TEST_CASE("unknown config keys are rejected and the manifest records the reason") {
  const fs::path dir = scratch("unknown_key");
  json doc = soliton_config();
  doc["evolution"]["tend"] = 1.0;
  const fs::path out = dir / "out";
  const Run r = run_cli({"run", write_config(dir, doc).string(), "--output-dir", out.string()});
  CHECK(r.code == 2);
  const json m = read_json(out / "manifest.json");
  CHECK(m.at("status") == "config-error");
  CHECK(m.at("exit_code") == 2);
  CHECK(m.at("failure_reason").get<std::string>().find("evolution.tend") != std::string::npos);

  for (const auto& [path, value] : std::vector<std::pair<std::string, json>>{
           {"/colour", 1}, {"/grid/dim", 1}, {"/initial/amplitude", 2.0}, {"/output/emit", true}}) {
    json bad = soliton_config();
    bad[json::json_pointer(path)] = value;
    CHECK_MESSAGE(run_cli({"run", write_config(dir, bad).string(), "--output-dir", out.string()}).code == 2, path);
  }
}

TEST_CASE("invalid values and files are config errors") {
  const fs::path dir = scratch("invalid");
  const fs::path out = dir / "out";
  const auto code = [&](const json& doc) {
    return run_cli({"run", write_config(dir, doc).string(), "--output-dir", out.string()}).code;
  };
  json doc = soliton_config();
  doc["scenario"] = "simulation";
  CHECK(code(doc) == 2);
  doc = soliton_config();
  doc["grid"]["n"] = 1000;
  CHECK(code(doc) == 2);
  doc = soliton_config();
  doc["evolution"]["mu"] = 0.5;
  CHECK(code(doc) == 2);
  doc = soliton_config();
  doc["evolution"]["stride"] = 2.5;
  CHECK(code(doc) == 2);
  doc = soliton_config();
  doc.erase("initial");
  CHECK(code(doc) == 2);

  std::ofstream(dir / "broken.json") << "{\"scenario\": ";
  CHECK(run_cli({"run", (dir / "broken.json").string(), "--output-dir", out.string()}).code == 2);
  CHECK(read_json(out / "manifest.json").at("status") == "config-error");
  CHECK(run_cli({"run", (dir / "missing.json").string(), "--output-dir", out.string()}).code == 2);
}

TEST_CASE("gn-check on the solver ground state reports ratio 1") {
  const fs::path dir = scratch("gn");
  const json doc = {{"scenario", "gn-check"}, {"grid", {{"d", 1}, {"n", 2048}, {"L", 24.0}}}};
  const Run r = run_cli({"run", write_config(dir, doc).string(), "--output-dir", (dir / "out").string()});
  CHECK(r.code == 0);
  const json m = read_json(dir / "out" / "manifest.json");
  CHECK(m.at("status") == "pass");
  CHECK(m.at("failure_reason").is_null());
  CHECK(m.at("config") == doc);
  CHECK(m.at("versions").at("mcnls") == mcnls::kVersion);
  CHECK(m.at("wall_time_s").get<double>() >= 0.0);
  CHECK(std::abs(m.at("results").at("ratio").get<double>() - 1.0) < 1e-8);
}

TEST_CASE("simulate soliton conserves mass and writes diagnostics CSV") {
  const fs::path dir = scratch("soliton");
  const fs::path out = dir / "out";
  const fs::path cfg = write_config(dir, soliton_config());
  REQUIRE(run_cli({"run", cfg.string(), "--output-dir", out.string()}).code == 0);

  const json m = read_json(out / "manifest.json");
  const json* drift = find_check(m, "mass_drift");
  REQUIRE(drift != nullptr);
  CHECK(drift->at("value").get<double>() <= 1e-10);
  CHECK(drift->at("pass") == true);

  const std::string csv = slurp(out / "diagnostics.csv");
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.rfind("t,mass,energy,variance,kinetic,potential,momentum_x,scat_accum,N_est,xi_x,x_x,flags\n", 0) ==
        0);
  // 1000 steps recorded every 100 plus the initial state.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
  const auto second = csv.find('\n') + 1;
  const std::string row = csv.substr(second, csv.find('\n', second) - second);
  CHECK(row.rfind("0,", 0) == 0);
  // mass column carries 17 significant digits
  const auto m0 = row.substr(2, row.find(',', 2) - 2);
  CHECK(m0.find('.') != std::string::npos);
  CHECK(m0.size() >= 17);

  // determinism: a second run writes byte-identical CSV
  const fs::path out2 = dir / "out2";
  REQUIRE(run_cli({"run", cfg.string(), "--output-dir", out2.string()}).code == 0);
  CHECK(slurp(out2 / "diagnostics.csv") == csv);
}

TEST_CASE("smooth-envelope on the bundled sawtooth certifies m = 3") {
  const fs::path dir = scratch("envelope");
  const Run r = run_cli({"run", (kConfigDir / "smooth_envelope.json").string(), "--output-dir", dir.string()});
  CHECK(r.code == 0);
  const json m = read_json(dir / "manifest.json");
  const auto oracle = mcnls::certify_ratio(mcnls::load_envelope_csv((kConfigDir / "sawtooth.csv").string()), 3);
  REQUIRE(oracle.bound_ok());
  CHECK(find_check(m, "envelope_variation")->at("value").get<double>() == oracle.variation_m);
  CHECK(find_check(m, "envelope_heights")->at("value").get<double>() == oracle.small_interval_sum);
  CHECK(m.at("results").at("peak_sum_m").get<double>() == oracle.peak_sum_m);

  const auto smoothed = mcnls::load_envelope_csv((dir / "envelope_smoothed.csv").string());
  CHECK(smoothed == mcnls::smooth(mcnls::load_envelope_csv((kConfigDir / "sawtooth.csv").string()), 3));
}

TEST_CASE("envelope J0 disagreeing with the input header is a config error") {
  const fs::path dir = scratch("envelope_j0");
  const json doc = {{"scenario", "smooth-envelope"},
                    {"envelope", {{"J0", 3.0}, {"m", 2}, {"input", (kConfigDir / "sawtooth.csv").string()}}}};
  CHECK(run_cli({"run", write_config(dir, doc).string(), "--output-dir", dir.string()}).code == 2);
}

TEST_CASE("a failing check exits 1 and names the check") {
  const fs::path dir = scratch("failing");
  const Run r = run_cli({"run", (kConfigDir / "weight_check_2d.json").string(), "--output-dir", dir.string()});
  CHECK(r.code == 1);
  const json m = read_json(dir / "manifest.json");
  CHECK(m.at("status") == "check-failure");
  CHECK(m.at("failure_reason").get<std::string>().find("invariant_plateau_overlap") != std::string::npos);
  CHECK(r.err.find("invariant_plateau_overlap") != std::string::npos);
}

TEST_CASE("data rejected at run time exits 1 with the reason") {
  const fs::path dir = scratch("wide");
  json doc = soliton_config();
  doc["initial"] = {{"kind", "gaussian"}, {"width", 15.0}};
  const Run r = run_cli({"run", write_config(dir, doc).string(), "--output-dir", dir.string()});
  CHECK(r.code == 1);
  const json m = read_json(dir / "manifest.json");
  CHECK(m.at("status") == "error");
  CHECK(!m.at("failure_reason").is_null());
}

TEST_CASE("ground-state snapshots feed the snapshot initial kind") {
  const fs::path dir = scratch("snapshots");
  const json grid = {{"d", 1}, {"n", 1024}, {"L", 20.0}};
  const json gs = {{"scenario", "ground-state"}, {"grid", grid}, {"output", {{"emit_snapshots", true}}}};
  REQUIRE(run_cli({"run", write_config(dir, gs).string(), "--output-dir", (dir / "gs").string()}).code == 0);
  const json sidecar = read_json(dir / "gs" / "ground_state.json");
  const auto q = mcnls::solve_petviashvili(mcnls::make_grid(1, 1024, 20.0), 1e-12, 1000);
  CHECK(sidecar.at("mass_sq").get<double>() == doctest::Approx(q.mass_sq).epsilon(1e-12));
  CHECK(sidecar.contains("gn_constant"));
  CHECK(sidecar.contains("residual"));

  // snapshot path is resolved against the config's directory
  const json sim = {{"scenario", "simulate"},
                    {"grid", grid},
                    {"evolution", {{"mu", -1}, {"dt", 1e-3}, {"t_end", 0.1}, {"stride", 50}}},
                    {"initial", {{"kind", "snapshot"}, {"path", "gs/ground_state.mcnls"}}},
                    {"output", {{"emit_snapshots", true}}}};
  REQUIRE(run_cli({"run", write_config(dir, sim).string(), "--output-dir", (dir / "sim").string()}).code == 0);
  const json index = read_json(dir / "sim" / "snapshots" / "index.json");
  CHECK(index.size() == 3);
  CHECK(index.back().at("t").get<double>() == doctest::Approx(0.1));
  const auto first = mcnls::load_snapshot((dir / "sim" / "snapshots" / "state_000000.mcnls").string());
  for (std::size_t i = 0; i < first.size(); ++i) REQUIRE(first[i] == q.field[i]);

  json wrong = sim;
  wrong["grid"]["n"] = 512;
  CHECK(run_cli({"run", write_config(dir, wrong).string(), "--output-dir", (dir / "bad").string()}).code == 2);
}

TEST_CASE("morawetz scenario writes one CSV row per record") {
  const fs::path dir = scratch("morawetz");
  const json doc = {{"scenario", "morawetz"},
                    {"grid", {{"d", 1}, {"n", 512}, {"L", 30.0}}},
                    {"evolution", {{"mu", 1}, {"dt", 1e-3}, {"t_end", 0.2}, {"stride", 50}}},
                    {"initial", {{"kind", "gaussian"}, {"amplitude", 1.0}, {"width", 1.5}, {"velocity", 0.5}}},
                    {"weights", {{"M", 8}, {"R", 4}}}};
  REQUIRE(run_cli({"run", write_config(dir, doc).string(), "--output-dir", dir.string()}).code == 0);
  const std::string csv = slurp(dir / "morawetz.csv");
  CHECK(csv.rfind("t,action,flux,coercive,tail,curvature,envelope_drift\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(find_check(read_json(dir / "manifest.json"), "flux_decomposition")->at("pass") == true);
}
