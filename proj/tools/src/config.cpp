#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace mcnls::cli {
namespace {

using nlohmann::json;

const std::vector<std::pair<Scenario, std::string>>& scenario_table() {
  static const std::vector<std::pair<Scenario, std::string>> table = {
      {Scenario::kSimulate, "simulate"},
      {Scenario::kGroundState, "ground-state"},
      {Scenario::kMorawetz, "morawetz"},
      {Scenario::kSmoothEnvelope, "smooth-envelope"},
      {Scenario::kGnCheck, "gn-check"},
      {Scenario::kWeightCheck, "weight-check"},
  };
  return table;
}

void allow_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + where + "." + key + "'");
  }
}

double number(const json& obj, const std::string& where, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int integer(const json& obj, const std::string& where, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

bool boolean(const json& obj, const std::string& where, const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(where + "." + key + ": expected true or false");
  return v.get<bool>();
}

std::string text(const json& obj, const std::string& where, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

Point point(const json& obj, const std::string& where, const std::string& key, int d) {
  if (!obj.contains(key)) return {};
  const auto& v = obj.at(key);
  if (v.is_number() && d == 1) return {v.get<double>(), 0.0};
  if (!v.is_array() || static_cast<int>(v.size()) != d) {
    throw ConfigError(where + "." + key + ": expected an array of " + std::to_string(d) + " numbers");
  }
  Point p{};
  for (int j = 0; j < d; ++j) {
    if (!v[j].is_number()) throw ConfigError(where + "." + key + ": expected numbers");
    p[j] = v[j].get<double>();
  }
  return p;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [s, name] : scenario_table()) out.push_back(name);
    return out;
  }();
  return names;
}

std::string to_string(Scenario s) {
  for (const auto& [value, name] : scenario_table()) {
    if (value == s) return name;
  }
  return "unknown";
}

Config parse_config(const json& doc, const std::filesystem::path& base_dir) {
  allow_keys(doc, "config", {"scenario", "grid", "evolution", "initial", "weights", "envelope", "output"});
  Config cfg;
  cfg.echo = doc;

  if (!doc.contains("scenario")) throw ConfigError("missing key 'scenario'");
  const std::string name = text(doc, "config", "scenario");
  const auto& table = scenario_table();
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.second == name; });
  if (it == table.end()) throw ConfigError("unknown scenario '" + name + "'");
  cfg.scenario = it->first;

  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    allow_keys(g, "grid", {"d", "n", "L"});
    cfg.grid.d = integer(g, "grid", "d", cfg.grid.d);
    cfg.grid.n = integer(g, "grid", "n", cfg.grid.n);
    cfg.grid.L = number(g, "grid", "L", cfg.grid.L);
  }
  try {
    (void)make_grid(cfg.grid.d, cfg.grid.n, cfg.grid.L);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  const int d = cfg.grid.d;

  if (doc.contains("evolution")) {
    const auto& e = doc.at("evolution");
    allow_keys(e, "evolution", {"mu", "dt", "t_end", "stride", "adaptive", "dealias"});
    auto& ev = cfg.evolution;
    ev.mu = number(e, "evolution", "mu", ev.mu);
    ev.dt = number(e, "evolution", "dt", ev.dt);
    ev.t_end = number(e, "evolution", "t_end", ev.t_end);
    ev.stride = integer(e, "evolution", "stride", ev.stride);
    ev.adaptive = boolean(e, "evolution", "adaptive", ev.adaptive);
    ev.dealias = boolean(e, "evolution", "dealias", ev.dealias);
    if (ev.mu != 1.0 && ev.mu != -1.0) throw ConfigError("evolution.mu: must be +1 or -1");
    if (!(ev.dt > 0.0)) throw ConfigError("evolution.dt: must be positive");
    if (!(ev.t_end >= 0.0)) throw ConfigError("evolution.t_end: must be nonnegative");
    if (ev.stride < 1) throw ConfigError("evolution.stride: must be at least 1");
  }

  if (doc.contains("initial")) {
    cfg.has_initial = true;
    const auto& ini = doc.at("initial");
    if (!ini.is_object() || !ini.contains("kind")) throw ConfigError("initial: missing key 'kind'");
    auto& in = cfg.initial;
    in.kind = text(ini, "initial", "kind");
    if (in.kind == "gaussian") {
      allow_keys(ini, "initial", {"kind", "amplitude", "width", "center", "velocity"});
      in.amplitude = number(ini, "initial", "amplitude", in.amplitude);
      in.width = number(ini, "initial", "width", in.width);
      in.center = point(ini, "initial", "center", d);
      in.velocity = point(ini, "initial", "velocity", d);
      if (!(in.width > 0.0)) throw ConfigError("initial.width: must be positive");
    } else if (in.kind == "soliton" || in.kind == "boosted-soliton") {
      if (in.kind == "soliton") {
        allow_keys(ini, "initial", {"kind", "factor", "scale"});
      } else {
        allow_keys(ini, "initial", {"kind", "factor", "scale", "xi"});
        in.xi = point(ini, "initial", "xi", d);
      }
      in.factor = number(ini, "initial", "factor", in.factor);
      in.scale = number(ini, "initial", "scale", in.scale);
      if (!(in.scale > 0.0)) throw ConfigError("initial.scale: must be positive");
    } else if (in.kind == "pseudoconformal") {
      allow_keys(ini, "initial", {"kind", "t0"});
      in.t0 = number(ini, "initial", "t0", in.t0);
      if (!(in.t0 < 0.0)) throw ConfigError("initial.t0: must be negative");
    } else if (in.kind == "snapshot") {
      allow_keys(ini, "initial", {"kind", "path"});
      if (!ini.contains("path")) throw ConfigError("initial.path: required for kind 'snapshot'");
      in.path = resolve(base_dir, text(ini, "initial", "path"));
    } else {
      throw ConfigError("initial.kind: unknown kind '" + in.kind + "'");
    }
  }

  if (doc.contains("weights")) {
    const auto& w = doc.at("weights");
    allow_keys(w, "weights", {"M", "R", "Ntilde", "Ntilde_prime"});
    cfg.weights.M = number(w, "weights", "M", cfg.weights.M);
    cfg.weights.R = number(w, "weights", "R", cfg.weights.R);
    cfg.weights.Ntilde = number(w, "weights", "Ntilde", cfg.weights.Ntilde);
    cfg.weights.Ntilde_prime = number(w, "weights", "Ntilde_prime", cfg.weights.Ntilde_prime);
    if (!(cfg.weights.M >= 4.0)) throw ConfigError("weights.M: must be at least 4");
    if (!(cfg.weights.R > 0.0)) throw ConfigError("weights.R: must be positive");
    if (!(cfg.weights.Ntilde > 0.0)) throw ConfigError("weights.Ntilde: must be positive");
  }

  if (doc.contains("envelope")) {
    const auto& e = doc.at("envelope");
    allow_keys(e, "envelope", {"J0", "m", "input"});
    cfg.envelope.J0 = number(e, "envelope", "J0", cfg.envelope.J0);
    cfg.envelope.m = integer(e, "envelope", "m", cfg.envelope.m);
    if (e.contains("input")) {
      cfg.envelope.input = resolve(base_dir, text(e, "envelope", "input"));
      cfg.has_envelope_input = true;
    }
    if (!(cfg.envelope.J0 > 1.0)) throw ConfigError("envelope.J0: must exceed 1");
    if (cfg.envelope.m < 0) throw ConfigError("envelope.m: must be nonnegative");
  }

  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    allow_keys(o, "output", {"dir", "emit_snapshots"});
    if (o.contains("dir")) cfg.output.dir = text(o, "output", "dir");
    cfg.output.emit_snapshots = boolean(o, "output", "emit_snapshots", false);
  }

  switch (cfg.scenario) {
    case Scenario::kSimulate:
    case Scenario::kMorawetz:
      if (!cfg.has_initial) throw ConfigError("scenario '" + name + "' requires an 'initial' section");
      break;
    case Scenario::kSmoothEnvelope:
      if (!cfg.has_envelope_input) throw ConfigError("scenario 'smooth-envelope' requires envelope.input");
      break;
    default:
      break;
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc, path.parent_path());
}

std::optional<std::filesystem::path> output_dir_hint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  const auto it = doc.find("output");
  if (it == doc.end() || !it->is_object()) return std::nullopt;
  const auto dir = it->find("dir");
  if (dir == it->end() || !dir->is_string()) return std::nullopt;
  return std::filesystem::path(dir->get<std::string>());
}

}  // namespace mcnls::cli
