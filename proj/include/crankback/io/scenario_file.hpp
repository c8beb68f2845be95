#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <yaml-cpp/yaml.h>

#include "crankback/errors.hpp"
#include "crankback/scenario.hpp"
#include "crankback/simulation.hpp"

namespace crankback::io {

inline constexpr int kSchemaVersion = 1;

// Scenario files are YAML mappings:
//
//   schema_version: 1      # optional
//   n: 6
//   hop_mean: 3
//   hop_var: 1
//   deadline: 16
//   p_tr: 0.9
//   hop_distance: 3        # optional, defaults to hop_mean
//   sim:                   # optional
//     trials: 1000000
//     seed: 7
//     policy: quantile     # or rest_time
//     t_tr: 12             # rest_time only
//
// Unknown keys are errors.

struct SimFields {
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<double> t_tr;
};

/// Scenario values as written, before defaults and validation. `lines` maps
/// each key to its 1-based source line.
struct ScenarioFields {
  std::optional<int> n;
  std::optional<double> hop_mean;
  std::optional<double> hop_var;
  std::optional<double> deadline;
  std::optional<double> p_tr;
  std::optional<double> hop_distance;
  std::optional<SimFields> sim;
  std::map<std::string, int> lines;

  int line_of(const std::string& key) const {
    auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  }
};

namespace detail {

inline int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

template <class T>
T scalar_as(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ParseError(key + ": expected a scalar value", line_of(node));
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError(key + ": cannot parse '" + node.Scalar() + "'", line_of(node));
  }
}

inline SimFields parse_sim(const YAML::Node& node, ScenarioFields& fields) {
  if (!node.IsMap()) throw ParseError("sim: expected a mapping", line_of(node));
  SimFields sim;
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    const YAML::Node& value = kv.second;
    fields.lines["sim." + key] = line_of(kv.first);
    if (key == "trials") {
      sim.trials = scalar_as<std::uint64_t>(value, "sim.trials");
    } else if (key == "seed") {
      sim.seed = scalar_as<std::uint64_t>(value, "sim.seed");
    } else if (key == "policy") {
      sim.policy = scalar_as<std::string>(value, "sim.policy");
    } else if (key == "t_tr") {
      sim.t_tr = scalar_as<double>(value, "sim.t_tr");
    } else {
      throw ParseError("unknown key 'sim." + key + "'", line_of(kv.first));
    }
  }
  return sim;
}

}  // namespace detail

namespace detail {

inline ScenarioFields parse_document(const YAML::Node& root) {
  if (!root.IsMap()) throw ParseError("scenario document must be a mapping", 1);

  ScenarioFields fields;
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const YAML::Node& value = kv.second;
    fields.lines[key] = line_of(kv.first);
    if (key == "schema_version") {
      const int version = scalar_as<int>(value, key);
      if (version != kSchemaVersion) {
        throw ParseError("unsupported schema_version " + std::to_string(version),
                         line_of(value));
      }
    } else if (key == "n") {
      fields.n = scalar_as<int>(value, key);
    } else if (key == "hop_mean") {
      fields.hop_mean = scalar_as<double>(value, key);
    } else if (key == "hop_var") {
      fields.hop_var = scalar_as<double>(value, key);
    } else if (key == "deadline") {
      fields.deadline = scalar_as<double>(value, key);
    } else if (key == "p_tr") {
      fields.p_tr = scalar_as<double>(value, key);
    } else if (key == "hop_distance") {
      fields.hop_distance = scalar_as<double>(value, key);
    } else if (key == "sim") {
      fields.sim = parse_sim(value, fields);
    } else {
      throw ParseError("unknown key '" + key + "'", line_of(kv.first));
    }
  }
  return fields;
}

}  // namespace detail

inline ScenarioFields parse_scenario_text(const std::string& text) {
  try {
    return detail::parse_document(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    // Anything yaml-cpp rejects that the field checks did not catch first,
    // e.g. non-scalar keys.
    throw ParseError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
  }
}

inline ScenarioFields read_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

/// Applies defaults (hop_distance := hop_mean) and validates. Errors carry the
/// line of the offending key when it came from a file.
inline Scenario build_scenario(const ScenarioFields& f) {
  auto require = [&](const auto& opt, const char* key) {
    if (!opt) throw ValidationError(key, "missing required key");
    return *opt;
  };
  Scenario s;
  s.n = require(f.n, "n");
  s.hop_mean = require(f.hop_mean, "hop_mean");
  s.hop_var = require(f.hop_var, "hop_var");
  s.deadline = require(f.deadline, "deadline");
  s.p_tr = require(f.p_tr, "p_tr");
  s.hop_distance = f.hop_distance.value_or(s.hop_mean);
  try {
    s.validate();
  } catch (const ValidationError& e) {
    const std::string key = e.field() == "hop_distance" && !f.hop_distance ? "hop_mean" : e.field();
    throw ValidationError(e.field(), e.reason(), f.line_of(key));
  }
  return s;
}

/// Defaults: trials 10^6, seed 0, quantile policy.
inline SimConfig build_sim_config(const ScenarioFields& f) {
  SimConfig cfg;
  if (!f.sim) return cfg;
  const SimFields& sim = *f.sim;
  cfg.trials = sim.trials.value_or(kDefaultTrials);
  cfg.seed = sim.seed.value_or(0);
  if (cfg.trials < 1) throw ValidationError("sim.trials", "must be >= 1", f.line_of("sim.trials"));
  const std::string policy = sim.policy.value_or("quantile");
  if (policy == "quantile") {
    if (sim.t_tr) {
      throw ValidationError("sim.t_tr", "only valid with policy rest_time", f.line_of("sim.t_tr"));
    }
    cfg.policy = QuantilePolicy{};
  } else if (policy == "rest_time") {
    if (!sim.t_tr) {
      throw ValidationError("sim.t_tr", "required for policy rest_time", f.line_of("sim.policy"));
    }
    if (!(*sim.t_tr > 0.0) || (f.deadline && !(*sim.t_tr < *f.deadline))) {
      throw ValidationError("sim.t_tr", "must satisfy 0 < t_tr < deadline", f.line_of("sim.t_tr"));
    }
    cfg.policy = RestTimePolicy{*sim.t_tr};
  } else {
    throw ValidationError("sim.policy", "must be quantile or rest_time", f.line_of("sim.policy"));
  }
  return cfg;
}

struct LoadedScenario {
  Scenario scenario;
  SimConfig sim;
  bool has_sim = false;
};

inline LoadedScenario load_scenario(const std::filesystem::path& path) {
  const ScenarioFields fields = read_scenario_file(path);
  return {build_scenario(fields), build_sim_config(fields), fields.sim.has_value()};
}

inline std::string to_scenario_text(const Scenario& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "schema_version" << YAML::Value << kSchemaVersion;
  out << YAML::Key << "n" << YAML::Value << s.n;
  out << YAML::Key << "hop_mean" << YAML::Value << s.hop_mean;
  out << YAML::Key << "hop_var" << YAML::Value << s.hop_var;
  out << YAML::Key << "deadline" << YAML::Value << s.deadline;
  out << YAML::Key << "p_tr" << YAML::Value << s.p_tr;
  out << YAML::Key << "hop_distance" << YAML::Value << s.hop_distance;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace crankback::io
