#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "lceopt/solver.hpp"

namespace lceopt::bench {

using nlohmann::json;

// Configuration problem with the offending field spelled out, so a bad file
// is diagnosable without reading source code.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config error at '" + field + "': " + message),
        field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class OutputFormat { Csv, Json };

inline std::string to_string(OutputFormat format) {
  return format == OutputFormat::Csv ? "csv" : "json";
}

struct ScenarioSelection {
  std::string id = "conttag";
  json overrides = json::object();
};

struct RunSettings {
  int episodes = 200;
  std::uint64_t base_seed = 1;
  int workers = 1;
  std::string output;  // empty: no per-episode persistence
  OutputFormat format = OutputFormat::Csv;
};

struct RunConfig {
  ScenarioSelection scenario;
  SolverConfig solver;
  RunSettings run;
  json tune = json::object();  // consumed only by the tune command

  void validate() const {
    if (run.episodes < 1) throw ConfigError("run.episodes", "must be >= 1");
    if (run.workers < 1) throw ConfigError("run.workers", "must be >= 1");
    try {
      solver.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("solver", e.what());
    }
  }
};

namespace detail {

inline void require_object(const json& value, const std::string& path) {
  if (!value.is_object()) throw ConfigError(path, "expected an object");
}

inline void reject_unknown_keys(const json& section, const std::string& path,
                                std::initializer_list<const char*> known) {
  for (const auto& item : section.items()) {
    bool found = false;
    for (const char* key : known)
      if (item.key() == key) { found = true; break; }
    if (!found) throw ConfigError(path + "." + item.key(), "unknown field");
  }
}

inline double number_field(const json& section, const std::string& path, const char* key,
                           double fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
  return v.get<double>();
}

inline std::int64_t integer_field(const json& section, const std::string& path, const char* key,
                                  std::int64_t fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

inline std::string string_field(const json& section, const std::string& path, const char* key,
                                const std::string& fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section.at(key);
  if (!v.is_string()) throw ConfigError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

inline Budget parse_budget(const json& value, const std::string& path) {
  require_object(value, path);
  reject_unknown_keys(value, path, {"cpu_seconds", "iterations"});
  const bool has_seconds = value.contains("cpu_seconds");
  const bool has_iterations = value.contains("iterations");
  if (has_seconds == has_iterations)
    throw ConfigError(path, "exactly one of 'cpu_seconds' or 'iterations' is required");
  try {
    if (has_seconds) {
      const json& v = value.at("cpu_seconds");
      if (!v.is_number()) throw ConfigError(path + ".cpu_seconds", "expected a number");
      return Budget::seconds(v.get<double>());
    }
    const json& v = value.at("iterations");
    if (!v.is_number_integer()) throw ConfigError(path + ".iterations", "expected an integer");
    return Budget::iteration_count(v.get<std::int64_t>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace detail

inline SolverConfig parse_solver_config(const json& section, const std::string& path,
                                        SolverConfig base = {}) {
  detail::require_object(section, path);
  detail::reject_unknown_keys(section, path,
                              {"candidates", "trajectories", "elites", "depth", "smoothing",
                               "sigma2_init", "mu_init", "budget", "variant", "particles",
                               "variance_floor", "depletion_rounds"});
  SolverConfig config = base;
  config.candidates = static_cast<int>(
      detail::integer_field(section, path, "candidates", config.candidates));
  config.trajectories = static_cast<int>(
      detail::integer_field(section, path, "trajectories", config.trajectories));
  config.elites = static_cast<int>(detail::integer_field(section, path, "elites", config.elites));
  config.depth = static_cast<int>(detail::integer_field(section, path, "depth", config.depth));
  config.smoothing = detail::number_field(section, path, "smoothing", config.smoothing);
  config.sigma2_init = detail::number_field(section, path, "sigma2_init", config.sigma2_init);
  config.mu_init = detail::number_field(section, path, "mu_init", config.mu_init);
  if (section.contains("budget"))
    config.budget = detail::parse_budget(section.at("budget"), path + ".budget");
  if (section.contains("variant")) {
    const std::string name = detail::string_field(section, path, "variant", "");
    try {
      config.variant = variant_from_string(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + ".variant", e.what());
    }
  }
  config.particles = static_cast<int>(
      detail::integer_field(section, path, "particles", config.particles));
  config.variance_floor =
      detail::number_field(section, path, "variance_floor", config.variance_floor);
  config.depletion_rounds = static_cast<int>(
      detail::integer_field(section, path, "depletion_rounds", config.depletion_rounds));
  return config;
}

inline RunConfig parse_run_config(const json& document) {
  detail::require_object(document, "<root>");
  detail::reject_unknown_keys(document, "<root>", {"scenario", "solver", "run", "tune"});
  RunConfig config;
  if (document.contains("scenario")) {
    const json& section = document.at("scenario");
    detail::require_object(section, "scenario");
    detail::reject_unknown_keys(section, "scenario", {"id", "overrides"});
    config.scenario.id = detail::string_field(section, "scenario", "id", config.scenario.id);
    if (section.contains("overrides")) {
      detail::require_object(section.at("overrides"), "scenario.overrides");
      config.scenario.overrides = section.at("overrides");
    }
  }
  if (document.contains("solver"))
    config.solver = parse_solver_config(document.at("solver"), "solver");
  if (document.contains("run")) {
    const json& section = document.at("run");
    detail::require_object(section, "run");
    detail::reject_unknown_keys(section, "run",
                                {"episodes", "base_seed", "workers", "output", "format"});
    config.run.episodes = static_cast<int>(
        detail::integer_field(section, "run", "episodes", config.run.episodes));
    config.run.base_seed = static_cast<std::uint64_t>(detail::integer_field(
        section, "run", "base_seed", static_cast<std::int64_t>(config.run.base_seed)));
    config.run.workers = static_cast<int>(
        detail::integer_field(section, "run", "workers", config.run.workers));
    config.run.output = detail::string_field(section, "run", "output", config.run.output);
    const std::string format = detail::string_field(section, "run", "format", "csv");
    if (format == "csv")
      config.run.format = OutputFormat::Csv;
    else if (format == "json")
      config.run.format = OutputFormat::Json;
    else
      throw ConfigError("run.format", "expected 'csv' or 'json'");
  }
  if (document.contains("tune")) {
    detail::require_object(document.at("tune"), "tune");
    config.tune = document.at("tune");
  }
  config.validate();
  return config;
}

// Parse failures keep nlohmann's line/column diagnostics in the message.
inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  json document;
  try {
    document = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
  return parse_run_config(document);
}

// LCEOPT_SEED overrides the configured base seed (continuous-integration
// hook). Returns true when an override was applied.
inline bool apply_env_seed_override(RunConfig& config) {
  const char* raw = std::getenv("LCEOPT_SEED");
  if (raw == nullptr || *raw == '\0') return false;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') throw ConfigError("LCEOPT_SEED", "expected an unsigned integer");
  config.run.base_seed = static_cast<std::uint64_t>(value);
  return true;
}

inline void apply_paper_scale(RunConfig& config) {
  config.run.episodes = 1000;
  config.solver.budget = Budget::seconds(1.0);
}

inline json solver_to_json(const SolverConfig& config) {
  json budget;
  if (config.budget.kind == Budget::Kind::CpuSeconds)
    budget = json{{"cpu_seconds", config.budget.cpu_seconds}};
  else
    budget = json{{"iterations", config.budget.iterations}};
  return json{{"candidates", config.candidates},
              {"trajectories", config.trajectories},
              {"elites", config.elites},
              {"depth", config.depth},
              {"smoothing", config.smoothing},
              {"sigma2_init", config.sigma2_init},
              {"mu_init", config.mu_init},
              {"budget", budget},
              {"variant", to_string(config.variant)},
              {"particles", config.particles},
              {"variance_floor", config.variance_floor},
              {"depletion_rounds", config.depletion_rounds}};
}

}  // namespace lceopt::bench
