#pragma once

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lceopt/bench/config.hpp"
#include "lceopt/bench/stats.hpp"
#include "lceopt/scenarios/conttag.hpp"
#include "lceopt/scenarios/pushbox.hpp"
#include "lceopt/scenarios/toy.hpp"
#include "lceopt/solver.hpp"

namespace lceopt::bench {

namespace detail {

class OverrideReader {
 public:
  OverrideReader(const json& section, std::string path)
      : section_(section), path_(std::move(path)) {
    require_object(section_, path_);
  }

  void read(const char* key, double& field) {
    if (!section_.contains(key)) return;
    if (!section_.at(key).is_number()) throw ConfigError(path_ + "." + key, "expected a number");
    field = section_.at(key).get<double>();
    seen_.push_back(key);
  }

  void read(const char* key, int& field) {
    if (!section_.contains(key)) return;
    if (!section_.at(key).is_number_integer())
      throw ConfigError(path_ + "." + key, "expected an integer");
    field = section_.at(key).get<int>();
    seen_.push_back(key);
  }

  void read(const char* key, std::vector<double>& field) {
    if (!section_.contains(key)) return;
    const json& v = section_.at(key);
    if (!v.is_array()) throw ConfigError(path_ + "." + key, "expected an array of numbers");
    std::vector<double> values;
    for (const json& entry : v) {
      if (!entry.is_number()) throw ConfigError(path_ + "." + key, "expected an array of numbers");
      values.push_back(entry.get<double>());
    }
    field = std::move(values);
    seen_.push_back(key);
  }

  // Every supplied key must have been consumed by a read() above.
  void finish() const {
    for (const auto& item : section_.items()) {
      bool found = false;
      for (const std::string& key : seen_)
        if (key == item.key()) { found = true; break; }
      if (!found) throw ConfigError(path_ + "." + item.key(), "unknown scenario parameter");
    }
  }

 private:
  const json& section_;
  std::string path_;
  std::vector<std::string> seen_;
};

constexpr const char* kOverridePath = "scenario.overrides";

}  // namespace detail

inline ContTag make_conttag(const json& overrides) {
  ContTag::Params p;
  detail::OverrideReader reader(overrides, detail::kOverridePath);
  reader.read("width", p.width);
  reader.read("height", p.height);
  reader.read("tag_radius", p.tag_radius);
  reader.read("tag_reward", p.tag_reward);
  reader.read("tag_penalty", p.tag_penalty);
  reader.read("step_reward", p.step_reward);
  reader.read("noise_sigma", p.noise_sigma);
  reader.read("noise_bound", p.noise_bound);
  reader.read("discount", p.discount);
  reader.read("max_episode_steps", p.max_episode_steps);
  reader.finish();
  return ContTag(p);
}

inline Pushbox2D make_pushbox(const json& overrides) {
  Pushbox2D::Params p;
  detail::OverrideReader reader(overrides, detail::kOverridePath);
  reader.read("arena_size", p.arena_size);
  reader.read("robot_radius", p.robot_radius);
  reader.read("puck_radius", p.puck_radius);
  reader.read("goal_x", p.goal_x);
  reader.read("goal_y", p.goal_y);
  reader.read("goal_radius", p.goal_radius);
  reader.read("robot_start_x", p.robot_start_x);
  reader.read("robot_start_y", p.robot_start_y);
  reader.read("puck_center_x", p.puck_center_x);
  reader.read("puck_center_y", p.puck_center_y);
  reader.read("puck_spread", p.puck_spread);
  reader.read("push_gain", p.push_gain);
  reader.read("push_noise_sigma", p.push_noise_sigma);
  reader.read("push_noise_bound", p.push_noise_bound);
  reader.read("bearing_accuracy", p.bearing_accuracy);
  reader.read("goal_reward", p.goal_reward);
  reader.read("collision_penalty", p.collision_penalty);
  reader.read("step_reward", p.step_reward);
  reader.read("heuristic_step_reward", p.heuristic_step_reward);
  reader.read("heuristic_goal_reward", p.heuristic_goal_reward);
  reader.read("max_displacement", p.max_displacement);
  reader.read("discount", p.discount);
  reader.read("max_episode_steps", p.max_episode_steps);
  reader.finish();
  return Pushbox2D(p);
}

inline QuadraticToy make_toy(const json& overrides) {
  QuadraticToy::Params p;
  detail::OverrideReader reader(overrides, detail::kOverridePath);
  reader.read("target", p.target);
  reader.read("action_lower", p.action_lower);
  reader.read("action_upper", p.action_upper);
  reader.read("discount", p.discount);
  reader.finish();
  return QuadraticToy(p);
}

inline TwoStateToy make_twostate(const json& overrides) {
  TwoStateToy::Params p;
  detail::OverrideReader reader(overrides, detail::kOverridePath);
  reader.read("flip_probability", p.flip_probability);
  reader.read("observe_zero_given_0", p.observe_zero_given_0);
  reader.read("observe_zero_given_1", p.observe_zero_given_1);
  reader.read("discount", p.discount);
  reader.read("max_episode_steps", p.max_episode_steps);
  reader.finish();
  return TwoStateToy(p);
}

inline SyntheticHighDim make_synth(const json& overrides) {
  SyntheticHighDim::Params p;
  detail::OverrideReader reader(overrides, detail::kOverridePath);
  reader.read("action_dim", p.action_dim);
  reader.read("observation_count", p.observation_count);
  reader.read("discount", p.discount);
  reader.read("max_episode_steps", p.max_episode_steps);
  reader.read("action_bound", p.action_bound);
  reader.finish();
  return SyntheticHighDim(p);
}

// Static dispatch over the scenario registry; the callable receives the
// concrete scenario so the planner templates stay fully inlined.
template <typename F>
auto with_scenario(const ScenarioSelection& selection, F&& f) {
  try {
    if (selection.id == "conttag") return f(make_conttag(selection.overrides));
    if (selection.id == "pushbox2d") return f(make_pushbox(selection.overrides));
    if (selection.id == "toy1step") return f(make_toy(selection.overrides));
    if (selection.id == "twostate") return f(make_twostate(selection.overrides));
    if (selection.id == "synth-highdim") return f(make_synth(selection.overrides));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(detail::kOverridePath, e.what());
  }
  throw ConfigError("scenario.id",
                    "unknown scenario '" + selection.id +
                        "' (known: conttag, pushbox2d, toy1step, twostate, synth-highdim)");
}

struct BatchResult {
  std::vector<EpisodeRecord> records;  // contiguous completed prefix
  bool interrupted = false;
};

// Runs `episodes` independent episodes with seeds base_seed + i on a worker
// pool. Records land in episode-index order no matter the worker count, so
// identical configs persist byte-identical results. A set cancel flag stops
// workers from starting new episodes; the completed prefix is kept.
template <ScenarioLike S>
BatchResult run_batch(const S& scenario, const SolverConfig& solver, const RunSettings& run,
                      const std::atomic<bool>* cancel = nullptr) {
  const int episodes = run.episodes;
  BatchResult result;
  result.records.resize(static_cast<std::size_t>(episodes));
  std::vector<char> completed(static_cast<std::size_t>(episodes), 0);
  const auto cancelled = [&] { return cancel != nullptr && cancel->load(); };

  const auto work_on = [&](int index) {
    result.records[static_cast<std::size_t>(index)] =
        run_episode(scenario, solver, run.base_seed + static_cast<std::uint64_t>(index));
    completed[static_cast<std::size_t>(index)] = 1;
  };

  const int workers = std::min(run.workers, episodes);
  if (workers <= 1) {
    for (int i = 0; i < episodes && !cancelled(); ++i) work_on(i);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const int index = next.fetch_add(1);
          if (index >= episodes || cancelled()) return;
          try {
            work_on(index);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::size_t prefix = 0;
  while (prefix < completed.size() && completed[prefix]) ++prefix;
  result.records.resize(prefix);
  result.interrupted = prefix < static_cast<std::size_t>(episodes);
  return result;
}

// Frozen per-episode record schema. Returns print with 17 significant
// digits so a read-back reproduces the exact double.
inline constexpr const char* kCsvHeader = "seed,return,steps,termination";

inline void write_csv(std::ostream& out, std::span<const EpisodeRecord> records) {
  out << kCsvHeader << '\n';
  char buffer[64];
  for (const EpisodeRecord& r : records) {
    std::snprintf(buffer, sizeof buffer, "%.17g", r.discounted_return);
    out << r.seed << ',' << buffer << ',' << r.steps << ',' << to_string(r.termination) << '\n';
  }
}

inline std::vector<EpisodeRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty input");
  if (line != kCsvHeader) throw std::runtime_error("read_csv: unexpected header '" + line + "'");
  std::vector<EpisodeRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string seed_text, return_text, steps_text, termination_text;
    if (!std::getline(fields, seed_text, ',') || !std::getline(fields, return_text, ',') ||
        !std::getline(fields, steps_text, ',') || !std::getline(fields, termination_text))
      throw std::runtime_error("read_csv: malformed row '" + line + "'");
    EpisodeRecord record;
    record.seed = std::stoull(seed_text);
    record.discounted_return = std::stod(return_text);
    record.steps = std::stoi(steps_text);
    record.termination = termination_from_string(termination_text);
    records.push_back(record);
  }
  return records;
}

inline json records_to_json(std::span<const EpisodeRecord> records) {
  json out = json::array();
  for (const EpisodeRecord& r : records)
    out.push_back({{"seed", r.seed},
                   {"return", r.discounted_return},
                   {"steps", r.steps},
                   {"termination", to_string(r.termination)}});
  return out;
}

inline void persist_records(const std::string& path, OutputFormat format,
                            std::span<const EpisodeRecord> records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  if (format == OutputFormat::Csv)
    write_csv(out, records);
  else
    out << records_to_json(records).dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

struct RunOutcome {
  std::vector<EpisodeRecord> records;
  BatchStats stats;
  bool interrupted = false;
};

// Episode batch + aggregation + optional persistence: the `run` command.
inline RunOutcome cmd_run(const RunConfig& config, const std::atomic<bool>* cancel = nullptr) {
  config.validate();
  BatchResult batch = with_scenario(config.scenario, [&](const auto& scenario) {
    return run_batch(scenario, config.solver, config.run, cancel);
  });
  RunOutcome outcome;
  outcome.records = std::move(batch.records);
  outcome.interrupted = batch.interrupted;
  if (!config.run.output.empty())
    persist_records(config.run.output, config.run.format, outcome.records);
  if (!outcome.records.empty()) outcome.stats = compute_batch_stats(outcome.records);
  return outcome;
}

}  // namespace lceopt::bench
