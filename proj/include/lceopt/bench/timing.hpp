#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lceopt/bench/config.hpp"
#include "lceopt/bench/runner.hpp"
#include "lceopt/bench/stats.hpp"
#include "lceopt/solver.hpp"

namespace lceopt::bench {

struct TimingOptions {
  std::vector<int> depths = {1, 2, 3, 4, 5};
  int iterations = 50;      // CE iterations per planning step (fixed budget)
  int planning_steps = 20;  // planning steps averaged per cell
  std::uint64_t base_seed = 1;

  void validate() const {
    if (depths.empty()) throw ConfigError("timing.depths", "at least one depth required");
    for (int depth : depths)
      if (depth < 1) throw ConfigError("timing.depths", "depths must be >= 1");
    if (iterations < 1) throw ConfigError("timing.iterations", "must be >= 1");
    if (planning_steps < 1) throw ConfigError("timing.planning_steps", "must be >= 1");
  }
};

// Mean CPU seconds per planning step to complete the fixed iteration count,
// walking real closed-loop episodes (new episodes start whenever one ends)
// so beliefs are representative. Single-threaded; the measured window is the
// CE-iteration loop inside plan_step.
template <ScenarioLike S>
TimingCell measure_timing_cell(const S& scenario, const SolverConfig& solver, int planning_steps,
                               std::uint64_t base_seed) {
  const ProblemSpec& spec = scenario.spec();
  if (spec.max_episode_steps < 1)
    throw std::invalid_argument("measure_timing_cell: scenario never plans");
  TimingCell cell;
  cell.variant = solver.variant;
  cell.depth = solver.depth;
  double total = 0.0;
  int measured = 0;
  std::uint64_t episode_seed = base_seed;
  while (measured < planning_steps) {
    RngStream init_rng(mix_seed(episode_seed, 0x696e6974ULL));
    typename S::State state = scenario.sample_initial_state(init_rng);
    RngStream belief_rng(mix_seed(episode_seed, 0x62656c696566ULL));
    ParticleBelief<typename S::State> belief =
        scenario.initial_belief(state, solver.particles, belief_rng);
    RngStream env_rng(mix_seed(episode_seed, 0x656e76ULL));
    for (int step = 0; step < spec.max_episode_steps && measured < planning_steps; ++step) {
      const PlanningResult plan =
          plan_step(scenario, belief, solver, mix_seed(episode_seed, 0x706c616eULL, step));
      total += plan.elapsed_cpu_seconds;
      ++measured;
      const GenerativeOutcome<typename S::State> outcome =
          scenario.generate(state, plan.chosen_action, env_rng);
      if (outcome.terminal) break;
      state = outcome.next_state;
      try {
        belief = sir_update(scenario, belief, plan.chosen_action, outcome.observation, belief_rng,
                            solver.particles, solver.depletion_rounds);
      } catch (const ParticleDepletionError&) {
        break;
      }
    }
    ++episode_seed;
  }
  cell.planning_steps = measured;
  cell.mean_cpu_seconds = total / static_cast<double>(measured);
  return cell;
}

// Lazy-vs-basic CPU-time matrix over policy depths. Both variants share
// candidate counts, trajectory counts, elite counts, and the seed schedule.
template <ScenarioLike S>
TimingReport run_timing(const S& scenario, const std::string& scenario_id,
                        const SolverConfig& base, const TimingOptions& options) {
  options.validate();
  TimingReport report;
  report.scenario = scenario_id;
  report.iterations = options.iterations;
  for (int depth : options.depths) {
    for (PolicyVariant variant : {PolicyVariant::Lazy, PolicyVariant::Basic}) {
      SolverConfig solver = base;
      solver.depth = depth;
      solver.variant = variant;
      solver.budget = Budget::iteration_count(options.iterations);
      report.cells.push_back(
          measure_timing_cell(scenario, solver, options.planning_steps, options.base_seed));
    }
  }
  return report;
}

// CPU measurements need a quiet process, so this always runs on one thread
// regardless of the configured worker count.
inline TimingReport cmd_timing(const RunConfig& config, const TimingOptions& options) {
  return with_scenario(config.scenario, [&](const auto& scenario) {
    return run_timing(scenario, config.scenario.id, config.solver, options);
  });
}

}  // namespace lceopt::bench
