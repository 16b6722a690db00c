#pragma once

#include <ctime>
#include <iostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lceopt/cross_entropy.hpp"
#include "lceopt/policy_tree.hpp"
#include "lceopt/pomdp.hpp"
#include "lceopt/rng.hpp"

namespace lceopt {

// CPU time consumed by the calling thread. Budgets are per-thread so that
// concurrently planned episodes meter themselves independently.
inline double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

enum class PolicyVariant { Lazy, Basic };

inline const char* to_string(PolicyVariant v) {
  return v == PolicyVariant::Lazy ? "lazy" : "basic";
}

inline PolicyVariant variant_from_string(const std::string& s) {
  if (s == "lazy") return PolicyVariant::Lazy;
  if (s == "basic") return PolicyVariant::Basic;
  throw std::invalid_argument("unknown variant: " + s);
}

struct Budget {
  enum class Kind { CpuSeconds, Iterations };
  Kind kind = Kind::CpuSeconds;
  double cpu_seconds = 0.25;
  int iterations = 0;

  static Budget seconds(double s) {
    if (!(s > 0.0)) throw std::invalid_argument("Budget: cpu_seconds must be positive");
    return {Kind::CpuSeconds, s, 0};
  }
  static Budget iteration_count(int n) {
    if (n <= 0) throw std::invalid_argument("Budget: iterations must be positive");
    return {Kind::Iterations, 0.0, n};
  }
};

struct SolverConfig {
  int candidates = 100;       // policies sampled per iteration
  int trajectories = 10;      // Monte Carlo rollouts per candidate
  int elites = 10;            // top candidates kept for the update
  int depth = 2;              // policy-tree depth
  double smoothing = 0.8;     // blend weight toward the elite fit
  double sigma2_init = 1.0;   // broadcast initial variance
  double mu_init = 0.0;       // broadcast initial mean
  Budget budget = Budget::seconds(0.25);
  PolicyVariant variant = PolicyVariant::Lazy;
  int particles = 10000;      // belief size maintained between steps
  double variance_floor = 1e-8;
  int depletion_rounds = 10;  // belief-update retries before failing

  void validate() const {
    if (candidates <= 0) throw std::invalid_argument("SolverConfig: candidates must be positive");
    if (trajectories <= 0)
      throw std::invalid_argument("SolverConfig: trajectories must be positive");
    if (elites <= 0 || elites > candidates)
      throw std::invalid_argument("SolverConfig: elites must be in [1, candidates]");
    if (depth <= 0) throw std::invalid_argument("SolverConfig: depth must be positive");
    if (!(smoothing > 0.0 && smoothing <= 1.0))
      throw std::invalid_argument("SolverConfig: smoothing outside (0,1]");
    if (sigma2_init < 0.0) throw std::invalid_argument("SolverConfig: negative sigma2_init");
    if (particles <= 0) throw std::invalid_argument("SolverConfig: particles must be positive");
    if (variance_floor < 0.0)
      throw std::invalid_argument("SolverConfig: negative variance_floor");
    if (depletion_rounds <= 0)
      throw std::invalid_argument("SolverConfig: depletion_rounds must be positive");
    if (budget.kind == Budget::Kind::CpuSeconds && !(budget.cpu_seconds > 0.0))
      throw std::invalid_argument("SolverConfig: cpu budget must be positive");
    if (budget.kind == Budget::Kind::Iterations && budget.iterations <= 0)
      throw std::invalid_argument("SolverConfig: iteration budget must be positive");
  }
};

struct PlanningResult {
  std::vector<double> chosen_action;
  int iterations_run = 0;
  double elapsed_cpu_seconds = 0.0;
  std::vector<double> final_mean;
  std::vector<double> final_variance;
};

namespace detail {

// One policy rollout batch against a fixed belief. The sampler is built once
// per planning step; candidates reuse their parameter storage across
// iterations.
//
// Trajectory noise is shared across the candidates of an iteration (common
// random numbers): trajectory l restarts from a copy of trajectory_streams[l],
// so competing policies are scored on the same start particles and, until
// their actions diverge, the same transition noise. Policy parameters draw
// from the candidate's own theta_rng so candidates stay distinct.
template <ScenarioLike S>
double evaluate_with_sampler(const S& scenario, const ParticleBelief<typename S::State>& belief,
                             const ParticleSampler& sampler, PolicyParameterVector& theta,
                             const DiagonalGaussian& dist, PolicyVariant variant,
                             RngStream& theta_rng, const std::vector<RngStream>& trajectory_streams) {
  const ProblemSpec& spec = scenario.spec();
  const PolicyTreeShape& shape = theta.shape();
  const int depth = shape.depth;
  std::vector<double> action(static_cast<std::size_t>(spec.action_dim));
  double total = 0.0;
  for (const RngStream& stream : trajectory_streams) {
    RngStream rng = stream;
    NodeIndex node = 0;
    typename S::State state = belief.particles[sampler.draw_index(rng)];
    double acc = 0.0;
    double scale = 1.0;
    bool terminal = false;
    for (int m = 0; m < depth; ++m) {
      std::span<const double> block = variant == PolicyVariant::Lazy
                                          ? sample_node_lazy(theta, node, dist, theta_rng)
                                          : theta.action_block(node);
      for (int i = 0; i < spec.action_dim; ++i) action[static_cast<std::size_t>(i)] = block[i];
      spec.clamp_action(action);
      GenerativeOutcome<typename S::State> outcome = scenario.generate(state, action, rng);
      acc += scale * outcome.reward;
      scale *= spec.discount;
      if (outcome.terminal) {
        terminal = true;
        break;
      }
      node = shape.child(node, outcome.observation);
      state = std::move(outcome.next_state);
    }
    if (!terminal) acc += scale * scenario.heuristic(state);
    total += acc;
  }
  return total / static_cast<double>(trajectory_streams.size());
}

// Streams for one iteration's shared trajectory noise.
inline std::vector<RngStream> make_trajectory_streams(std::uint64_t eval_seed, int trajectories) {
  std::vector<RngStream> streams;
  streams.reserve(static_cast<std::size_t>(trajectories));
  for (int l = 0; l < trajectories; ++l)
    streams.emplace_back(mix_seed(eval_seed, static_cast<std::uint64_t>(l)));
  return streams;
}

}  // namespace detail

// Monte Carlo value of a policy parameter vector under the given belief.
// Lazy candidates draw node parameters on first visit; basic candidates must
// arrive fully present. Trajectory streams derive from one draw of `rng`, so
// identical stream states give identical trajectories in both modes.
template <ScenarioLike S>
double evaluate_policy(const S& scenario, const ParticleBelief<typename S::State>& belief,
                       PolicyParameterVector& theta, const DiagonalGaussian& dist,
                       int trajectories, PolicyVariant variant, RngStream& rng) {
  if (trajectories <= 0) throw std::invalid_argument("evaluate_policy: trajectories <= 0");
  const ParticleSampler sampler(belief);
  const std::vector<RngStream> trajectory_streams =
      detail::make_trajectory_streams(rng.next_u64(), trajectories);
  return detail::evaluate_with_sampler(scenario, belief, sampler, theta, dist, variant, rng,
                                       trajectory_streams);
}

// One planning step: reset the sampling distribution, run scored-batch
// cross-entropy iterations until the budget is exhausted (always completing
// at least one), then return the clamped root block of the final mean.
template <ScenarioLike S>
PlanningResult plan_step(const S& scenario, const ParticleBelief<typename S::State>& belief,
                         const SolverConfig& config, std::uint64_t plan_seed) {
  config.validate();
  const ProblemSpec& spec = scenario.spec();
  spec.validate();
  const PolicyTreeShape shape(config.depth, spec.observation_count, spec.action_dim);
  DiagonalGaussian dist =
      DiagonalGaussian::broadcast(shape.parameter_dim(), config.mu_init, config.sigma2_init);

  std::vector<ScoredSample> batch;
  batch.reserve(static_cast<std::size_t>(config.candidates));
  for (int c = 0; c < config.candidates; ++c)
    batch.emplace_back(PolicyParameterVector(shape), 0.0);
  const ParticleSampler sampler(belief);

  const double start = thread_cpu_seconds();
  int iterations = 0;
  for (;;) {
    const std::vector<RngStream> trajectory_streams = detail::make_trajectory_streams(
        mix_seed(plan_seed, static_cast<std::uint64_t>(iterations), 0x6c63656f70740002ULL),
        config.trajectories);
    for (int c = 0; c < config.candidates; ++c) {
      ScoredSample& sample = batch[static_cast<std::size_t>(c)];
      sample.theta.reset();
      RngStream theta_rng(mix_seed(plan_seed, static_cast<std::uint64_t>(iterations),
                                   static_cast<std::uint64_t>(c), 0x6c63656f70740001ULL));
      if (config.variant == PolicyVariant::Basic) sample_full_into(sample.theta, dist, theta_rng);
      sample.set_value(detail::evaluate_with_sampler(scenario, belief, sampler, sample.theta, dist,
                                                     config.variant, theta_rng,
                                                     trajectory_streams));
    }
    const EliteSet elite = select_elites(batch, config.elites);
    dist = config.variant == PolicyVariant::Lazy
               ? update_lazy(dist, elite, config.smoothing, config.variance_floor)
               : update_basic(dist, elite, config.smoothing, config.variance_floor);
    ++iterations;
    if (config.budget.kind == Budget::Kind::Iterations) {
      if (iterations >= config.budget.iterations) break;
    } else if (thread_cpu_seconds() - start >= config.budget.cpu_seconds) {
      break;
    }
  }

  PlanningResult result;
  result.iterations_run = iterations;
  result.chosen_action = root_action(dist.mean, spec);
  result.elapsed_cpu_seconds = thread_cpu_seconds() - start;
  result.final_mean = std::move(dist.mean);
  result.final_variance = std::move(dist.variance);
  return result;
}

// Closed-loop episode: plan, execute against the live state, update the
// belief with the perceived observation, repeat until terminal or step cap.
// Terminal transitions classify as Goal when the final reward is
// non-negative; particle depletion classifies as Failure.
template <ScenarioLike S>
EpisodeRecord run_episode(const S& scenario, const SolverConfig& config, std::uint64_t seed) {
  config.validate();
  const ProblemSpec& spec = scenario.spec();
  spec.validate();

  RngStream init_rng(mix_seed(seed, 0x696e6974ULL));
  typename S::State state = scenario.sample_initial_state(init_rng);
  RngStream belief_rng(mix_seed(seed, 0x62656c696566ULL));
  ParticleBelief<typename S::State> belief =
      scenario.initial_belief(state, config.particles, belief_rng);
  RngStream env_rng(mix_seed(seed, 0x656e76ULL));

  EpisodeRecord record;
  record.seed = seed;
  std::vector<double> rewards;
  record.termination = Termination::StepLimit;
  record.steps = spec.max_episode_steps;

  for (int step = 0; step < spec.max_episode_steps; ++step) {
    const PlanningResult plan =
        plan_step(scenario, belief, config, mix_seed(seed, 0x706c616eULL, step));
    const GenerativeOutcome<typename S::State> outcome =
        scenario.generate(state, plan.chosen_action, env_rng);
    rewards.push_back(outcome.reward);
    state = outcome.next_state;
    if (outcome.terminal) {
      record.termination = outcome.reward >= 0.0 ? Termination::Goal : Termination::Failure;
      record.steps = step + 1;
      break;
    }
    if (step + 1 >= spec.max_episode_steps) break;
    try {
      belief = sir_update(scenario, belief, plan.chosen_action, outcome.observation, belief_rng,
                          config.particles, config.depletion_rounds);
    } catch (const ParticleDepletionError& e) {
      std::cerr << "episode seed " << seed << " step " << step << ": " << e.what() << "\n";
      record.termination = Termination::Failure;
      record.steps = step + 1;
      break;
    }
  }
  record.discounted_return = discounted_return(rewards, spec.discount);
  return record;
}

}  // namespace lceopt
