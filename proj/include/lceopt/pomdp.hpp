#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lceopt/rng.hpp"

namespace lceopt {

// Static description of a generative POMDP with a box-bounded continuous
// action space and a finite observation set.
struct ProblemSpec {
  int action_dim = 0;
  int observation_count = 0;
  double discount = 1.0;
  int max_episode_steps = 0;
  std::vector<double> action_lower;
  std::vector<double> action_upper;

  void validate() const {
    if (action_dim <= 0) throw std::invalid_argument("ProblemSpec: action_dim must be positive");
    if (observation_count <= 0)
      throw std::invalid_argument("ProblemSpec: observation_count must be positive");
    if (!(discount > 0.0 && discount <= 1.0))
      throw std::invalid_argument("ProblemSpec: discount outside (0,1]");
    if (max_episode_steps < 0)
      throw std::invalid_argument("ProblemSpec: negative max_episode_steps");
    if (static_cast<int>(action_lower.size()) != action_dim ||
        static_cast<int>(action_upper.size()) != action_dim)
      throw std::invalid_argument("ProblemSpec: action bounds dimension mismatch");
    for (int i = 0; i < action_dim; ++i)
      if (!(action_lower[i] <= action_upper[i]))
        throw std::invalid_argument("ProblemSpec: empty action box");
  }

  void clamp_action(std::span<double> a) const {
    for (int i = 0; i < action_dim; ++i)
      a[i] = std::clamp(a[i], action_lower[i], action_upper[i]);
  }
};

template <typename State>
struct GenerativeOutcome {
  State next_state;
  int observation = 0;
  double reward = 0.0;
  bool terminal = false;
};

// Weighted particle set. Weights are kept normalized; a freshly resampled
// belief is uniform.
template <typename State>
struct ParticleBelief {
  std::vector<State> particles;
  std::vector<double> weights;

  static ParticleBelief uniform(std::vector<State> states) {
    ParticleBelief b;
    const double w = states.empty() ? 0.0 : 1.0 / static_cast<double>(states.size());
    b.weights.assign(states.size(), w);
    b.particles = std::move(states);
    return b;
  }

  std::size_t size() const { return particles.size(); }

  void normalize() {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::runtime_error("ParticleBelief: non-positive total weight");
    for (double& w : weights) w /= total;
  }
};

enum class Termination { Goal, Failure, StepLimit };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Goal: return "goal";
    case Termination::Failure: return "failure";
    case Termination::StepLimit: return "step_limit";
  }
  return "unknown";
}

inline Termination termination_from_string(const std::string& s) {
  if (s == "goal") return Termination::Goal;
  if (s == "failure") return Termination::Failure;
  if (s == "step_limit") return Termination::StepLimit;
  throw std::invalid_argument("unknown termination label: " + s);
}

struct EpisodeRecord {
  std::uint64_t seed = 0;
  double discounted_return = 0.0;
  int steps = 0;
  Termination termination = Termination::StepLimit;
};

// Thrown when sequential importance resampling finds no particle consistent
// with the perceived observation after the configured retry rounds.
struct ParticleDepletionError : std::runtime_error {
  explicit ParticleDepletionError(const std::string& what) : std::runtime_error(what) {}
};

inline double discounted_return(std::span<const double> rewards, double discount) {
  double total = 0.0;
  double scale = 1.0;
  for (double r : rewards) {
    total += scale * r;
    scale *= discount;
  }
  return total;
}

// Single weighted draw; O(n). Hot paths build a ParticleSampler instead.
template <typename State>
const State& sample_state(const ParticleBelief<State>& belief, RngStream& rng) {
  if (belief.particles.empty()) throw std::invalid_argument("sample_state: empty belief");
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i < belief.weights.size(); ++i) {
    acc += belief.weights[i];
    if (u < acc) return belief.particles[i];
  }
  return belief.particles.back();
}

// Cumulative-weight index sampler; O(log n) per draw over a fixed belief.
class ParticleSampler {
 public:
  template <typename State>
  explicit ParticleSampler(const ParticleBelief<State>& belief) {
    cumulative_.reserve(belief.weights.size());
    double acc = 0.0;
    for (double w : belief.weights) {
      acc += w;
      cumulative_.push_back(acc);
    }
    if (cumulative_.empty() || !(acc > 0.0))
      throw std::invalid_argument("ParticleSampler: empty or zero-weight belief");
    total_ = acc;
  }

  std::size_t draw_index(RngStream& rng) const {
    const double u = rng.uniform01() * total_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
    return i < cumulative_.size() ? i : cumulative_.size() - 1;
  }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

// Low-variance systematic resampling to `target_count` equally weighted
// particles; consumes exactly one uniform draw.
template <typename State>
ParticleBelief<State> systematic_resample(const std::vector<State>& particles,
                                          const std::vector<double>& weights, int target_count,
                                          RngStream& rng) {
  if (particles.empty() || particles.size() != weights.size())
    throw std::invalid_argument("systematic_resample: bad input sizes");
  if (target_count <= 0) throw std::invalid_argument("systematic_resample: target_count <= 0");
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::invalid_argument("systematic_resample: zero total weight");

  ParticleBelief<State> out;
  out.particles.reserve(static_cast<std::size_t>(target_count));
  const double step = total / static_cast<double>(target_count);
  double position = rng.uniform01() * step;
  double acc = weights[0];
  std::size_t i = 0;
  for (int k = 0; k < target_count; ++k) {
    while (acc < position && i + 1 < particles.size()) acc += weights[++i];
    out.particles.push_back(particles[i]);
    position += step;
  }
  out.weights.assign(static_cast<std::size_t>(target_count),
                     1.0 / static_cast<double>(target_count));
  return out;
}

// A scenario provides a generative model, a terminal-value heuristic, and
// initial state/belief construction. See the scenario headers for examples.
template <typename S>
concept ScenarioLike = requires(const S& sc, const typename S::State& st,
                                std::span<const double> action, RngStream& rng, int n) {
  typename S::State;
  { sc.spec() } -> std::convertible_to<const ProblemSpec&>;
  { sc.generate(st, action, rng) } -> std::same_as<GenerativeOutcome<typename S::State>>;
  { sc.heuristic(st) } -> std::convertible_to<double>;
  { sc.sample_initial_state(rng) } -> std::same_as<typename S::State>;
  { sc.initial_belief(st, n, rng) } -> std::same_as<ParticleBelief<typename S::State>>;
};

// Optional exact observation likelihood Z(o | s, a, s'). When a scenario
// exposes it, belief updates weight particles by the exact likelihood instead
// of the indicator of the sampled observation matching.
template <typename S>
concept HasObservationProbability =
    requires(const S& sc, const typename S::State& prev, std::span<const double> action,
             const typename S::State& next, int obs) {
      { sc.observation_probability(prev, action, next, obs) } -> std::convertible_to<double>;
    };

// Sequential importance resampling: propagate every particle through the
// generative model, weight by consistency with the perceived observation,
// resample back to target_count. Rounds whose total weight is zero are
// retried with fresh propagation noise up to max_rounds times.
//
// The update models a *continuing* episode, so it also conditions on
// non-termination: a propagated particle that terminates could not have
// produced the decision point being updated and gets zero weight. (In a
// pursuit scenario this is what rules out nearby target positions after a
// failed tag.)
template <ScenarioLike S>
ParticleBelief<typename S::State> sir_update(const S& scenario,
                                             const ParticleBelief<typename S::State>& belief,
                                             std::span<const double> action, int observation,
                                             RngStream& rng, int target_count,
                                             int max_rounds = 10) {
  if (observation < 0 || observation >= scenario.spec().observation_count)
    throw std::invalid_argument("sir_update: observation index out of range");
  if (belief.particles.empty()) throw std::invalid_argument("sir_update: empty belief");
  if (max_rounds <= 0) throw std::invalid_argument("sir_update: max_rounds <= 0");

  std::vector<typename S::State> propagated(belief.particles.size());
  std::vector<double> weights(belief.particles.size());
  for (int round = 0; round < max_rounds; ++round) {
    double total = 0.0;
    for (std::size_t i = 0; i < belief.particles.size(); ++i) {
      auto outcome = scenario.generate(belief.particles[i], action, rng);
      double likelihood;
      if (outcome.terminal) {
        likelihood = 0.0;
      } else if constexpr (HasObservationProbability<S>) {
        likelihood = scenario.observation_probability(belief.particles[i], action,
                                                      outcome.next_state, observation);
      } else {
        likelihood = outcome.observation == observation ? 1.0 : 0.0;
      }
      propagated[i] = std::move(outcome.next_state);
      weights[i] = belief.weights[i] * likelihood;
      total += weights[i];
    }
    if (total > 0.0) return systematic_resample(propagated, weights, target_count, rng);
  }
  throw ParticleDepletionError("sir_update: no particle consistent with observation after " +
                               std::to_string(max_rounds) + " rounds");
}

}  // namespace lceopt
