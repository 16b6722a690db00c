#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "lceopt/pomdp.hpp"

namespace lceopt {

// One-step scenario with a known optimum: every action terminates with
// reward -||action - target||^2. The analytic argmax is the target itself,
// which makes planner accuracy directly measurable.
class QuadraticToy {
 public:
  struct State {};

  struct Params {
    std::vector<double> target = {0.5, -0.3};
    std::vector<double> action_lower = {-1.0, -1.0};
    std::vector<double> action_upper = {1.0, 1.0};
    double discount = 0.95;
  };

  QuadraticToy() : QuadraticToy(Params()) {}
  explicit QuadraticToy(Params params) : params_(std::move(params)) {
    if (params_.target.size() != params_.action_lower.size() ||
        params_.target.size() != params_.action_upper.size() || params_.target.empty())
      throw std::invalid_argument("QuadraticToy: inconsistent dimensions");
    spec_.action_dim = static_cast<int>(params_.target.size());
    spec_.observation_count = 1;
    spec_.discount = params_.discount;
    spec_.max_episode_steps = 1;
    spec_.action_lower = params_.action_lower;
    spec_.action_upper = params_.action_upper;
    spec_.validate();
  }

  const ProblemSpec& spec() const { return spec_; }
  const Params& params() const { return params_; }

  GenerativeOutcome<State> generate(const State&, std::span<const double> action,
                                    RngStream&) const {
    double sq = 0.0;
    for (std::size_t i = 0; i < params_.target.size(); ++i) {
      const double d = action[i] - params_.target[i];
      sq += d * d;
    }
    return {State{}, 0, -sq, true};
  }

  double heuristic(const State&) const { return 0.0; }

  State sample_initial_state(RngStream&) const { return State{}; }

  ParticleBelief<State> initial_belief(const State&, int particle_count, RngStream&) const {
    return ParticleBelief<State>::uniform(
        std::vector<State>(static_cast<std::size_t>(particle_count)));
  }

 private:
  Params params_;
  ProblemSpec spec_;
};

// Two hidden states with a configurable flip chance and a known observation
// matrix. The exact posterior is a two-entry enumeration, so belief updates
// can be checked against exact Bayes.
class TwoStateToy {
 public:
  using State = int;

  struct Params {
    double flip_probability = 0.1;
    // observe_zero[s] = P(observation 0 | state s); observation 1 gets the rest
    double observe_zero_given_0 = 0.8;
    double observe_zero_given_1 = 0.3;
    double discount = 0.95;
    int max_episode_steps = 20;
  };

  TwoStateToy() : TwoStateToy(Params()) {}
  explicit TwoStateToy(Params params) : params_(params) {
    if (params_.flip_probability < 0.0 || params_.flip_probability > 1.0)
      throw std::invalid_argument("TwoStateToy: flip_probability outside [0,1]");
    for (double p : {params_.observe_zero_given_0, params_.observe_zero_given_1})
      if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("TwoStateToy: observation probability outside [0,1]");
    spec_.action_dim = 1;
    spec_.observation_count = 2;
    spec_.discount = params_.discount;
    spec_.max_episode_steps = params_.max_episode_steps;
    spec_.action_lower = {-1.0};
    spec_.action_upper = {1.0};
    spec_.validate();
  }

  const ProblemSpec& spec() const { return spec_; }
  const Params& params() const { return params_; }

  double transition_probability(State from, State to) const {
    const bool flipped = from != to;
    return flipped ? params_.flip_probability : 1.0 - params_.flip_probability;
  }

  GenerativeOutcome<State> generate(const State& state, std::span<const double>,
                                    RngStream& rng) const {
    const State next = rng.uniform01() < params_.flip_probability ? 1 - state : state;
    const double p0 = next == 0 ? params_.observe_zero_given_0 : params_.observe_zero_given_1;
    const int obs = rng.uniform01() < p0 ? 0 : 1;
    return {next, obs, 0.0, false};
  }

  double observation_probability(const State&, std::span<const double>, const State& next,
                                 int obs) const {
    const double p0 = next == 0 ? params_.observe_zero_given_0 : params_.observe_zero_given_1;
    return obs == 0 ? p0 : 1.0 - p0;
  }

  double heuristic(const State&) const { return 0.0; }

  State sample_initial_state(RngStream& rng) const { return rng.uniform01() < 0.5 ? 0 : 1; }

  ParticleBelief<State> initial_belief(const State&, int particle_count, RngStream& rng) const {
    std::vector<State> particles(static_cast<std::size_t>(particle_count));
    for (auto& s : particles) s = rng.uniform01() < 0.5 ? 0 : 1;
    return ParticleBelief<State>::uniform(std::move(particles));
  }

 private:
  Params params_;
  ProblemSpec spec_;
};

// Non-terminal scenario with trivial dynamics and a 12-dimensional action
// whose only purpose is exercising large policy-parameter spaces: the
// parameter count grows as action_dim times the policy-tree node count.
class SyntheticHighDim {
 public:
  struct State {};

  struct Params {
    int action_dim = 12;
    int observation_count = 2;
    double discount = 0.95;
    int max_episode_steps = 100;
    double action_bound = 1.0;
  };

  SyntheticHighDim() : SyntheticHighDim(Params()) {}
  explicit SyntheticHighDim(Params params) : params_(params) {
    if (params_.action_dim <= 0)
      throw std::invalid_argument("SyntheticHighDim: action_dim must be positive");
    if (params_.observation_count <= 0)
      throw std::invalid_argument("SyntheticHighDim: observation_count must be positive");
    spec_.action_dim = params_.action_dim;
    spec_.observation_count = params_.observation_count;
    spec_.discount = params_.discount;
    spec_.max_episode_steps = params_.max_episode_steps;
    spec_.action_lower.assign(static_cast<std::size_t>(params_.action_dim),
                              -params_.action_bound);
    spec_.action_upper.assign(static_cast<std::size_t>(params_.action_dim), params_.action_bound);
    spec_.validate();
  }

  const ProblemSpec& spec() const { return spec_; }

  GenerativeOutcome<State> generate(const State&, std::span<const double> action,
                                    RngStream& rng) const {
    double sq = 0.0;
    for (int i = 0; i < params_.action_dim; ++i) {
      const double a = action[static_cast<std::size_t>(i)];
      sq += a * a;
    }
    const int obs = static_cast<int>(rng.uniform_index(
        static_cast<std::size_t>(params_.observation_count)));
    return {State{}, obs, -sq / static_cast<double>(params_.action_dim), false};
  }

  double heuristic(const State&) const { return 0.0; }

  State sample_initial_state(RngStream&) const { return State{}; }

  ParticleBelief<State> initial_belief(const State&, int particle_count, RngStream&) const {
    return ParticleBelief<State>::uniform(
        std::vector<State>(static_cast<std::size_t>(particle_count)));
  }

 private:
  Params params_;
  ProblemSpec spec_;
};

}  // namespace lceopt
