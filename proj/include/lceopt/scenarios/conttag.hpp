#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "lceopt/geometry.hpp"
#include "lceopt/pomdp.hpp"

namespace lceopt {

// Discounted cost of closing a gap of `steps` move actions and then tagging:
// sum of discounted step penalties plus the discounted tag reward.
inline double conttag_heuristic_value(int steps, double discount, double step_reward,
                                      double tag_reward) {
  if (steps < 0) throw std::invalid_argument("conttag_heuristic_value: negative steps");
  const double scale = std::pow(discount, steps);
  const double cost = discount == 1.0 ? static_cast<double>(steps)
                                      : (1.0 - scale) / (1.0 - discount);
  return cost * step_reward + scale * tag_reward;
}

// Continuous-action tag: the agent steers with a heading increment embedded
// in the first action dimension and tags when the second dimension falls in
// [0,1]. The opponent flees straight away from the agent with truncated
// Gaussian positional noise; moves that would leave the free space are
// cancelled for whichever entity attempted them. The agent senses only a
// binary front-cone detection whose hit probability decays with bearing
// offset.
class ContTag {
 public:
  struct State {
    double agent_x = 0.0;
    double agent_y = 0.0;
    double agent_heading = 0.0;
    double opponent_x = 0.0;
    double opponent_y = 0.0;
  };

  struct Params {
    double width = 10.0;
    double height = 5.0;
    std::vector<Rect> obstacles = {{3.5, 3.5, 6.5, 5.0}};
    double tag_radius = 1.0;
    double tag_reward = 10.0;
    double tag_penalty = -10.0;
    double step_reward = -1.0;
    double noise_sigma = kPi / 8.0;
    double noise_bound = kPi / 8.0;
    double discount = 0.95;
    int max_episode_steps = 90;
  };

  ContTag() : ContTag(Params()) {}
  explicit ContTag(Params params)
      : params_(std::move(params)),
        noise_(0.0, params_.noise_sigma, -params_.noise_bound, params_.noise_bound) {
    if (params_.width <= 0.0 || params_.height <= 0.0)
      throw std::invalid_argument("ContTag: non-positive map size");
    if (params_.tag_radius <= 0.0) throw std::invalid_argument("ContTag: non-positive tag radius");
    spec_.action_dim = 2;
    spec_.observation_count = 2;
    spec_.discount = params_.discount;
    spec_.max_episode_steps = params_.max_episode_steps;
    spec_.action_lower = {-kPi, -1.0};
    spec_.action_upper = {kPi, 1.0};
    spec_.validate();
  }

  static constexpr int kNotDetected = 0;
  static constexpr int kDetected = 1;

  const ProblemSpec& spec() const { return spec_; }
  const Params& params() const { return params_; }

  bool in_free_space(double x, double y) const {
    if (x < 0.0 || x > params_.width || y < 0.0 || y > params_.height) return false;
    for (const Rect& r : params_.obstacles)
      if (r.contains_interior(x, y)) return false;
    return true;
  }

  GenerativeOutcome<State> generate(const State& state, std::span<const double> action,
                                    RngStream& rng) const {
    State next = state;
    double reward;
    bool terminal = false;
    const bool tag = action[1] >= 0.0 && action[1] <= 1.0;
    if (tag) {
      const double d = distance(state.agent_x, state.agent_y, state.opponent_x, state.opponent_y);
      if (d < params_.tag_radius) {
        reward = params_.tag_reward;
        terminal = true;
      } else {
        reward = params_.tag_penalty;
      }
    } else {
      reward = params_.step_reward;
      next.agent_heading = wrap_angle(state.agent_heading + action[0]);
      const double ax = state.agent_x + std::cos(next.agent_heading);
      const double ay = state.agent_y + std::sin(next.agent_heading);
      if (in_free_space(ax, ay)) {
        next.agent_x = ax;
        next.agent_y = ay;
      }
      // Flee bearing uses the pre-move poses: both entities move simultaneously.
      const double flee = std::atan2(state.opponent_y - state.agent_y,
                                     state.opponent_x - state.agent_x);
      const double ox = state.opponent_x + std::cos(flee) + noise_.sample(rng);
      const double oy = state.opponent_y + std::sin(flee) + noise_.sample(rng);
      if (in_free_space(ox, oy)) {
        next.opponent_x = ox;
        next.opponent_y = oy;
      }
    }
    const double p = detection_probability(next);
    const int obs = rng.uniform01() < p ? kDetected : kNotDetected;
    return {next, obs, reward, terminal};
  }

  // P(DETECTED | post-move state): linear falloff with bearing offset inside
  // the front half-plane cone, zero behind.
  double detection_probability(const State& state) const {
    const double bearing = std::atan2(state.opponent_y - state.agent_y,
                                      state.opponent_x - state.agent_x);
    const double offset = wrap_angle(bearing - state.agent_heading);
    if (std::abs(offset) > kPi / 2.0) return 0.0;
    return 1.0 - std::abs(offset) / kPi;
  }

  double observation_probability(const State&, std::span<const double>, const State& next,
                                 int obs) const {
    const double p = detection_probability(next);
    return obs == kDetected ? p : 1.0 - p;
  }

  double heuristic(const State& state) const {
    const double d =
        distance(state.agent_x, state.agent_y, state.opponent_x, state.opponent_y);
    return conttag_heuristic_value(static_cast<int>(std::floor(d)), params_.discount,
                                   params_.step_reward, params_.tag_reward);
  }

  State sample_initial_state(RngStream& rng) const {
    State s;
    sample_free_point(rng, s.agent_x, s.agent_y);
    s.agent_heading = 0.0;
    sample_free_point(rng, s.opponent_x, s.opponent_y);
    return s;
  }

  // The agent pose is known at episode start; only the opponent position is
  // uncertain.
  ParticleBelief<State> initial_belief(const State& known, int particle_count,
                                       RngStream& rng) const {
    std::vector<State> particles;
    particles.reserve(static_cast<std::size_t>(particle_count));
    for (int i = 0; i < particle_count; ++i) {
      State s = known;
      sample_free_point(rng, s.opponent_x, s.opponent_y);
      particles.push_back(s);
    }
    return ParticleBelief<State>::uniform(std::move(particles));
  }

  void sample_free_point(RngStream& rng, double& x, double& y) const {
    for (int attempt = 0; attempt < 100000; ++attempt) {
      x = rng.uniform(0.0, params_.width);
      y = rng.uniform(0.0, params_.height);
      if (in_free_space(x, y)) return;
    }
    throw std::runtime_error("ContTag: free space too small to sample");
  }

 private:
  Params params_;
  TruncatedNormal noise_;
  ProblemSpec spec_;
};

}  // namespace lceopt
