#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "lceopt/geometry.hpp"
#include "lceopt/pomdp.hpp"

namespace lceopt {

// Discounted value of pushing for `steps` more actions before the goal
// reward lands; the step cost includes the pushing action itself.
inline double pushbox_heuristic_value(int steps, double discount, double step_reward,
                                      double goal_reward) {
  if (steps < 0) throw std::invalid_argument("pushbox_heuristic_value: negative steps");
  const double scale = std::pow(discount, steps);
  const double cost = discount == 1.0 ? static_cast<double>(steps + 1)
                                      : (1.0 - scale * discount) / (1.0 - discount);
  return cost * step_reward + scale * goal_reward;
}

// Planar robot disk pushing a puck disk toward a goal circle. Contact
// displaces the puck along the contact normal proportionally to penetration
// depth plus truncated Gaussian noise per axis. Either disk touching the
// arena boundary ends the episode with a collision penalty; the puck
// reaching the goal circle ends it with the goal reward. The robot observes
// a noisy quadrant bearing to the puck and an exact contact flag.
class Pushbox2D {
 public:
  struct State {
    double robot_x = 0.0;
    double robot_y = 0.0;
    double puck_x = 0.0;
    double puck_y = 0.0;
  };

  struct Params {
    double arena_size = 10.0;
    double robot_radius = 1.5;
    double puck_radius = 1.5;
    double goal_x = 7.0;
    double goal_y = 7.0;
    double goal_radius = 1.0;
    double robot_start_x = 2.0;
    double robot_start_y = 2.0;
    double puck_center_x = 5.0;
    double puck_center_y = 5.0;
    double puck_spread = 0.75;
    double push_gain = 2.0;
    double push_noise_sigma = 0.1;
    double push_noise_bound = 0.3;
    double bearing_accuracy = 0.85;
    double goal_reward = 1000.0;
    double collision_penalty = -1000.0;
    double step_reward = -10.0;
    double heuristic_step_reward = -1.0;
    double heuristic_goal_reward = 100.0;
    double max_displacement = 1.0;
    double discount = 0.95;
    int max_episode_steps = 50;
  };

  Pushbox2D() : Pushbox2D(Params()) {}
  explicit Pushbox2D(Params params)
      : params_(params),
        noise_(0.0, params_.push_noise_sigma, -params_.push_noise_bound,
               params_.push_noise_bound) {
    if (params_.arena_size <= 0.0) throw std::invalid_argument("Pushbox2D: bad arena size");
    if (params_.robot_radius <= 0.0 || params_.puck_radius <= 0.0)
      throw std::invalid_argument("Pushbox2D: radii must be positive");
    if (params_.bearing_accuracy < 0.0 || params_.bearing_accuracy > 1.0)
      throw std::invalid_argument("Pushbox2D: bearing_accuracy outside [0,1]");
    spec_.action_dim = 2;
    spec_.observation_count = 8;  // 4 bearing quadrants x contact flag
    spec_.discount = params_.discount;
    spec_.max_episode_steps = params_.max_episode_steps;
    spec_.action_lower = {-params_.max_displacement, -params_.max_displacement};
    spec_.action_upper = {params_.max_displacement, params_.max_displacement};
    spec_.validate();
  }

  const ProblemSpec& spec() const { return spec_; }
  const Params& params() const { return params_; }

  bool disk_hits_boundary(double x, double y, double radius) const {
    return x < radius || y < radius || x > params_.arena_size - radius ||
           y > params_.arena_size - radius;
  }

  bool in_contact(double robot_x, double robot_y, double puck_x, double puck_y) const {
    return distance(robot_x, robot_y, puck_x, puck_y) <
           params_.robot_radius + params_.puck_radius;
  }

  GenerativeOutcome<State> generate(const State& state, std::span<const double> action,
                                    RngStream& rng) const {
    State next = state;
    next.robot_x += action[0];
    next.robot_y += action[1];

    const bool contact = in_contact(next.robot_x, next.robot_y, state.puck_x, state.puck_y);
    if (contact) {
      const double reach = params_.robot_radius + params_.puck_radius;
      double nx = state.puck_x - next.robot_x;
      double ny = state.puck_y - next.robot_y;
      const double len = std::hypot(nx, ny);
      if (len > 0.0) {
        nx /= len;
        ny /= len;
      } else {
        nx = 1.0;
        ny = 0.0;
      }
      const double push = params_.push_gain * (reach - len);
      next.puck_x = state.puck_x + push * nx + noise_.sample(rng);
      next.puck_y = state.puck_y + push * ny + noise_.sample(rng);
    }

    double reward = params_.step_reward;
    bool terminal = false;
    const bool collided = disk_hits_boundary(next.robot_x, next.robot_y, params_.robot_radius) ||
                          disk_hits_boundary(next.puck_x, next.puck_y, params_.puck_radius);
    const bool in_goal = distance(next.puck_x, next.puck_y, params_.goal_x, params_.goal_y) <
                         params_.goal_radius;
    if (collided) {
      reward += params_.collision_penalty;
      terminal = true;
    } else if (in_goal) {
      reward += params_.goal_reward;
      terminal = true;
    }

    const int bearing = sample_bearing_bin(next, rng);
    return {next, bearing * 2 + (contact ? 1 : 0), reward, terminal};
  }

  int true_bearing_bin(const State& state) const {
    const double bearing =
        std::atan2(state.puck_y - state.robot_y, state.puck_x - state.robot_x);
    const int bin = static_cast<int>((bearing + kPi) / (kPi / 2.0));
    return bin < 0 ? 0 : (bin > 3 ? 3 : bin);
  }

  // Exact likelihood of an (bearing bin, contact flag) observation. The
  // contact flag is a deterministic function of the transition, so it enters
  // as an indicator.
  double observation_probability(const State& prev, std::span<const double> action,
                                 const State& next, int obs) const {
    if (obs < 0 || obs >= spec_.observation_count) return 0.0;
    const bool contact =
        in_contact(prev.robot_x + action[0], prev.robot_y + action[1], prev.puck_x, prev.puck_y);
    if ((obs & 1) != (contact ? 1 : 0)) return 0.0;
    const int bin = obs >> 1;
    const int truth = true_bearing_bin(next);
    return bin == truth ? params_.bearing_accuracy : (1.0 - params_.bearing_accuracy) / 3.0;
  }

  double heuristic(const State& state) const {
    const double d = distance(state.robot_x, state.robot_y, state.puck_x, state.puck_y);
    return pushbox_heuristic_value(static_cast<int>(std::floor(d)), params_.discount,
                                   params_.heuristic_step_reward, params_.heuristic_goal_reward);
  }

  State sample_initial_state(RngStream& rng) const {
    State s;
    s.robot_x = params_.robot_start_x;
    s.robot_y = params_.robot_start_y;
    s.puck_x = params_.puck_center_x + rng.uniform(-params_.puck_spread, params_.puck_spread);
    s.puck_y = params_.puck_center_y + rng.uniform(-params_.puck_spread, params_.puck_spread);
    return s;
  }

  // The robot pose is known; initial uncertainty is the puck position.
  ParticleBelief<State> initial_belief(const State& known, int particle_count,
                                       RngStream& rng) const {
    std::vector<State> particles;
    particles.reserve(static_cast<std::size_t>(particle_count));
    for (int i = 0; i < particle_count; ++i) {
      State s = known;
      s.puck_x = params_.puck_center_x + rng.uniform(-params_.puck_spread, params_.puck_spread);
      s.puck_y = params_.puck_center_y + rng.uniform(-params_.puck_spread, params_.puck_spread);
      particles.push_back(s);
    }
    return ParticleBelief<State>::uniform(std::move(particles));
  }

 private:
  int sample_bearing_bin(const State& state, RngStream& rng) const {
    const int truth = true_bearing_bin(state);
    if (rng.uniform01() < params_.bearing_accuracy) return truth;
    const int other = static_cast<int>(rng.uniform_index(3));
    return other >= truth ? other + 1 : other;
  }

  Params params_;
  TruncatedNormal noise_;
  ProblemSpec spec_;
};

}  // namespace lceopt
