#pragma once

// Independent reference implementations used only by tests. Each one is
// deliberately naive: correctness by construction, not speed.

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracle {

// Builds the observation-branching tree explicitly, level by level, assigning
// indices in breadth-first order. Children are recorded per (node,
// observation) pair.
struct BfsTree {
  std::int64_t node_count = 0;
  // children[v][o] = index of child, -1 for leaves
  std::vector<std::vector<std::int64_t>> children;
  std::vector<std::int64_t> parent;  // -1 for root
  std::vector<int> depth_of;

  BfsTree(int depth, int branching) {
    if (depth < 0 || branching <= 0) throw std::invalid_argument("BfsTree: bad arguments");
    std::deque<std::pair<std::int64_t, int>> queue;  // (index, depth)
    children.push_back(std::vector<std::int64_t>(static_cast<std::size_t>(branching), -1));
    parent.push_back(-1);
    depth_of.push_back(0);
    node_count = 1;
    queue.emplace_back(0, 0);
    while (!queue.empty()) {
      auto [v, d] = queue.front();
      queue.pop_front();
      if (d == depth) continue;
      for (int o = 0; o < branching; ++o) {
        const std::int64_t c = node_count++;
        children[static_cast<std::size_t>(v)][static_cast<std::size_t>(o)] = c;
        children.push_back(std::vector<std::int64_t>(static_cast<std::size_t>(branching), -1));
        parent.push_back(v);
        depth_of.push_back(d + 1);
        queue.emplace_back(c, d + 1);
      }
    }
  }
};

// Exact Bayes filter over a two-state chain: flip transition, two-symbol
// observation matrix.
struct TwoStateBayes {
  double flip;
  std::array<double, 2> observe_zero;  // P(obs 0 | state)

  std::array<double, 2> update(const std::array<double, 2>& prior, int obs) const {
    std::array<double, 2> posterior{};
    for (int next = 0; next < 2; ++next) {
      double predicted = 0.0;
      for (int prev = 0; prev < 2; ++prev) {
        const double t = next == prev ? 1.0 - flip : flip;
        predicted += prior[static_cast<std::size_t>(prev)] * t;
      }
      const double z = obs == 0 ? observe_zero[static_cast<std::size_t>(next)]
                                : 1.0 - observe_zero[static_cast<std::size_t>(next)];
      posterior[static_cast<std::size_t>(next)] = predicted * z;
    }
    const double total = posterior[0] + posterior[1];
    if (!(total > 0.0)) throw std::runtime_error("TwoStateBayes: impossible observation");
    posterior[0] /= total;
    posterior[1] /= total;
    return posterior;
  }
};

// Summed log N(theta_i; mu, sigma2) over the samples where dimension i is
// present. The full objective separates per dimension, so maximality can be
// checked one dimension at a time. A zero-variance dimension contributes
// +infinity when every present value equals the mean exactly and -infinity
// otherwise, matching the degenerate-Gaussian limit.
inline double marginal_log_likelihood_dim(const std::vector<std::vector<double>>& values,
                                          const std::vector<std::vector<bool>>& present,
                                          std::size_t dim, double mean, double variance) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double total = 0.0;
  bool any = false;
  for (std::size_t s = 0; s < values.size(); ++s) {
    if (!present[s][dim]) continue;
    any = true;
    const double d = values[s][dim] - mean;
    if (variance == 0.0) {
      if (d != 0.0) return -kInf;
      total = kInf;
      continue;
    }
    if (total == kInf) continue;
    total += -0.5 * (d * d / variance + std::log(2.0 * 3.14159265358979323846 * variance));
  }
  return any ? total : 0.0;
}

// Discounted pursue-then-finish value accumulated by explicit loop.
inline double discounted_reach_value(int move_steps, double discount, double step_reward,
                                     double final_reward, bool include_final_step_cost) {
  double total = 0.0;
  double scale = 1.0;
  for (int t = 0; t < move_steps; ++t) {
    total += scale * step_reward;
    scale *= discount;
  }
  if (include_final_step_cost) total += scale * step_reward;
  total += scale * final_reward;
  return total;
}

}  // namespace oracle
