#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "lceopt/scenarios/conttag.hpp"
#include "lceopt/scenarios/pushbox.hpp"
#include "lceopt/scenarios/toy.hpp"
#include "lceopt/solver.hpp"
#include "support/oracles.hpp"

using namespace lceopt;

namespace {

ContTag::State tag_state(double ax, double ay, double heading, double ox, double oy) {
  return {ax, ay, heading, ox, oy};
}

}  // namespace

TEST_CASE("a tag inside the capture radius ends the pursuit with the bonus") {
  const ContTag scenario;
  RngStream rng(1);
  const auto state = tag_state(2.0, 2.0, 0.0, 2.5, 2.0);
  const std::array<double, 2> tag = {0.0, 0.5};
  const auto outcome = scenario.generate(state, tag, rng);
  CHECK(outcome.reward == 10.0);
  CHECK(outcome.terminal);
  CHECK(outcome.next_state.agent_x == state.agent_x);
  CHECK(outcome.next_state.opponent_x == state.opponent_x);
}

TEST_CASE("a tag from too far is penalized but the pursuit continues") {
  const ContTag scenario;
  RngStream rng(2);
  const auto state = tag_state(2.0, 2.0, 0.0, 4.0, 2.0);
  const std::array<double, 2> tag = {0.0, 1.0};
  const auto outcome = scenario.generate(state, tag, rng);
  CHECK(outcome.reward == -10.0);
  CHECK_FALSE(outcome.terminal);
  CHECK(outcome.next_state.agent_x == state.agent_x);
  CHECK(outcome.next_state.opponent_y == state.opponent_y);
}

TEST_CASE("an opponent directly behind the agent is never detected") {
  const ContTag scenario;
  const auto state = tag_state(5.0, 2.0, 0.0, 3.0, 2.0);
  CHECK(scenario.detection_probability(state) == 0.0);
  CHECK(scenario.observation_probability(state, std::array<double, 2>{}, state,
                                         ContTag::kDetected) == 0.0);
  CHECK(scenario.observation_probability(state, std::array<double, 2>{}, state,
                                         ContTag::kNotDetected) == 1.0);
  RngStream rng(3);
  for (int i = 0; i < 100; ++i) {
    const std::array<double, 2> move = {0.0, -1.0};
    const auto outcome = scenario.generate(state, move, rng);
    // staying on heading keeps the opponent in the rear half-plane
    CHECK(outcome.observation == ContTag::kNotDetected);
  }
}

TEST_CASE("detection probability peaks straight ahead and fades to the cone edge") {
  const ContTag scenario;
  CHECK(scenario.detection_probability(tag_state(2, 2, 0.0, 4, 2)) == doctest::Approx(1.0));
  CHECK(scenario.detection_probability(tag_state(2, 2, 0.0, 2, 4)) == doctest::Approx(0.5));
  CHECK(scenario.detection_probability(tag_state(2, 2, 0.0, 2, 0)) == doctest::Approx(0.5));
}

TEST_CASE("a move into the boundary is cancelled but the turn still happens") {
  const ContTag scenario;
  RngStream rng(4);
  const auto state = tag_state(0.2, 2.0, 0.0, 8.0, 2.0);
  const std::array<double, 2> west = {kPi, -1.0};
  const auto outcome = scenario.generate(state, west, rng);
  CHECK(outcome.reward == -1.0);
  CHECK(outcome.next_state.agent_x == state.agent_x);
  CHECK(outcome.next_state.agent_y == state.agent_y);
  CHECK(outcome.next_state.agent_heading == doctest::Approx(-kPi).epsilon(1e-9));
}

TEST_CASE("a move into the obstacle notch is cancelled") {
  const ContTag scenario;
  CHECK_FALSE(scenario.in_free_space(5.0, 4.0));
  CHECK(scenario.in_free_space(5.0, 3.0));
  RngStream rng(5);
  const auto state = tag_state(5.0, 2.6, kPi / 2.0, 9.0, 2.0);
  const std::array<double, 2> north = {0.0, -1.0};
  const auto outcome = scenario.generate(state, north, rng);
  CHECK(outcome.next_state.agent_x == state.agent_x);
  CHECK(outcome.next_state.agent_y == state.agent_y);
}

TEST_CASE("the opponent flees straight away with bounded positional noise") {
  const ContTag scenario;
  RngStream rng(6);
  const auto state = tag_state(2.0, 2.5, 0.0, 5.0, 2.5);
  const std::array<double, 2> east = {0.0, -1.0};
  const double bound = scenario.params().noise_bound;
  for (int i = 0; i < 500; ++i) {
    const auto outcome = scenario.generate(state, east, rng);
    if (outcome.next_state.opponent_x == state.opponent_x) continue;  // blocked
    CHECK(std::abs(outcome.next_state.opponent_x - (state.opponent_x + 1.0)) <= bound + 1e-12);
    CHECK(std::abs(outcome.next_state.opponent_y - state.opponent_y) <= bound + 1e-12);
  }
}

TEST_CASE("pursuit heuristic values match the discounted closed form") {
  const ContTag scenario;
  CHECK(scenario.heuristic(tag_state(2, 2, 0, 2.5, 2)) == doctest::Approx(10.0));
  CHECK(scenario.heuristic(tag_state(2, 2, 0, 3.5, 2)) == doctest::Approx(8.5));
  CHECK(scenario.heuristic(tag_state(2, 2, 0, 5.5, 2)) == doctest::Approx(5.72125));
  for (int steps = 0; steps <= 50; ++steps) {
    CHECK(conttag_heuristic_value(steps, 0.95, -1.0, 10.0) ==
          doctest::Approx(oracle::discounted_reach_value(steps, 0.95, -1.0, 10.0, false)));
    if (steps > 0)
      CHECK(conttag_heuristic_value(steps, 0.95, -1.0, 10.0) <
            conttag_heuristic_value(steps - 1, 0.95, -1.0, 10.0));
  }
}

TEST_CASE("pursuit episode returns stay inside the reward envelope") {
  const ContTag scenario;
  SolverConfig config;
  config.candidates = 20;
  config.trajectories = 4;
  config.elites = 4;
  config.depth = 1;
  config.budget = Budget::iteration_count(3);
  config.particles = 100;
  const double discount = scenario.spec().discount;
  const double lower = -(1.0 - std::pow(discount, 90)) / (1.0 - discount) -
                       10.0 * std::pow(discount, 89);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto record = run_episode(scenario, config, seed);
    CHECK(record.discounted_return >= lower);
    CHECK(record.discounted_return <= 10.0);
    CHECK(record.steps <= 90);
  }
}

TEST_CASE("initial pursuit beliefs share the known agent pose") {
  const ContTag scenario;
  RngStream rng(7);
  const auto truth = scenario.sample_initial_state(rng);
  CHECK(truth.agent_heading == 0.0);
  const auto belief = scenario.initial_belief(truth, 500, rng);
  REQUIRE(belief.size() == 500);
  for (const auto& p : belief.particles) {
    CHECK(p.agent_x == truth.agent_x);
    CHECK(p.agent_y == truth.agent_y);
    CHECK(p.agent_heading == truth.agent_heading);
    CHECK(scenario.in_free_space(p.opponent_x, p.opponent_y));
  }
}

TEST_CASE("pushing the puck into the goal pays the goal reward and terminates") {
  const Pushbox2D scenario;
  RngStream rng(8);
  Pushbox2D::State state{4.02, 4.02, 6.5, 6.5};
  const std::array<double, 2> nudge = {0.5, 0.5};
  const auto outcome = scenario.generate(state, nudge, rng);
  CHECK(outcome.reward == 990.0);
  CHECK(outcome.terminal);
  CHECK((outcome.observation & 1) == 1);
}

TEST_CASE("a free step keeps the puck still and costs the step penalty") {
  const Pushbox2D scenario;
  RngStream rng(9);
  Pushbox2D::State state{2.0, 2.0, 6.0, 6.0};
  const std::array<double, 2> still = {0.0, 0.0};
  const auto outcome = scenario.generate(state, still, rng);
  CHECK(outcome.reward == -10.0);
  CHECK_FALSE(outcome.terminal);
  CHECK(outcome.next_state.puck_x == 6.0);
  CHECK(outcome.next_state.puck_y == 6.0);
  CHECK((outcome.observation & 1) == 0);
}

TEST_CASE("driving a disk into the boundary ends the episode with the penalty") {
  const Pushbox2D scenario;
  RngStream rng(10);
  Pushbox2D::State state{1.6, 5.0, 6.0, 6.0};
  const std::array<double, 2> west = {-0.5, 0.0};
  const auto outcome = scenario.generate(state, west, rng);
  CHECK(outcome.reward == -1010.0);
  CHECK(outcome.terminal);
}

TEST_CASE("push heuristic values match the discounted closed form") {
  const Pushbox2D scenario;
  CHECK(pushbox_heuristic_value(0, 0.95, -1.0, 100.0) == doctest::Approx(99.0));
  CHECK(pushbox_heuristic_value(1, 0.95, -1.0, 100.0) == doctest::Approx(93.05));
  for (int steps = 0; steps <= 30; ++steps)
    CHECK(pushbox_heuristic_value(steps, 0.95, -1.0, 100.0) ==
          doctest::Approx(oracle::discounted_reach_value(steps, 0.95, -1.0, 100.0, true)));
  Pushbox2D::State state{2.0, 2.0, 2.4, 2.0};
  CHECK(scenario.heuristic(state) == doctest::Approx(99.0));
}

TEST_CASE("bearing bins report the true quadrant at the configured accuracy") {
  const Pushbox2D scenario;
  RngStream rng(11);
  Pushbox2D::State state{2.0, 2.0, 6.0, 6.0};  // puck to the north east
  const std::array<double, 2> still = {0.0, 0.0};
  std::array<int, 4> counts{};
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto outcome = scenario.generate(state, still, rng);
    counts[static_cast<std::size_t>(outcome.observation >> 1)]++;
  }
  const int truth = scenario.true_bearing_bin(state);
  CHECK(truth == 2);
  for (int bin = 0; bin < 4; ++bin) {
    const double expected = bin == truth ? 0.85 : 0.05;
    CHECK(std::abs(counts[static_cast<std::size_t>(bin)] / static_cast<double>(n) - expected) <
          0.02);
  }
}

TEST_CASE("observation likelihoods form a probability distribution") {
  const Pushbox2D scenario;
  RngStream rng(12);
  Pushbox2D::State state{3.0, 3.0, 5.5, 5.0};
  const std::array<double, 2> move = {0.4, 0.3};
  const auto outcome = scenario.generate(state, move, rng);
  double total = 0.0;
  for (int obs = 0; obs < scenario.spec().observation_count; ++obs)
    total += scenario.observation_probability(state, move, outcome.next_state, obs);
  CHECK(total == doctest::Approx(1.0));
  CHECK(scenario.observation_probability(state, move, outcome.next_state,
                                         outcome.observation) > 0.0);
}

TEST_CASE("the puck can never rest outside the arena without a collision firing") {
  const Pushbox2D scenario;
  RngStream rng(13);
  const auto size = scenario.params().arena_size;
  for (int episode = 0; episode < 50; ++episode) {
    auto state = scenario.sample_initial_state(rng);
    for (int step = 0; step < 40; ++step) {
      const std::array<double, 2> action = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      const auto outcome = scenario.generate(state, action, rng);
      const auto& s = outcome.next_state;
      const bool outside = s.puck_x < 0.0 || s.puck_x > size || s.puck_y < 0.0 ||
                           s.puck_y > size;
      if (outside) CHECK(outcome.terminal);
      if (outcome.terminal) break;
      state = s;
    }
  }
}

TEST_CASE("high-dimensional scenario exposes its advertised parameter growth") {
  const SyntheticHighDim scenario;
  CHECK(scenario.spec().action_dim == 12);
  CHECK(scenario.spec().observation_count == 2);
  const PolicyTreeShape shape(5, scenario.spec().observation_count, scenario.spec().action_dim);
  CHECK(shape.parameter_dim() == 756);
}

TEST_CASE("a zero action is free and observations split evenly") {
  const SyntheticHighDim scenario;
  RngStream rng(14);
  const std::vector<double> zero(12, 0.0);
  std::array<int, 2> counts{};
  for (int i = 0; i < 10000; ++i) {
    const auto outcome = scenario.generate({}, zero, rng);
    CHECK(outcome.reward == 0.0);
    CHECK_FALSE(outcome.terminal);
    counts[static_cast<std::size_t>(outcome.observation)]++;
  }
  CHECK(std::abs(counts[0] / 10000.0 - 0.5) < 0.02);
}

TEST_CASE("identical state, action, and stream state replay identical outcomes") {
  const ContTag scenario;
  const auto state = tag_state(2.0, 2.0, 0.3, 6.0, 3.0);
  const std::array<double, 2> move = {0.25, -1.0};
  RngStream a(77), b(77);
  for (int i = 0; i < 20; ++i) {
    const auto oa = scenario.generate(state, move, a);
    const auto ob = scenario.generate(state, move, b);
    CHECK(oa.next_state.opponent_x == ob.next_state.opponent_x);
    CHECK(oa.next_state.opponent_y == ob.next_state.opponent_y);
    CHECK(oa.observation == ob.observation);
    CHECK(oa.reward == ob.reward);
  }
}
