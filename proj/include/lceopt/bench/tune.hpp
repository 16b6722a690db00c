#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lceopt/bench/config.hpp"
#include "lceopt/bench/runner.hpp"
#include "lceopt/cross_entropy.hpp"
#include "lceopt/solver.hpp"

namespace lceopt::bench {

struct TuneRange {
  double lo = 0.0;
  double hi = 0.0;

  double midpoint() const { return 0.5 * (lo + hi); }
  double initial_variance() const {
    const double quarter = (hi - lo) / 4.0;
    return quarter * quarter;
  }
  double clamp(double value) const { return std::clamp(value, lo, hi); }
};

// Search space and budget for solver-parameter tuning. The widest permitted
// ranges are the defaults; narrower sub-ranges (including single points) are
// accepted, anything wider is rejected.
struct TuneOptions {
  TuneRange candidates{10.0, 100.0};
  TuneRange trajectories{1.0, 500.0};
  TuneRange elites{1.0, 500.0};
  TuneRange depth{1.0, 10.0};
  TuneRange smoothing{0.0, 1.0};
  TuneRange sigma2_init{0.01, 4.0};
  int ce_iterations = 100;
  int episodes_per_eval = 20;
  int tune_candidates = 20;  // configurations sampled per tuning iteration
  int tune_elites = 5;
  double tune_smoothing = 0.8;
  std::uint64_t seed = 1;

  void validate() const {
    const TuneOptions widest;
    const auto check = [](const TuneRange& range, const TuneRange& bound, const char* field) {
      if (!(range.lo <= range.hi)) throw ConfigError(field, "range lower bound exceeds upper");
      if (range.lo < bound.lo || range.hi > bound.hi)
        throw ConfigError(field, "range outside the supported search window");
    };
    check(candidates, widest.candidates, "tune.candidates");
    check(trajectories, widest.trajectories, "tune.trajectories");
    check(elites, widest.elites, "tune.elites");
    check(depth, widest.depth, "tune.depth");
    check(smoothing, widest.smoothing, "tune.smoothing");
    check(sigma2_init, widest.sigma2_init, "tune.sigma2_init");
    if (ce_iterations < 1) throw ConfigError("tune.ce_iterations", "must be >= 1");
    if (episodes_per_eval < 1) throw ConfigError("tune.episodes_per_eval", "must be >= 1");
    if (tune_candidates < 1) throw ConfigError("tune.tune_candidates", "must be >= 1");
    if (tune_elites < 1 || tune_elites > tune_candidates)
      throw ConfigError("tune.tune_elites", "must be in [1, tune_candidates]");
    if (!(tune_smoothing > 0.0 && tune_smoothing <= 1.0))
      throw ConfigError("tune.tune_smoothing", "must be in (0,1]");
  }
};

namespace detail {

inline TuneRange parse_range(const json& section, const std::string& path, const char* key,
                             TuneRange fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section.at(key);
  if (v.is_number()) {
    const double point = v.get<double>();
    return {point, point};
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(path + "." + key, "expected a number or a [lo, hi] pair");
}

constexpr double kSmoothingFloor = 1e-3;  // smallest usable smoothing weight

}  // namespace detail

inline TuneOptions parse_tune_options(const json& section, TuneOptions base = {}) {
  detail::require_object(section, "tune");
  detail::reject_unknown_keys(section, "tune",
                              {"candidates", "trajectories", "elites", "depth", "smoothing",
                               "sigma2_init", "ce_iterations", "episodes_per_eval",
                               "tune_candidates", "tune_elites", "tune_smoothing", "seed"});
  TuneOptions options = base;
  options.candidates = detail::parse_range(section, "tune", "candidates", options.candidates);
  options.trajectories =
      detail::parse_range(section, "tune", "trajectories", options.trajectories);
  options.elites = detail::parse_range(section, "tune", "elites", options.elites);
  options.depth = detail::parse_range(section, "tune", "depth", options.depth);
  options.smoothing = detail::parse_range(section, "tune", "smoothing", options.smoothing);
  options.sigma2_init = detail::parse_range(section, "tune", "sigma2_init", options.sigma2_init);
  options.ce_iterations = static_cast<int>(
      detail::integer_field(section, "tune", "ce_iterations", options.ce_iterations));
  options.episodes_per_eval = static_cast<int>(
      detail::integer_field(section, "tune", "episodes_per_eval", options.episodes_per_eval));
  options.tune_candidates = static_cast<int>(
      detail::integer_field(section, "tune", "tune_candidates", options.tune_candidates));
  options.tune_elites = static_cast<int>(
      detail::integer_field(section, "tune", "tune_elites", options.tune_elites));
  options.tune_smoothing =
      detail::number_field(section, "tune", "tune_smoothing", options.tune_smoothing);
  options.seed = static_cast<std::uint64_t>(
      detail::integer_field(section, "tune", "seed", static_cast<std::int64_t>(options.seed)));
  options.validate();
  return options;
}

namespace detail {

inline int round_to_range(double value, const TuneRange& range) {
  return static_cast<int>(std::lround(range.clamp(value)));
}

// Project a raw 6-vector onto a valid SolverConfig: box-clamp, round the
// integer knobs, keep smoothing usable, and repair elites > candidates by
// clamping down. Budget, particle count, variant, and floors come from base.
inline SolverConfig realize_config(const double* raw, const SolverConfig& base,
                                   const TuneOptions& options) {
  SolverConfig config = base;
  config.candidates = round_to_range(raw[0], options.candidates);
  config.trajectories = round_to_range(raw[1], options.trajectories);
  config.elites = round_to_range(raw[2], options.elites);
  config.depth = round_to_range(raw[3], options.depth);
  config.smoothing =
      std::max(options.smoothing.clamp(raw[4]), kSmoothingFloor);
  config.sigma2_init = options.sigma2_init.clamp(raw[5]);
  config.elites = std::min(config.elites, config.candidates);
  return config;
}

}  // namespace detail

struct TuneResult {
  SolverConfig best;
  double objective = 0.0;  // mean return of the tuned config on the eval seeds
  int iterations = 0;
  int evaluations = 0;
};

// Cross-entropy search over the 6 solver knobs (candidates, trajectories,
// elites, depth, smoothing, sigma2_init). The search distribution starts at
// the range midpoints with (range/4)^2 variance; every candidate is scored
// on the same episode seeds (common random numbers); the tuned config is the
// final distribution mean after rounding and repair.
template <ScenarioLike S>
TuneResult tune_solver(const S& scenario, const SolverConfig& base, const TuneOptions& options) {
  options.validate();
  constexpr int kDims = 6;
  const PolicyTreeShape chain(kDims - 1, 1, 1);  // six scalar blocks
  const TuneRange* ranges[kDims] = {&options.candidates, &options.trajectories, &options.elites,
                                    &options.depth,      &options.smoothing,    &options.sigma2_init};
  DiagonalGaussian dist = DiagonalGaussian::broadcast(kDims, 0.0, 0.0);
  for (int i = 0; i < kDims; ++i) {
    dist.mean[static_cast<std::size_t>(i)] = ranges[i]->midpoint();
    dist.variance[static_cast<std::size_t>(i)] = ranges[i]->initial_variance();
  }

  std::vector<std::uint64_t> eval_seeds;
  eval_seeds.reserve(static_cast<std::size_t>(options.episodes_per_eval));
  for (int i = 0; i < options.episodes_per_eval; ++i)
    eval_seeds.push_back(mix_seed(options.seed, 0x74756e65ULL) + static_cast<std::uint64_t>(i));

  int evaluations = 0;
  const auto objective = [&](const SolverConfig& config) {
    double total = 0.0;
    for (std::uint64_t seed : eval_seeds)
      total += run_episode(scenario, config, seed).discounted_return;
    ++evaluations;
    return total / static_cast<double>(eval_seeds.size());
  };

  std::vector<ScoredSample> batch;
  batch.reserve(static_cast<std::size_t>(options.tune_candidates));
  for (int c = 0; c < options.tune_candidates; ++c)
    batch.emplace_back(PolicyParameterVector(chain), 0.0);

  for (int iteration = 0; iteration < options.ce_iterations; ++iteration) {
    for (int c = 0; c < options.tune_candidates; ++c) {
      ScoredSample& sample = batch[static_cast<std::size_t>(c)];
      sample.theta.reset();
      RngStream rng(mix_seed(options.seed, static_cast<std::uint64_t>(iteration),
                             static_cast<std::uint64_t>(c), 0x74756e6500000001ULL));
      sample_full_into(sample.theta, dist, rng);
      const SolverConfig candidate =
          detail::realize_config(sample.theta.raw_values(), base, options);
      sample.set_value(objective(candidate));
    }
    const EliteSet elite = select_elites(batch, options.tune_elites);
    dist = update_basic(dist, elite, options.tune_smoothing);
  }

  TuneResult result;
  result.best = detail::realize_config(dist.mean.data(), base, options);
  result.objective = objective(result.best);
  result.iterations = options.ce_iterations;
  result.evaluations = evaluations;
  return result;
}

inline TuneResult cmd_tune(const RunConfig& config, const TuneOptions& options) {
  return with_scenario(config.scenario, [&](const auto& scenario) {
    return tune_solver(scenario, config.solver, options);
  });
}

inline json tune_result_to_json(const TuneResult& result) {
  return json{{"solver", solver_to_json(result.best)},
              {"objective_mean_return", result.objective},
              {"ce_iterations", result.iterations},
              {"evaluations", result.evaluations}};
}

}  // namespace lceopt::bench
