#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "lceopt/pomdp.hpp"
#include "lceopt/solver.hpp"

namespace lceopt::bench {

// Batch aggregate over episode records. With fewer than two episodes the
// confidence half-width is undefined and carried as NaN (serialized null).
struct BatchStats {
  double mean_return = 0.0;
  double ci95_halfwidth = std::numeric_limits<double>::quiet_NaN();
  int n = 0;
  double mean_steps = 0.0;
  double failure_rate = 0.0;
};

inline BatchStats compute_batch_stats(std::span<const EpisodeRecord> records) {
  if (records.empty()) throw std::invalid_argument("compute_batch_stats: no records");
  BatchStats stats;
  stats.n = static_cast<int>(records.size());
  double return_sum = 0.0;
  double step_sum = 0.0;
  int failures = 0;
  for (const EpisodeRecord& r : records) {
    return_sum += r.discounted_return;
    step_sum += static_cast<double>(r.steps);
    if (r.termination == Termination::Failure) ++failures;
  }
  const double n = static_cast<double>(stats.n);
  stats.mean_return = return_sum / n;
  stats.mean_steps = step_sum / n;
  stats.failure_rate = static_cast<double>(failures) / n;
  if (stats.n >= 2) {
    double sq = 0.0;
    for (const EpisodeRecord& r : records) {
      const double d = r.discounted_return - stats.mean_return;
      sq += d * d;
    }
    const double sample_std = std::sqrt(sq / (n - 1.0));
    stats.ci95_halfwidth = 1.96 * sample_std / std::sqrt(n);
  }
  return stats;
}

inline nlohmann::json batch_stats_to_json(const BatchStats& stats) {
  nlohmann::json out{{"mean_return", stats.mean_return},
                     {"n", stats.n},
                     {"mean_steps", stats.mean_steps},
                     {"failure_rate", stats.failure_rate}};
  if (std::isnan(stats.ci95_halfwidth))
    out["ci95_halfwidth"] = nullptr;
  else
    out["ci95_halfwidth"] = stats.ci95_halfwidth;
  return out;
}

// One (variant, depth) cell of the CPU-time study: mean seconds to complete
// the fixed iteration count, averaged over the measured planning steps.
struct TimingCell {
  PolicyVariant variant = PolicyVariant::Lazy;
  int depth = 1;
  double mean_cpu_seconds = 0.0;
  int planning_steps = 0;
};

struct TimingReport {
  std::string scenario;
  int iterations = 0;
  std::vector<TimingCell> cells;

  // basic / lazy mean-time ratio at the given depth; requires both cells.
  double ratio_at_depth(int depth) const {
    double lazy = -1.0, basic = -1.0;
    for (const TimingCell& cell : cells) {
      if (cell.depth != depth) continue;
      (cell.variant == PolicyVariant::Lazy ? lazy : basic) = cell.mean_cpu_seconds;
    }
    if (lazy < 0.0 || basic < 0.0)
      throw std::invalid_argument("ratio_at_depth: missing variant cell");
    if (lazy == 0.0) return std::numeric_limits<double>::infinity();
    return basic / lazy;
  }
};

inline nlohmann::json timing_report_to_json(const TimingReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const TimingCell& cell : report.cells)
    cells.push_back({{"variant", to_string(cell.variant)},
                     {"depth", cell.depth},
                     {"mean_cpu_seconds", cell.mean_cpu_seconds},
                     {"planning_steps", cell.planning_steps}});
  return nlohmann::json{
      {"scenario", report.scenario}, {"iterations", report.iterations}, {"cells", cells}};
}

}  // namespace lceopt::bench
