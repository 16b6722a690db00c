#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "lceopt/policy_tree.hpp"
#include "lceopt/rng.hpp"

namespace lceopt {

// Independent Gaussian over each parameter dimension.
struct DiagonalGaussian {
  std::vector<double> mean;
  std::vector<double> variance;

  DiagonalGaussian() = default;
  DiagonalGaussian(std::vector<double> mean_, std::vector<double> variance_)
      : mean(std::move(mean_)), variance(std::move(variance_)) {
    validate();
  }

  static DiagonalGaussian broadcast(std::int64_t dim, double mean_value, double variance_value) {
    if (dim <= 0) throw std::invalid_argument("DiagonalGaussian: dim must be positive");
    if (variance_value < 0.0) throw std::invalid_argument("DiagonalGaussian: negative variance");
    DiagonalGaussian d;
    d.mean.assign(static_cast<std::size_t>(dim), mean_value);
    d.variance.assign(static_cast<std::size_t>(dim), variance_value);
    return d;
  }

  std::int64_t dim() const { return static_cast<std::int64_t>(mean.size()); }

  void validate() const {
    if (mean.size() != variance.size())
      throw std::invalid_argument("DiagonalGaussian: mean/variance size mismatch");
    for (double v : variance) {
      if (!(v >= 0.0) || std::isnan(v))
        throw std::invalid_argument("DiagonalGaussian: variance must be non-negative");
    }
  }
};

// A candidate parameter vector with its Monte Carlo value estimate. NaN
// values are rejected at construction so ordering is always total.
struct ScoredSample {
  PolicyParameterVector theta;
  double value;

  ScoredSample(PolicyParameterVector theta_, double value_)
      : theta(std::move(theta_)), value(value_) {
    if (std::isnan(value)) throw std::invalid_argument("ScoredSample: NaN value");
  }

  void set_value(double v) {
    if (std::isnan(v)) throw std::invalid_argument("ScoredSample: NaN value");
    value = v;
  }
};

// Elite subset ordered best-first; members point into the scored batch.
struct EliteSet {
  std::vector<const ScoredSample*> members;

  std::size_t size() const { return members.size(); }
};

// Exactly the top-K by value. Ties break by batch position (stable), so the
// result is independent of any sorting implementation detail.
inline EliteSet select_elites(std::span<const ScoredSample> batch, int elite_count) {
  if (elite_count <= 0) throw std::invalid_argument("select_elites: elite_count must be positive");
  if (batch.empty()) throw std::invalid_argument("select_elites: empty batch");
  if (static_cast<std::size_t>(elite_count) > batch.size())
    throw std::invalid_argument("select_elites: elite_count exceeds batch size");
  const std::size_t k = static_cast<std::size_t>(elite_count);
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return batch[a].value > batch[b].value; });
  EliteSet elites;
  elites.members.reserve(k);
  for (std::size_t i = 0; i < k; ++i) elites.members.push_back(&batch[order[i]]);
  return elites;
}

// Draws every dimension; one Gaussian draw per dimension in index order.
inline std::vector<double> sample_full(const DiagonalGaussian& dist, RngStream& rng) {
  std::vector<double> out(dist.mean.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = rng.normal(dist.mean[i], std::sqrt(dist.variance[i]));
  return out;
}

// In-place variant used by the planner to reuse candidate storage.
inline void sample_full_into(PolicyParameterVector& theta, const DiagonalGaussian& dist,
                             RngStream& rng) {
  if (dist.dim() != theta.shape().parameter_dim())
    throw std::invalid_argument("sample_full_into: dimension mismatch");
  double* values = theta.raw_values();
  for (std::int64_t i = 0; i < dist.dim(); ++i)
    values[i] = rng.normal(dist.mean[static_cast<std::size_t>(i)],
                           std::sqrt(dist.variance[static_cast<std::size_t>(i)]));
  theta.mark_all_present();
}

// Lazy node sampling: a present block is returned untouched (no draws); an
// absent one is drawn from its marginal, stored, and fixed for the lifetime
// of the candidate.
inline std::span<const double> sample_node_lazy(PolicyParameterVector& theta, NodeIndex node,
                                                const DiagonalGaussian& dist, RngStream& rng) {
  if (dist.dim() != theta.shape().parameter_dim())
    throw std::invalid_argument("sample_node_lazy: dimension mismatch");
  if (theta.is_present(node)) return theta.action_block(node);
  const int d = theta.shape().action_dim;
  const std::int64_t base = node * d;
  std::span<double> block = theta.set_action_block(node);
  for (int i = 0; i < d; ++i) {
    const std::size_t dim = static_cast<std::size_t>(base + i);
    block[i] = rng.normal(dist.mean[dim], std::sqrt(dist.variance[dim]));
  }
  return block;
}

// Per-dimension elite statistics. Variance uses the population (biased)
// divisor, matching the maximum-likelihood fit the update performs.
struct MarginalFit {
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<std::int64_t> counts;
};

// Fit over only the elites where each dimension is present; dimensions with
// zero support keep count 0 and unspecified statistics. Iteration is
// elite-major over present node blocks so the cost scales with what the
// elites actually visited, not with the full parameter dimension — and per
// dimension the accumulation order over elites matches fit_full exactly, so
// fully present elites reproduce its results bit for bit.
inline MarginalFit fit_marginals(const EliteSet& elites, std::int64_t dim) {
  if (elites.members.empty()) throw std::invalid_argument("fit_marginals: empty elite set");
  const PolicyTreeShape& shape = elites.members.front()->theta.shape();
  if (shape.parameter_dim() != dim)
    throw std::invalid_argument("fit_marginals: dimension mismatch");
  const std::int64_t nodes = shape.node_count();
  const int d = shape.action_dim;
  MarginalFit fit;
  fit.mean.assign(static_cast<std::size_t>(dim), 0.0);
  fit.variance.assign(static_cast<std::size_t>(dim), 0.0);
  fit.counts.assign(static_cast<std::size_t>(dim), 0);
  for (const ScoredSample* s : elites.members) {
    for (std::int64_t node = 0; node < nodes; ++node) {
      if (!s->theta.is_present(node)) continue;
      const std::span<const double> block = s->theta.action_block(node);
      const std::size_t base = static_cast<std::size_t>(node) * static_cast<std::size_t>(d);
      for (int i = 0; i < d; ++i) {
        fit.mean[base + static_cast<std::size_t>(i)] += block[static_cast<std::size_t>(i)];
        ++fit.counts[base + static_cast<std::size_t>(i)];
      }
    }
  }
  for (std::int64_t i = 0; i < dim; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    if (fit.counts[ui] > 0) fit.mean[ui] /= static_cast<double>(fit.counts[ui]);
  }
  for (const ScoredSample* s : elites.members) {
    for (std::int64_t node = 0; node < nodes; ++node) {
      if (!s->theta.is_present(node)) continue;
      const std::span<const double> block = s->theta.action_block(node);
      const std::size_t base = static_cast<std::size_t>(node) * static_cast<std::size_t>(d);
      for (int i = 0; i < d; ++i) {
        const std::size_t ui = base + static_cast<std::size_t>(i);
        const double diff = block[static_cast<std::size_t>(i)] - fit.mean[ui];
        fit.variance[ui] += diff * diff;
      }
    }
  }
  for (std::int64_t i = 0; i < dim; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    if (fit.counts[ui] > 0) fit.variance[ui] /= static_cast<double>(fit.counts[ui]);
  }
  return fit;
}

// Full-presence fit; the independent route the basic update takes.
inline MarginalFit fit_full(const EliteSet& elites, std::int64_t dim) {
  if (elites.members.empty()) throw std::invalid_argument("fit_full: empty elite set");
  for (const ScoredSample* s : elites.members)
    if (!s->theta.fully_present())
      throw std::invalid_argument("fit_full: elite with absent components");
  MarginalFit fit;
  fit.mean.assign(static_cast<std::size_t>(dim), 0.0);
  fit.variance.assign(static_cast<std::size_t>(dim), 0.0);
  fit.counts.assign(static_cast<std::size_t>(dim), static_cast<std::int64_t>(elites.size()));
  const double n = static_cast<double>(elites.size());
  for (std::int64_t i = 0; i < dim; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    double sum = 0.0;
    for (const ScoredSample* s : elites.members) sum += s->theta.component(i);
    const double mu = sum / n;
    double sq = 0.0;
    for (const ScoredSample* s : elites.members) {
      const double d = s->theta.component(i) - mu;
      sq += d * d;
    }
    fit.mean[ui] = mu;
    fit.variance[ui] = sq / n;
  }
  return fit;
}

namespace detail {

inline void blend_dimension(double& mean, double& variance, double fit_mean, double fit_variance,
                            double smoothing) {
  mean = (1.0 - smoothing) * mean + smoothing * fit_mean;
  variance = (1.0 - smoothing) * variance + smoothing * fit_variance;
}

inline void check_update_args(const DiagonalGaussian& dist, double smoothing,
                              double variance_floor) {
  if (!(smoothing > 0.0 && smoothing <= 1.0))
    throw std::invalid_argument("distribution update: smoothing outside (0,1]");
  if (variance_floor < 0.0)
    throw std::invalid_argument("distribution update: negative variance floor");
  dist.validate();
}

}  // namespace detail

// Smoothed maximum-likelihood update from fully present elites.
inline DiagonalGaussian update_basic(const DiagonalGaussian& dist, const EliteSet& elites,
                                     double smoothing, double variance_floor = 1e-8) {
  detail::check_update_args(dist, smoothing, variance_floor);
  const MarginalFit fit = fit_full(elites, dist.dim());
  DiagonalGaussian out = dist;
  for (std::int64_t i = 0; i < dist.dim(); ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    detail::blend_dimension(out.mean[ui], out.variance[ui], fit.mean[ui], fit.variance[ui],
                            smoothing);
    out.variance[ui] = std::max(out.variance[ui], variance_floor);
  }
  return out;
}

// Marginal-likelihood update: each dimension is fitted over only the elites
// where it is present; unsupported dimensions pass through unchanged.
inline DiagonalGaussian update_lazy(const DiagonalGaussian& dist, const EliteSet& elites,
                                    double smoothing, double variance_floor = 1e-8) {
  detail::check_update_args(dist, smoothing, variance_floor);
  const MarginalFit fit = fit_marginals(elites, dist.dim());
  DiagonalGaussian out = dist;
  for (std::int64_t i = 0; i < dist.dim(); ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    if (fit.counts[ui] == 0) continue;
    detail::blend_dimension(out.mean[ui], out.variance[ui], fit.mean[ui], fit.variance[ui],
                            smoothing);
    out.variance[ui] = std::max(out.variance[ui], variance_floor);
  }
  return out;
}

}  // namespace lceopt
