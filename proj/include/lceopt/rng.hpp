#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace lceopt {

// Stateless seed mixing (splitmix64). Used to derive independent substreams
// from (seed, stream-id...) tuples so results never depend on evaluation order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return h;
}

// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

// Inverse standard normal CDF (Acklam's rational approximation with one
// Halley refinement; relative error near machine precision on (0,1)).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p outside (0,1)");
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * 2.5066282746310002 * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

// Deterministic random stream. All draws are pure functions of the seed and
// the number of values consumed so far; no shared or global state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0,1); 53-bit resolution.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Gaussian via inverse-CDF transform of a single uniform; one draw consumed
  // per value regardless of parameters.
  double normal(double mean, double stddev) {
    const double z = normal_quantile(uniform01());
    return mean + stddev * z;
  }

  // Index in [0, n).
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
  }

 private:
  std::mt19937_64 engine_;
};

// Truncated Gaussian sampled by inverse-CDF on the truncated interval; the
// interval CDF values are precomputed once so per-draw cost stays flat.
class TruncatedNormal {
 public:
  TruncatedNormal(double mean, double stddev, double lo, double hi)
      : mean_(mean), stddev_(stddev), lo_(lo), hi_(hi) {
    if (!(lo < hi)) throw std::invalid_argument("TruncatedNormal: lo >= hi");
    if (stddev < 0.0) throw std::invalid_argument("TruncatedNormal: negative stddev");
    if (stddev_ > 0.0) {
      cdf_lo_ = normal_cdf((lo_ - mean_) / stddev_);
      cdf_span_ = normal_cdf((hi_ - mean_) / stddev_) - cdf_lo_;
    }
  }

  double sample(RngStream& rng) const {
    const double u = rng.uniform01();
    if (stddev_ == 0.0 || cdf_span_ <= 0.0) return clamp_(mean_);
    const double z = normal_quantile(cdf_lo_ + u * cdf_span_);
    return clamp_(mean_ + stddev_ * z);
  }

 private:
  double clamp_(double x) const { return x < lo_ ? lo_ : (x > hi_ ? hi_ : x); }

  double mean_;
  double stddev_;
  double lo_;
  double hi_;
  double cdf_lo_ = 0.0;
  double cdf_span_ = 1.0;
};

}  // namespace lceopt
