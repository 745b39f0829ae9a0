#include "fastimpute/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fastimpute/errors.hpp"

namespace fastimpute {

SampleSizes initial_sizes(std::int64_t n, std::int64_t m, std::int64_t p,
                          std::int64_t k, double alpha) {
  if (n <= 0 || m <= 0 || p <= 0 || k <= 0)
    throw ParameterError("initial_sizes: dimensions must be positive");
  if (!(alpha > 0.0)) throw ParameterError("initial_sizes: alpha must be > 0");
  SampleSizes sz;
  sz.m0 = std::min<std::int64_t>(2 * p, m);
  const double root = std::sqrt(static_cast<double>(n) * static_cast<double>(m));
  const double raw = static_cast<double>(k) * root * std::log(root) /
                     (8.0 * static_cast<double>(sz.m0) * alpha);
  sz.n0 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(raw)),
                                   1, n);
  return sz;
}

AdaptiveSampler::AdaptiveSampler(std::int64_t n, std::int64_t m, std::int64_t p,
                                 std::int64_t k, double alpha, int patience,
                                 std::uint64_t seed)
    : n_(n),
      m_(m),
      patience_(patience),
      eta_best_(std::numeric_limits<double>::infinity()),
      rng_(seed) {
  if (patience < 1) throw ParameterError("AdaptiveSampler: patience must be >= 1");
  const SampleSizes sz = initial_sizes(n, m, p, k, alpha);
  plan_.m_t = sz.m0;
  plan_.n_t = sz.n0;
  plan_.q = 0;
  plan_.rows.resize(sz.n0);
  std::iota(plan_.rows.begin(), plan_.rows.end(), std::int64_t{0});
  plan_.cols.resize(sz.m0);
  std::iota(plan_.cols.begin(), plan_.cols.end(), std::int32_t{0});
}

void AdaptiveSampler::override_row_count(std::int64_t n_t) {
  if (n_t < 1 || n_t > n_)
    throw ParameterError("AdaptiveSampler: row count out of range");
  plan_.n_t = n_t;
  plan_.rows.resize(n_t);
  std::iota(plan_.rows.begin(), plan_.rows.end(), std::int64_t{0});
}

const SamplePlan& AdaptiveSampler::adapt(double eta_t) {
  if (eta_t >= eta_best_) {
    ++q_;
  } else {
    eta_best_ = eta_t;
    q_ = 0;
  }
  // The doubling fires on exactly the `patience`-th consecutive
  // non-improving step.
  if (q_ >= patience_) {
    q_ = 0;
    plan_.n_t = std::min(2 * plan_.n_t, n_);
  }
  plan_.q = q_;

  plan_.rows = rng_.sample(n_, plan_.n_t);
  auto cols64 = rng_.sample(m_, plan_.m_t);
  plan_.cols.assign(cols64.begin(), cols64.end());
  return plan_;
}

}  // namespace fastimpute
