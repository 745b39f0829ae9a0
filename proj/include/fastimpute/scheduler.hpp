#pragma once

#include <cstdint>
#include <vector>

#include "fastimpute/rng.hpp"

namespace fastimpute {

struct SampleSizes {
  std::int64_t m0 = 0;
  std::int64_t n0 = 0;
};

// Starting subsample sizes for the stochastic descent:
//   m0 = min(2p, m)
//   n0 = floor(k * sqrt(nm) * ln(sqrt(nm)) / (8 * m0 * alpha)),
// clamped to [1, n]. Natural logarithm.
SampleSizes initial_sizes(std::int64_t n, std::int64_t m, std::int64_t p,
                          std::int64_t k, double alpha);

struct SamplePlan {
  std::vector<std::int64_t> rows;
  std::vector<std::int32_t> cols;
  std::int64_t m_t = 0;
  std::int64_t n_t = 0;
  int q = 0;  // consecutive non-improving steps after this update
};

// Row/column subsampling with plateau-triggered growth: when `patience`
// consecutive steps fail to improve on the best objective seen, the row
// sample doubles (capped at n). The column sample never changes. Fresh
// uniform without-replacement samples are drawn on every adapt() call.
class AdaptiveSampler {
 public:
  AdaptiveSampler(std::int64_t n, std::int64_t m, std::int64_t p,
                  std::int64_t k, double alpha, int patience,
                  std::uint64_t seed);

  // The pre-descent plan: the fixed prefixes {0..m0-1} and {0..n0-1}.
  const SamplePlan& initial_plan() const { return plan_; }

  // Consumes the objective value of the step just taken and produces the
  // plan for the next step.
  const SamplePlan& adapt(double eta_t);

  double eta_best() const { return eta_best_; }
  std::int64_t row_count() const { return plan_.n_t; }
  std::int64_t col_count() const { return plan_.m_t; }

  // Lets callers inject a deliberately small starting row sample.
  void override_row_count(std::int64_t n_t);

 private:
  std::int64_t n_, m_;
  int patience_;
  double eta_best_;
  int q_ = 0;
  SamplePlan plan_;
  Rng rng_;
};

}  // namespace fastimpute
