#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "fastimpute/features.hpp"
#include "fastimpute/observed.hpp"

namespace fastimpute {

struct SyntheticParams {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t p = 0;
  std::int64_t k = 0;
  double mu = 0.0;          // missing fraction
  std::uint64_t seed = 0;
  // When true (requires p == m), B is the identity and truth = U * S.
  bool identity_features = false;
};

struct SyntheticInstance {
  Eigen::MatrixXd truth;    // n x m, rank <= k
  ObservedMatrix observed;
  FeatureMatrix features;
  SyntheticParams params;
};

// Rank-k ground truth U*S*B with i.i.d. uniform [0,1] factors; exactly
// round((1-mu)*n*m) entries retained, chosen uniformly without
// replacement. Bit-identical for a given seed.
SyntheticInstance generate_synthetic(const SyntheticParams& params);

}  // namespace fastimpute
