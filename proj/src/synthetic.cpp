#include "fastimpute/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "fastimpute/errors.hpp"
#include "fastimpute/rng.hpp"

namespace fastimpute {

SyntheticInstance generate_synthetic(const SyntheticParams& params) {
  const auto [n, m, p, k] = std::tuple(params.n, params.m, params.p, params.k);
  if (n <= 0 || m <= 0 || p <= 0 || k <= 0)
    throw ParameterError("generate_synthetic: dimensions must be positive");
  if (k > std::min({p, n, m}))
    throw ParameterError("generate_synthetic: k must be <= min(p, n, m)");
  if (!(params.mu >= 0.0 && params.mu < 1.0))
    throw ParameterError("generate_synthetic: mu must be in [0, 1)");
  if (params.identity_features && p != m)
    throw ParameterError("generate_synthetic: identity features require p == m");

  Rng rng(params.seed);
  // Factor fill order is fixed (U row-major, then S, then B) so a seed
  // pins the instance exactly.
  Eigen::MatrixXd u(n, k);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t r = 0; r < k; ++r) u(i, r) = rng.uniform01();
  Eigen::MatrixXd s(k, p);
  for (std::int64_t r = 0; r < k; ++r)
    for (std::int64_t j = 0; j < p; ++j) s(r, j) = rng.uniform01();

  Eigen::MatrixXd truth;
  FeatureMatrix features = FeatureMatrix::identity(m);
  if (params.identity_features) {
    truth = u * s;
  } else {
    Eigen::MatrixXd b(p, m);
    for (std::int64_t r = 0; r < p; ++r)
      for (std::int64_t j = 0; j < m; ++j) b(r, j) = rng.uniform01();
    truth = u * (s * b);
    features = FeatureMatrix::dense(std::move(b));
  }

  const std::int64_t total = n * m;
  const std::int64_t kept =
      std::llround((1.0 - params.mu) * static_cast<double>(total));
  auto picks = rng.derive(0x6d61736bULL).sample(total, kept, /*sorted=*/true);

  std::vector<Entry> entries;
  entries.reserve(kept);
  for (auto flat : picks) {
    const std::int64_t i = flat / m;
    const std::int32_t j = static_cast<std::int32_t>(flat % m);
    entries.push_back({i, j, truth(i, j)});
  }
  auto observed = ObservedMatrix::from_entries(n, m, std::move(entries));
  return {std::move(truth), std::move(observed), std::move(features), params};
}

}  // namespace fastimpute
