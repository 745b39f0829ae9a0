#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fastimpute/features.hpp"
#include "fastimpute/observed.hpp"

namespace fastimpute {

// The optimization variable: a k x p matrix with unit Frobenius norm.
class SphereCoefficients {
 public:
  // Normalizes to unit Frobenius norm; rejects zero input.
  static SphereCoefficients normalized(Eigen::MatrixXd data);

  std::int64_t k() const { return data_.rows(); }
  std::int64_t p() const { return data_.cols(); }
  const Eigen::MatrixXd& data() const { return data_; }
  double frobenius() const { return data_.norm(); }

 private:
  Eigen::MatrixXd data_;
};

struct ObjectiveValue {
  double cost = 0.0;
  Eigen::MatrixXd gradient;  // k x p
};

struct EvalOptions {
  int threads = 1;
};

// Separable objective over the selected rows and columns:
//   c(S) = (1/|rows|) sum_i  a_i' (I - Vi' (I_k/gamma + Vi Vi')^{-1} Vi) a_i
// with Vi the feature product V = S*B restricted to row i's observed
// columns inside `cols`. Every row term costs one k x k SPD solve; the
// dense m x m form exists only as a test oracle.
//
// Row terms are reduced chunk-by-chunk in a fixed order, so results do
// not depend on the thread count.
double cost(const SphereCoefficients& s, const ObservedMatrix& obs,
            const FeatureMatrix& features, double gamma,
            std::span<const std::int64_t> rows,
            std::span<const std::int32_t> cols, const EvalOptions& opts = {});

// Exact gradient of cost:
//   (1/|rows|) sum_i  -2 gamma * Vi r_i r_i' B_i'
// where r_i is row i's Woodbury residual; shares the per-row solve with
// the cost.
Eigen::MatrixXd gradient(const SphereCoefficients& s, const ObservedMatrix& obs,
                         const FeatureMatrix& features, double gamma,
                         std::span<const std::int64_t> rows,
                         std::span<const std::int32_t> cols,
                         const EvalOptions& opts = {});

// Fused cost + gradient with one solve per row; bit-identical to the
// separate calls.
ObjectiveValue evaluate(const SphereCoefficients& s, const ObservedMatrix& obs,
                        const FeatureMatrix& features, double gamma,
                        std::span<const std::int64_t> rows,
                        std::span<const std::int32_t> cols,
                        const EvalOptions& opts = {});

std::vector<std::int64_t> all_rows(const ObservedMatrix& obs);
std::vector<std::int32_t> all_cols(const ObservedMatrix& obs);

// Number of k x k factorizations performed since process start
// (instrumentation used by tests).
std::int64_t factorization_count();

}  // namespace fastimpute
