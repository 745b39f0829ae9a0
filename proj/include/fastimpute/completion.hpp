#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fastimpute/features.hpp"
#include "fastimpute/objective.hpp"
#include "fastimpute/observed.hpp"
#include "fastimpute/sphere.hpp"

namespace fastimpute {

struct CompletionReport {
  Eigen::MatrixXd filled;  // n x m; empty in prediction-only runs
  std::int64_t k_used = 0;
  std::optional<double> mape_train;
  std::optional<double> mape_holdout;
  std::vector<std::int64_t> empty_rows;  // zero-filled, flagged
  std::vector<std::string> flags;
  std::int64_t block_count = 1;
  double ms_warmstart_descent = 0.0;
  double ms_fill = 0.0;
  double ms_total = 0.0;
  std::vector<StepRecord> trace;
};

// Final per-row ridge fill: with V* = S*B,
//   x_i = V*' (I_k/gamma + V*_i V*_i')^{-1} V*_i a_i
// over row i's observed columns. Rows with no observed entries are
// zero-filled and reported through `empty_rows`.
Eigen::MatrixXd fill_rows(const SphereCoefficients& s_star,
                          const ObservedMatrix& obs,
                          const FeatureMatrix& features, double gamma,
                          std::vector<std::int64_t>* empty_rows = nullptr,
                          int threads = 1);

// Predictions at the requested (row, col) positions, without
// materializing the dense fill.
std::vector<double> predict_entries(
    const SphereCoefficients& s_star, const ObservedMatrix& obs,
    const FeatureMatrix& features, double gamma,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& requests);

// Mean of |est - truth| / |truth| over evaluated entries; entries with
// |truth| < 1e-9 are excluded (count reported via `excluded`). Throws
// NumericError when everything is excluded.
double mape(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth,
            std::int64_t* excluded = nullptr);
double mape(const Eigen::MatrixXd& estimate, const std::vector<Entry>& truth,
            std::int64_t* excluded = nullptr);

struct PipelineOptions {
  std::int64_t block_size = 1000;  // identity-feature path only
  // -1 auto (transpose when n < m), 0 never, 1 always; identity path only.
  int transpose_mode = -1;
  bool subsample = true;  // false: full-gradient descent
  bool materialize = true;
};

// End-to-end solve: the blocked identity pipeline when `features` is the
// identity sentinel, otherwise a single stochastic (or full) descent
// plus the final fill.
CompletionReport run_pipeline(const ObservedMatrix& obs,
                              const FeatureMatrix& features, std::int64_t k,
                              const DescentConfig& config,
                              const PipelineOptions& options,
                              std::uint64_t seed);

struct RankCandidate {
  std::int64_t k = 0;
  double validation_mape = 0.0;
  bool failed = false;
  std::string error;
};

struct RankChoice {
  std::int64_t k_star = 0;
  std::vector<RankCandidate> table;
};

// Holds out 20% of the observed entries, runs the pipeline per candidate
// rank on the rest, and returns the rank with the lowest holdout MAPE
// (ties within 1e-12 go to the smaller rank).
RankChoice select_rank(const ObservedMatrix& obs, const FeatureMatrix& features,
                       const std::vector<std::int64_t>& candidate_ks,
                       const DescentConfig& config,
                       const PipelineOptions& options, std::uint64_t seed);

}  // namespace fastimpute
