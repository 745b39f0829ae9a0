#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "fastimpute/features.hpp"
#include "fastimpute/objective.hpp"
#include "fastimpute/observed.hpp"
#include "fastimpute/scheduler.hpp"

namespace fastimpute {

struct DescentConfig {
  double theta = std::numbers::pi / 64.0;  // fixed rotation angle
  int t_max = 50;
  double gamma = 1e6;
  int patience = 5;
  double warmstart_threshold = 0.5;
  int threads = 1;
};

// Top-k right singular vectors (k x m) of the zero-filled observed
// matrix, by seeded subspace iteration on the sparse storage. Never
// forms a dense matrix.
Eigen::MatrixXd topk_right_singular(const ObservedMatrix& obs, std::int64_t k,
                                    std::uint64_t seed, int max_iters = 80,
                                    double tol = 1e-8);

// Starting point: SVD-based when the fill fraction exceeds `threshold`
// (least-squares fit onto the row space of B for general features),
// otherwise a seeded random matrix. Unit Frobenius norm in all branches.
SphereCoefficients warmstart(const ObservedMatrix& obs,
                             const FeatureMatrix& features, std::int64_t k,
                             double threshold, std::uint64_t seed);

// G_t + ((t-1)/(t+2)) * accel_prev; the coefficient is exactly zero at
// t = 1.
Eigen::MatrixXd nesterov_accumulate(const Eigen::MatrixXd& g,
                                    const Eigen::MatrixXd& accel_prev, int t);

// Descent direction on the sphere: -accel + <accel, S> S. Orthogonal to
// S by construction.
Eigen::MatrixXd project_to_tangent(const Eigen::MatrixXd& accel,
                                   const SphereCoefficients& s);

// Great-circle step: S cos(theta) + (d / |d|) sin(theta). A direction
// with |d| < 1e-14 is reported through `converged` and S is returned
// unchanged.
SphereCoefficients rotate_update(const SphereCoefficients& s,
                                 const Eigen::MatrixXd& d, double theta,
                                 bool* converged = nullptr);

struct StepRecord {
  int t = 0;
  double eta = 0.0;
  std::int64_t m_t = 0;
  std::int64_t n_t = 0;
  double wall_ms = 0.0;
};

struct DescentResult {
  SphereCoefficients s_final;  // the last iterate (the algorithm's output)
  SphereCoefficients s_best;   // lowest observed objective along the trace
  double eta_best = 0.0;
  std::vector<StepRecord> trace;
  bool converged_early = false;
};

// The main loop: warmstart, then t_max - 1 accelerated tangent-projected
// rotation steps. With `sampler` null every step uses all rows and
// columns; otherwise each step evaluates on the sampler's current plan.
DescentResult descend(const ObservedMatrix& obs, const FeatureMatrix& features,
                      std::int64_t k, const DescentConfig& config,
                      AdaptiveSampler* sampler, std::uint64_t seed);

}  // namespace fastimpute
