#include "fastimpute/sphere.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "fastimpute/errors.hpp"
#include "fastimpute/kernels.hpp"
#include "fastimpute/rng.hpp"

namespace fastimpute {

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& x) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  return qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

Eigen::MatrixXd topk_right_singular(const ObservedMatrix& obs, std::int64_t k,
                                    std::uint64_t seed, int max_iters,
                                    double tol) {
  const std::int64_t n = obs.n_rows();
  const std::int64_t m = obs.n_cols();
  if (k <= 0 || k > std::min(n, m))
    throw ParameterError("topk_right_singular: k out of range");

  Rng rng(seed);
  Eigen::MatrixXd x(m, k);
  for (std::int64_t j = 0; j < m; ++j)
    for (std::int64_t r = 0; r < k; ++r) x(j, r) = rng.normal();
  x = orthonormalize(x);

  Eigen::MatrixXd y(n, k), z(m, k);
  Eigen::VectorXd sv_prev = Eigen::VectorXd::Zero(k);
  for (int iter = 0; iter < max_iters; ++iter) {
    for (std::int64_t i = 0; i < n; ++i) {
      const auto cols = obs.row_cols(i);
      const auto vals = obs.row_values(i);
      for (std::int64_t r = 0; r < k; ++r)
        y(i, r) = kernels::dot_gather(x.col(r).data(), cols.data(),
                                      vals.data(), cols.size());
    }
    if (!(y.norm() > 0.0))
      throw NumericError("topk_right_singular: matrix has no signal");
    y = orthonormalize(y);

    z.setZero();
    for (std::int64_t i = 0; i < n; ++i) {
      const auto cols = obs.row_cols(i);
      const auto vals = obs.row_values(i);
      for (std::size_t e = 0; e < cols.size(); ++e)
        z.row(cols[e]) += vals[e] * y.row(i);
    }
    Eigen::VectorXd sv = z.colwise().norm();
    if (!(sv.maxCoeff() > 0.0))
      throw NumericError("topk_right_singular: matrix has no signal");
    x = orthonormalize(z);

    const double delta = (sv - sv_prev).norm() / sv.norm();
    sv_prev = sv;
    if (delta < tol) break;
  }
  return x.transpose();
}

SphereCoefficients warmstart(const ObservedMatrix& obs,
                             const FeatureMatrix& features, std::int64_t k,
                             double threshold, std::uint64_t seed) {
  const std::int64_t p = features.p();
  if (k <= 0 || k > std::min({p, obs.n_rows(), obs.n_cols()}))
    throw ParameterError("warmstart: k must be <= min(p, n, m)");

  if (obs.alpha() > threshold) {
    try {
      const Eigen::MatrixXd vk =
          topk_right_singular(obs, k, splitmix64(seed ^ 0x73766453ULL));
      if (features.is_identity())
        return SphereCoefficients::normalized(vk);
      // Least-squares fit of the singular vectors onto the row space of
      // B: argmin_S |S B - Vk|_F.
      const Eigen::MatrixXd& b = features.data();
      Eigen::MatrixXd gram = b * b.transpose();
      Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
      if (ldlt.info() != Eigen::Success) {
        gram.diagonal().array() += 1e-10 * gram.trace() / std::max<std::int64_t>(p, 1);
        ldlt.compute(gram);
        if (ldlt.info() != Eigen::Success)
          throw NumericError("warmstart: feature gram factorization failed");
      }
      const Eigen::MatrixXd fit =
          ldlt.solve(b * vk.transpose()).transpose();  // k x p
      if (fit.norm() > 0.0) return SphereCoefficients::normalized(fit);
    } catch (const NumericError&) {
      // degenerate data; fall through to the random start
    }
  }

  Rng rng(seed);
  Eigen::MatrixXd s(k, p);
  for (std::int64_t r = 0; r < k; ++r)
    for (std::int64_t j = 0; j < p; ++j) s(r, j) = rng.uniform(-1.0, 1.0);
  return SphereCoefficients::normalized(s);
}

Eigen::MatrixXd nesterov_accumulate(const Eigen::MatrixXd& g,
                                    const Eigen::MatrixXd& accel_prev, int t) {
  if (t < 1) throw ParameterError("nesterov_accumulate: t must be >= 1");
  const double coef = static_cast<double>(t - 1) / static_cast<double>(t + 2);
  return g + coef * accel_prev;
}

Eigen::MatrixXd project_to_tangent(const Eigen::MatrixXd& accel,
                                   const SphereCoefficients& s) {
  const double radial = accel.cwiseProduct(s.data()).sum();
  return -accel + radial * s.data();
}

SphereCoefficients rotate_update(const SphereCoefficients& s,
                                 const Eigen::MatrixXd& d, double theta,
                                 bool* converged) {
  const double norm = d.norm();
  if (converged != nullptr) *converged = false;
  if (norm < 1e-14) {
    if (converged != nullptr) *converged = true;
    return s;
  }
  Eigen::MatrixXd next =
      s.data() * std::cos(theta) + (d / norm) * std::sin(theta);
  return SphereCoefficients::normalized(std::move(next));
}

DescentResult descend(const ObservedMatrix& obs, const FeatureMatrix& features,
                      std::int64_t k, const DescentConfig& config,
                      AdaptiveSampler* sampler, std::uint64_t seed) {
  if (!(config.theta > 0.0 && config.theta < std::numbers::pi / 2.0))
    throw ParameterError("descend: theta must be in (0, pi/2)");
  if (config.t_max < 1) throw ParameterError("descend: t_max must be >= 1");
  if (!(config.gamma > 0.0)) throw ParameterError("descend: gamma must be > 0");
  if (features.cols() != obs.n_cols())
    throw ParameterError("descend: feature columns do not match the matrix");

  const auto t0 = std::chrono::steady_clock::now();
  SphereCoefficients s = warmstart(obs, features, k, config.warmstart_threshold,
                                   splitmix64(seed ^ 0x7761726dULL));

  std::vector<std::int64_t> full_rows;
  std::vector<std::int32_t> full_cols;
  std::span<const std::int64_t> rows;
  std::span<const std::int32_t> cols;
  if (sampler != nullptr) {
    rows = sampler->initial_plan().rows;
    cols = sampler->initial_plan().cols;
  } else {
    full_rows = all_rows(obs);
    full_cols = all_cols(obs);
    rows = full_rows;
    cols = full_cols;
  }

  const EvalOptions opts{config.threads};
  ObjectiveValue ov = evaluate(s, obs, features, config.gamma, rows, cols, opts);

  DescentResult result;
  result.s_final = s;
  result.s_best = s;
  result.eta_best = ov.cost;
  result.trace.push_back({1, ov.cost, static_cast<std::int64_t>(cols.size()),
                          static_cast<std::int64_t>(rows.size()),
                          ms_since(t0)});

  Eigen::MatrixXd accel = Eigen::MatrixXd::Zero(k, features.p());
  int t = 1;
  while (t < config.t_max) {
    const auto step_start = std::chrono::steady_clock::now();
    if (sampler != nullptr) {
      const SamplePlan& plan = sampler->adapt(ov.cost);
      rows = plan.rows;
      cols = plan.cols;
    }
    accel = nesterov_accumulate(ov.gradient, accel, t);
    const Eigen::MatrixXd d = project_to_tangent(accel, s);
    bool converged = false;
    s = rotate_update(s, d, config.theta, &converged);
    if (converged) {
      result.converged_early = true;
      break;
    }
    ov = evaluate(s, obs, features, config.gamma, rows, cols, opts);
    ++t;
    result.trace.push_back({t, ov.cost, static_cast<std::int64_t>(cols.size()),
                            static_cast<std::int64_t>(rows.size()),
                            ms_since(step_start)});
    if (ov.cost < result.eta_best) {
      result.eta_best = ov.cost;
      result.s_best = s;
    }
  }
  result.s_final = s;
  return result;
}

}  // namespace fastimpute
