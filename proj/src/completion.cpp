#include "fastimpute/completion.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "fastimpute/blocks.hpp"
#include "fastimpute/errors.hpp"
#include "fastimpute/kernels.hpp"
#include "fastimpute/rng.hpp"

namespace fastimpute {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// V* = S*B laid out m x k, one contiguous lane per rank.
Eigen::MatrixXd build_vt(const SphereCoefficients& s,
                         const FeatureMatrix& features) {
  if (features.is_identity()) return s.data().transpose();
  return (s.data() * features.data()).transpose();
}

// Per-row ridge coefficients w with V*_i the gathered observed columns:
//   w = (I_k/gamma + V*_i V*_i')^{-1} V*_i a_i.
// Returns false when the row has no observed entries.
bool row_coefficients(const ObservedMatrix& obs, const Eigen::MatrixXd& vt,
                      double gamma, std::int64_t row, Eigen::VectorXd& w,
                      std::vector<double>& panel) {
  const auto cols = obs.row_cols(row);
  const auto vals = obs.row_values(row);
  const std::int64_t mi = static_cast<std::int64_t>(cols.size());
  const std::int64_t k = vt.cols();
  if (mi == 0) return false;

  panel.resize(k * mi);
  for (std::int64_t r = 0; r < k; ++r)
    kernels::gather(vt.col(r).data(), cols.data(), panel.data() + r * mi, mi);

  Eigen::MatrixXd m(k, k);
  Eigen::VectorXd g(k);
  for (std::int64_t r = 0; r < k; ++r) {
    const double* pr = panel.data() + r * mi;
    g(r) = kernels::dot(pr, vals.data(), mi);
    for (std::int64_t c = 0; c <= r; ++c) {
      const double v = kernels::dot(pr, panel.data() + c * mi, mi);
      m(r, c) = v;
      m(c, r) = v;
    }
  }
  m.diagonal().array() += 1.0 / gamma;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    m.diagonal().array() += 1e-12;
    llt.compute(m);
    if (llt.info() != Eigen::Success)
      throw NumericError("fill_rows: k x k system factorization failed");
  }
  w = llt.solve(g);
  return true;
}

}  // namespace

Eigen::MatrixXd fill_rows(const SphereCoefficients& s_star,
                          const ObservedMatrix& obs,
                          const FeatureMatrix& features, double gamma,
                          std::vector<std::int64_t>* empty_rows, int threads) {
  if (!(gamma > 0.0)) throw ParameterError("fill_rows: gamma must be > 0");
  if (features.cols() != obs.n_cols() || features.p() != s_star.p())
    throw ParameterError("fill_rows: dimensions do not match");
  const Eigen::MatrixXd vt = build_vt(s_star, features);
  const std::int64_t n = obs.n_rows();
  Eigen::MatrixXd filled(n, obs.n_cols());

  std::vector<std::vector<std::int64_t>> empties(std::max(1, threads));
  auto fill_range = [&](std::int64_t lo, std::int64_t hi, int slot) {
    Eigen::VectorXd w;
    std::vector<double> panel;
    for (std::int64_t i = lo; i < hi; ++i) {
      if (row_coefficients(obs, vt, gamma, i, w, panel)) {
        filled.row(i) = (vt * w).transpose();
      } else {
        filled.row(i).setZero();
        empties[slot].push_back(i);
      }
    }
  };

  if (threads <= 1 || n < 2 * 256) {
    fill_range(0, n, 0);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t per = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::int64_t lo = t * per;
      const std::int64_t hi = std::min<std::int64_t>(lo + per, n);
      if (lo < hi) pool.emplace_back(fill_range, lo, hi, t);
    }
    for (auto& t : pool) t.join();
  }

  if (empty_rows != nullptr) {
    empty_rows->clear();
    for (auto& part : empties)
      empty_rows->insert(empty_rows->end(), part.begin(), part.end());
    std::sort(empty_rows->begin(), empty_rows->end());
  }
  return filled;
}

std::vector<double> predict_entries(
    const SphereCoefficients& s_star, const ObservedMatrix& obs,
    const FeatureMatrix& features, double gamma,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& requests) {
  if (!(gamma > 0.0)) throw ParameterError("predict_entries: gamma must be > 0");
  const Eigen::MatrixXd vt = build_vt(s_star, features);

  std::map<std::int64_t, std::vector<std::size_t>> by_row;
  for (std::size_t q = 0; q < requests.size(); ++q) {
    const auto [i, j] = requests[q];
    if (i < 0 || i >= obs.n_rows() || j < 0 || j >= obs.n_cols())
      throw ParameterError("predict_entries: request out of bounds");
    by_row[i].push_back(q);
  }

  std::vector<double> out(requests.size(), 0.0);
  Eigen::VectorXd w;
  std::vector<double> panel;
  for (const auto& [row, qs] : by_row) {
    if (!row_coefficients(obs, vt, gamma, row, w, panel)) continue;
    for (auto q : qs) out[q] = vt.row(requests[q].second).dot(w);
  }
  return out;
}

namespace {

double mape_accumulate(double est, double truth, double& sum,
                       std::int64_t& used, std::int64_t& skipped) {
  if (std::abs(truth) < 1e-9) {
    ++skipped;
    return sum;
  }
  sum += std::abs(est - truth) / std::abs(truth);
  ++used;
  return sum;
}

}  // namespace

double mape(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth,
            std::int64_t* excluded) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw ParameterError("mape: shape mismatch");
  double sum = 0.0;
  std::int64_t used = 0, skipped = 0;
  for (std::int64_t j = 0; j < truth.cols(); ++j)
    for (std::int64_t i = 0; i < truth.rows(); ++i)
      mape_accumulate(estimate(i, j), truth(i, j), sum, used, skipped);
  if (excluded != nullptr) *excluded = skipped;
  if (used == 0) throw NumericError("mape: every entry was excluded");
  return sum / static_cast<double>(used);
}

double mape(const Eigen::MatrixXd& estimate, const std::vector<Entry>& truth,
            std::int64_t* excluded) {
  double sum = 0.0;
  std::int64_t used = 0, skipped = 0;
  for (const Entry& e : truth) {
    if (e.row < 0 || e.row >= estimate.rows() || e.col < 0 ||
        e.col >= estimate.cols())
      throw ParameterError("mape: entry out of bounds");
    mape_accumulate(estimate(e.row, e.col), e.value, sum, used, skipped);
  }
  if (excluded != nullptr) *excluded = skipped;
  if (used == 0) throw NumericError("mape: every entry was excluded");
  return sum / static_cast<double>(used);
}

CompletionReport run_pipeline(const ObservedMatrix& obs,
                              const FeatureMatrix& features, std::int64_t k,
                              const DescentConfig& config,
                              const PipelineOptions& options,
                              std::uint64_t seed) {
  if (features.is_identity())
    return complete_blocked(obs, k, config, options, seed);

  if (obs.omega_size() == 0)
    throw ParameterError("run_pipeline: matrix has no observed entries");
  if (k < 1) throw ParameterError("run_pipeline: rank must be >= 1");

  const auto t0 = std::chrono::steady_clock::now();
  CompletionReport report;
  report.k_used = k;

  std::optional<AdaptiveSampler> sampler;
  if (options.subsample) {
    sampler.emplace(obs.n_rows(), obs.n_cols(), features.p(), k, obs.alpha(),
                    config.patience, splitmix64(seed ^ 0x73616d70ULL));
  }
  DescentResult res =
      descend(obs, features, k, config, sampler ? &*sampler : nullptr, seed);
  report.trace = res.trace;
  report.ms_warmstart_descent = ms_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  if (options.materialize) {
    report.filled = fill_rows(res.s_final, obs, features, config.gamma,
                              &report.empty_rows, config.threads);
    report.mape_train = mape(report.filled, obs.entries());
  }
  report.ms_fill = ms_since(t1);
  report.ms_total = ms_since(t0);
  if (!report.empty_rows.empty())
    report.flags.push_back(std::to_string(report.empty_rows.size()) +
                           " rows without observations were zero-filled");
  return report;
}

RankChoice select_rank(const ObservedMatrix& obs, const FeatureMatrix& features,
                       const std::vector<std::int64_t>& candidate_ks,
                       const DescentConfig& config,
                       const PipelineOptions& options, std::uint64_t seed) {
  if (candidate_ks.empty())
    throw ParameterError("select_rank: no candidate ranks");
  auto [train, holdout] =
      split_validation(obs, 0.2, splitmix64(seed ^ 0x76616cULL));

  RankChoice choice;
  PipelineOptions opts = options;
  opts.materialize = true;
  for (std::size_t idx = 0; idx < candidate_ks.size(); ++idx) {
    const std::int64_t k = candidate_ks[idx];
    RankCandidate cand;
    cand.k = k;
    try {
      const CompletionReport rep = run_pipeline(
          train, features, k, config, opts, splitmix64(seed ^ (0xf00d + idx)));
      cand.validation_mape = mape(rep.filled, holdout);
    } catch (const std::exception& e) {
      cand.failed = true;
      cand.error = e.what();
    }
    choice.table.push_back(std::move(cand));
  }

  double best = std::numeric_limits<double>::infinity();
  std::int64_t best_k = -1;
  for (const auto& cand : choice.table) {
    if (cand.failed) continue;
    // ties within 1e-12 go to the smaller rank
    if (cand.validation_mape < best - 1e-12 ||
        (std::abs(cand.validation_mape - best) <= 1e-12 && cand.k < best_k)) {
      best = cand.validation_mape;
      best_k = cand.k;
    }
  }
  if (best_k < 0) throw NumericError("select_rank: every candidate failed");
  choice.k_star = best_k;
  return choice;
}

}  // namespace fastimpute
