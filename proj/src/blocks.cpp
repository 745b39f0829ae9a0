#include "fastimpute/blocks.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <string>

#include "fastimpute/errors.hpp"
#include "fastimpute/rng.hpp"
#include "fastimpute/scheduler.hpp"

namespace fastimpute {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

std::uint64_t block_seed(std::uint64_t seed, std::int64_t index) {
  return splitmix64(seed ^ splitmix64(0x626c6f636bULL + index));
}

BlockPlan plan_blocks(std::int64_t m, std::int64_t ell) {
  if (m < 1) throw ParameterError("plan_blocks: m must be >= 1");
  if (ell < 1) throw ParameterError("plan_blocks: block size must be >= 1");
  BlockPlan plan;
  plan.block_size = ell;
  for (std::int64_t start = 0; start < m; start += ell)
    plan.ranges.emplace_back(start, std::min(start + ell, m));
  return plan;
}

CompletionReport complete_blocked(const ObservedMatrix& obs, std::int64_t k,
                                  const DescentConfig& config,
                                  const PipelineOptions& options,
                                  std::uint64_t seed) {
  if (obs.omega_size() == 0)
    throw ParameterError("complete_blocked: matrix has no observed entries");
  if (k < 1) throw ParameterError("complete_blocked: rank must be >= 1");

  const auto t0 = std::chrono::steady_clock::now();
  const bool transpose =
      options.transpose_mode == 1 ||
      (options.transpose_mode == -1 && obs.n_rows() < obs.n_cols());
  const ObservedMatrix work = transpose ? obs.transposed() : obs;

  const BlockPlan plan = plan_blocks(work.n_cols(), options.block_size);
  if (k > work.n_rows())
    throw ParameterError("complete_blocked: rank exceeds row count");
  for (const auto& [begin, end] : plan.ranges) {
    if (end - begin < k)
      throw ParameterError(
          "complete_blocked: block of width " + std::to_string(end - begin) +
          " is narrower than rank " + std::to_string(k));
  }

  CompletionReport report;
  report.k_used = k;
  report.block_count = static_cast<std::int64_t>(plan.ranges.size());
  Eigen::MatrixXd filled = Eigen::MatrixXd::Zero(work.n_rows(), work.n_cols());

  double ms_descent = 0.0;
  double ms_fill = 0.0;
  for (std::size_t b = 0; b < plan.ranges.size(); ++b) {
    const auto [begin, end] = plan.ranges[b];
    const std::int64_t width = end - begin;
    const ObservedMatrix sub = work.column_slice(begin, end);
    if (sub.omega_size() == 0) {
      report.flags.push_back("block " + std::to_string(b) +
                             " has no observations; zero-filled");
      continue;
    }
    const FeatureMatrix ident = FeatureMatrix::identity(width);
    const std::uint64_t bseed = block_seed(seed, static_cast<std::int64_t>(b));

    std::optional<AdaptiveSampler> sampler;
    if (options.subsample) {
      sampler.emplace(sub.n_rows(), width, width, k, sub.alpha(),
                      config.patience, splitmix64(bseed ^ 0x73616d70ULL));
    }

    const auto td = std::chrono::steady_clock::now();
    const DescentResult res =
        descend(sub, ident, k, config, sampler ? &*sampler : nullptr, bseed);
    ms_descent += ms_since(td);
    if (b == 0) report.trace = res.trace;

    const auto tf = std::chrono::steady_clock::now();
    std::vector<std::int64_t> empty;
    filled.middleCols(begin, width) = fill_rows(res.s_final, sub, ident,
                                                config.gamma, &empty,
                                                config.threads);
    ms_fill += ms_since(tf);
    if (!empty.empty())
      report.flags.push_back("block " + std::to_string(b) + ": " +
                             std::to_string(empty.size()) +
                             " rows without observations zero-filled");
  }

  if (transpose) filled.transposeInPlace();
  report.filled = std::move(filled);
  report.mape_train = mape(report.filled, obs.entries());
  report.ms_warmstart_descent = ms_descent;
  report.ms_fill = ms_fill;
  report.ms_total = ms_since(t0);
  return report;
}

}  // namespace fastimpute
