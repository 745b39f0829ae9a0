#include "fastimpute/objective.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "fastimpute/errors.hpp"
#include "fastimpute/kernels.hpp"

namespace fastimpute {

namespace {

std::atomic<std::int64_t> g_factorizations{0};

constexpr std::int64_t kChunk = 256;

struct RowTermContext {
  const ObservedMatrix* obs;
  const FeatureMatrix* features;
  const Eigen::MatrixXd* vt;                // |cols| x k, one column per lane
  const std::vector<std::int32_t>* colpos;  // global col -> local position, -1 if excluded
  std::span<const std::int64_t> rows;
  std::span<const std::int32_t> cols;
  double gamma;
  std::int64_t k;
  bool need_grad;
};

// Scratch reused across the rows of one chunk.
struct RowScratch {
  std::vector<std::int32_t> idx;   // local column positions
  std::vector<double> a;           // observed values
  std::vector<double> panel;       // k rows of gathered V, each row i's length
  std::vector<double> resid;
  Eigen::MatrixXd m;               // k x k
  Eigen::VectorXd g, w, u;
  Eigen::VectorXd b;               // p, dense-B gradient factor
};

// One row's contribution. Returns the cost term; accumulates into grad
// when requested.
double row_term(const RowTermContext& ctx, std::int64_t row, RowScratch& ws,
                Eigen::MatrixXd* grad) {
  const auto rcols = ctx.obs->row_cols(row);
  const auto rvals = ctx.obs->row_values(row);
  const std::int64_t k = ctx.k;

  ws.idx.clear();
  ws.a.clear();
  for (std::size_t e = 0; e < rcols.size(); ++e) {
    const std::int32_t pos = (*ctx.colpos)[rcols[e]];
    if (pos >= 0) {
      ws.idx.push_back(pos);
      ws.a.push_back(rvals[e]);
    }
  }
  const std::int64_t mi = static_cast<std::int64_t>(ws.idx.size());
  if (mi == 0) return 0.0;  // empty selection contributes nothing

  ws.panel.resize(k * mi);
  for (std::int64_t r = 0; r < k; ++r)
    kernels::gather(ctx.vt->col(r).data(), ws.idx.data(),
                    ws.panel.data() + r * mi, mi);

  ws.m.resize(k, k);
  ws.g.resize(k);
  for (std::int64_t r = 0; r < k; ++r) {
    const double* pr = ws.panel.data() + r * mi;
    ws.g(r) = kernels::dot(pr, ws.a.data(), mi);
    for (std::int64_t c = 0; c <= r; ++c) {
      const double v = kernels::dot(pr, ws.panel.data() + c * mi, mi);
      ws.m(r, c) = v;
      ws.m(c, r) = v;
    }
  }
  ws.m.diagonal().array() += 1.0 / ctx.gamma;

  Eigen::LLT<Eigen::MatrixXd> llt(ws.m);
  g_factorizations.fetch_add(1, std::memory_order_relaxed);
  if (llt.info() != Eigen::Success) {
    // SPD in exact arithmetic for gamma > 0; nudge the diagonal once.
    ws.m.diagonal().array() += 1e-12;
    llt.compute(ws.m);
    g_factorizations.fetch_add(1, std::memory_order_relaxed);
    if (llt.info() != Eigen::Success)
      throw NumericError("objective: k x k system factorization failed");
  }
  ws.w = llt.solve(ws.g);

  ws.resid.assign(ws.a.begin(), ws.a.end());
  for (std::int64_t r = 0; r < k; ++r)
    kernels::axpy(-ws.w(r), ws.panel.data() + r * mi, ws.resid.data(), mi);

  double term = kernels::dot(ws.a.data(), ws.resid.data(), mi);
  if (term < 0.0) {
    const double scale = kernels::dot(ws.a.data(), ws.a.data(), mi);
    if (term > -1e-9 * std::max(scale, 1.0)) term = 0.0;
  }

  if (ctx.need_grad && grad != nullptr) {
    ws.u.resize(k);
    for (std::int64_t r = 0; r < k; ++r)
      ws.u(r) =
          kernels::dot(ws.panel.data() + r * mi, ws.resid.data(), mi);
    const double coef = -2.0 * ctx.gamma;
    if (ctx.features->is_identity()) {
      for (std::int64_t e = 0; e < mi; ++e) {
        const std::int32_t global_col = ctx.cols[ws.idx[e]];
        grad->col(global_col) += (coef * ws.resid[e]) * ws.u;
      }
    } else {
      const Eigen::MatrixXd& bmat = ctx.features->data();
      ws.b.setZero(bmat.rows());
      for (std::int64_t e = 0; e < mi; ++e) {
        const std::int32_t global_col = ctx.cols[ws.idx[e]];
        kernels::axpy(ws.resid[e], bmat.col(global_col).data(), ws.b.data(),
                      bmat.rows());
      }
      grad->noalias() += coef * ws.u * ws.b.transpose();
    }
  }
  return term;
}

ObjectiveValue evaluate_impl(const SphereCoefficients& s,
                             const ObservedMatrix& obs,
                             const FeatureMatrix& features, double gamma,
                             std::span<const std::int64_t> rows,
                             std::span<const std::int32_t> cols,
                             const EvalOptions& opts, bool need_grad) {
  if (!(gamma > 0.0)) throw ParameterError("objective: gamma must be > 0");
  if (rows.empty()) throw ParameterError("objective: empty row set");
  if (cols.empty()) throw ParameterError("objective: empty column set");
  if (features.cols() != obs.n_cols() || features.p() != s.p())
    throw ParameterError("objective: feature dimensions do not match");
  const std::int64_t k = s.k();
  const std::int64_t mc = static_cast<std::int64_t>(cols.size());

  // V = S*B restricted to the selected columns, laid out one contiguous
  // lane per rank so the per-row gathers stream.
  Eigen::MatrixXd vt(mc, k);
  if (features.is_identity()) {
    for (std::int64_t j = 0; j < mc; ++j)
      vt.row(j) = s.data().col(cols[j]).transpose();
  } else {
    const Eigen::MatrixXd& bmat = features.data();
    for (std::int64_t j = 0; j < mc; ++j)
      vt.row(j) = (s.data() * bmat.col(cols[j])).transpose();
  }

  std::vector<std::int32_t> colpos(obs.n_cols(), -1);
  for (std::int64_t j = 0; j < mc; ++j) {
    if (cols[j] < 0 || cols[j] >= obs.n_cols())
      throw ParameterError("objective: column index out of range");
    colpos[cols[j]] = static_cast<std::int32_t>(j);
  }
  for (auto r : rows)
    if (r < 0 || r >= obs.n_rows())
      throw ParameterError("objective: row index out of range");

  RowTermContext ctx{&obs,  &features, &vt,  &colpos,
                     rows,  cols,      gamma, k,
                     need_grad};

  const std::int64_t nrows = static_cast<std::int64_t>(rows.size());
  const std::int64_t nchunks = (nrows + kChunk - 1) / kChunk;
  std::vector<double> chunk_cost(nchunks, 0.0);
  std::vector<Eigen::MatrixXd> chunk_grad;
  if (need_grad) chunk_grad.assign(nchunks, Eigen::MatrixXd());

  auto run_chunk = [&](std::int64_t c, RowScratch& ws) {
    Eigen::MatrixXd* grad = nullptr;
    if (need_grad) {
      chunk_grad[c].setZero(k, s.p());
      grad = &chunk_grad[c];
    }
    double acc = 0.0;
    const std::int64_t lo = c * kChunk;
    const std::int64_t hi = std::min(lo + kChunk, nrows);
    for (std::int64_t r = lo; r < hi; ++r)
      acc += row_term(ctx, rows[r], ws, grad);
    chunk_cost[c] = acc;
  };

  const int threads = std::max(1, opts.threads);
  if (threads == 1 || nchunks == 1) {
    RowScratch ws;
    for (std::int64_t c = 0; c < nchunks; ++c) run_chunk(c, ws);
  } else {
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      RowScratch ws;
      try {
        for (;;) {
          const std::int64_t c = next.fetch_add(1);
          if (c >= nchunks) break;
          run_chunk(c, ws);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<std::int64_t>(threads, nchunks); ++t)
      pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  // Fixed chunk-order combine keeps results independent of thread count.
  ObjectiveValue out;
  double total = 0.0;
  for (std::int64_t c = 0; c < nchunks; ++c) total += chunk_cost[c];
  out.cost = total / static_cast<double>(nrows);
  if (need_grad) {
    out.gradient.setZero(k, s.p());
    for (std::int64_t c = 0; c < nchunks; ++c) out.gradient += chunk_grad[c];
    out.gradient /= static_cast<double>(nrows);
  }
  return out;
}

}  // namespace

SphereCoefficients SphereCoefficients::normalized(Eigen::MatrixXd data) {
  const double norm = data.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw ParameterError("SphereCoefficients: cannot normalize zero or non-finite matrix");
  SphereCoefficients s;
  s.data_ = data / norm;
  return s;
}

double cost(const SphereCoefficients& s, const ObservedMatrix& obs,
            const FeatureMatrix& features, double gamma,
            std::span<const std::int64_t> rows,
            std::span<const std::int32_t> cols, const EvalOptions& opts) {
  return evaluate_impl(s, obs, features, gamma, rows, cols, opts, false).cost;
}

Eigen::MatrixXd gradient(const SphereCoefficients& s, const ObservedMatrix& obs,
                         const FeatureMatrix& features, double gamma,
                         std::span<const std::int64_t> rows,
                         std::span<const std::int32_t> cols,
                         const EvalOptions& opts) {
  return evaluate_impl(s, obs, features, gamma, rows, cols, opts, true)
      .gradient;
}

ObjectiveValue evaluate(const SphereCoefficients& s, const ObservedMatrix& obs,
                        const FeatureMatrix& features, double gamma,
                        std::span<const std::int64_t> rows,
                        std::span<const std::int32_t> cols,
                        const EvalOptions& opts) {
  return evaluate_impl(s, obs, features, gamma, rows, cols, opts, true);
}

std::vector<std::int64_t> all_rows(const ObservedMatrix& obs) {
  std::vector<std::int64_t> out(obs.n_rows());
  std::iota(out.begin(), out.end(), std::int64_t{0});
  return out;
}

std::vector<std::int32_t> all_cols(const ObservedMatrix& obs) {
  std::vector<std::int32_t> out(obs.n_cols());
  std::iota(out.begin(), out.end(), std::int32_t{0});
  return out;
}

std::int64_t factorization_count() {
  return g_factorizations.load(std::memory_order_relaxed);
}

}  // namespace fastimpute
