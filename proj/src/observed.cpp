#include "fastimpute/observed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastimpute/errors.hpp"
#include "fastimpute/rng.hpp"

namespace fastimpute {

ObservedMatrix ObservedMatrix::from_entries(std::int64_t n_rows,
                                            std::int64_t n_cols,
                                            std::vector<Entry> entries) {
  if (n_rows <= 0 || n_cols <= 0)
    throw ParameterError("ObservedMatrix: dimensions must be positive");
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  ObservedMatrix out;
  out.n_rows_ = n_rows;
  out.n_cols_ = n_cols;
  out.row_ptr_.assign(n_rows + 1, 0);
  out.cols_.reserve(entries.size());
  out.vals_.reserve(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const Entry& ent = entries[e];
    if (ent.row < 0 || ent.row >= n_rows || ent.col < 0 || ent.col >= n_cols)
      throw ParameterError("ObservedMatrix: entry index out of bounds (row " +
                           std::to_string(ent.row) + ", col " +
                           std::to_string(ent.col) + ")");
    if (!std::isfinite(ent.value))
      throw ParameterError("ObservedMatrix: non-finite value at row " +
                           std::to_string(ent.row));
    if (e > 0 && entries[e - 1].row == ent.row &&
        entries[e - 1].col == ent.col)
      throw ParameterError("ObservedMatrix: duplicate entry at row " +
                           std::to_string(ent.row) + ", col " +
                           std::to_string(ent.col));
    out.row_ptr_[ent.row + 1]++;
    out.cols_.push_back(ent.col);
    out.vals_.push_back(ent.value);
  }
  for (std::int64_t i = 0; i < n_rows; ++i)
    out.row_ptr_[i + 1] += out.row_ptr_[i];
  return out;
}

double ObservedMatrix::alpha() const {
  return static_cast<double>(omega_size()) /
         (static_cast<double>(n_rows_) * static_cast<double>(n_cols_));
}

std::vector<Entry> ObservedMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(cols_.size());
  for (std::int64_t i = 0; i < n_rows_; ++i) {
    for (std::int64_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e)
      out.push_back({i, cols_[e], vals_[e]});
  }
  return out;
}

ObservedMatrix ObservedMatrix::transposed() const {
  std::vector<Entry> flipped;
  flipped.reserve(cols_.size());
  for (std::int64_t i = 0; i < n_rows_; ++i) {
    for (std::int64_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e)
      flipped.push_back({cols_[e], static_cast<std::int32_t>(i), vals_[e]});
  }
  return from_entries(n_cols_, n_rows_, std::move(flipped));
}

ObservedMatrix ObservedMatrix::column_slice(std::int64_t col_begin,
                                            std::int64_t col_end) const {
  if (col_begin < 0 || col_end > n_cols_ || col_begin >= col_end)
    throw ParameterError("column_slice: bad range");
  std::vector<Entry> kept;
  for (std::int64_t i = 0; i < n_rows_; ++i) {
    for (std::int64_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) {
      if (cols_[e] >= col_begin && cols_[e] < col_end)
        kept.push_back({i, static_cast<std::int32_t>(cols_[e] - col_begin),
                        vals_[e]});
    }
  }
  return from_entries(n_rows_, col_end - col_begin, std::move(kept));
}

std::pair<ObservedMatrix, std::vector<Entry>> split_validation(
    const ObservedMatrix& obs, double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw ParameterError("split_validation: holdout fraction must be in (0,1)");
  const std::int64_t total = obs.omega_size();
  const std::int64_t held =
      std::llround(holdout_fraction * static_cast<double>(total));
  if (held >= total || total <= 1)
    throw ParameterError("split_validation: holdout would empty the matrix");

  Rng rng(seed);
  auto picks = rng.sample(total, held, /*sorted=*/true);
  std::vector<bool> is_held(total, false);
  for (auto p : picks) is_held[p] = true;

  auto all = obs.entries();
  std::vector<Entry> train, holdout;
  train.reserve(total - held);
  holdout.reserve(held);
  for (std::int64_t e = 0; e < total; ++e)
    (is_held[e] ? holdout : train).push_back(all[e]);
  return {ObservedMatrix::from_entries(obs.n_rows(), obs.n_cols(),
                                       std::move(train)),
          std::move(holdout)};
}

}  // namespace fastimpute
