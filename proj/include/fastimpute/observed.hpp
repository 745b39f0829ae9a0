#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace fastimpute {

struct Entry {
  std::int64_t row;
  std::int32_t col;
  double value;
};

// Partially observed n x m matrix, stored row-wise (CSR): per row a
// sorted list of (column, value) pairs over the observed set. Immutable
// after construction and safe to share across threads.
class ObservedMatrix {
 public:
  // Sorts entries, validates bounds/finiteness and rejects duplicates.
  static ObservedMatrix from_entries(std::int64_t n_rows, std::int64_t n_cols,
                                     std::vector<Entry> entries);

  std::int64_t n_rows() const { return n_rows_; }
  std::int64_t n_cols() const { return n_cols_; }
  std::int64_t omega_size() const {
    return static_cast<std::int64_t>(cols_.size());
  }
  // Fill fraction |Omega| / (n*m).
  double alpha() const;

  std::int64_t row_size(std::int64_t i) const {
    return row_ptr_[i + 1] - row_ptr_[i];
  }
  std::span<const std::int32_t> row_cols(std::int64_t i) const {
    return {cols_.data() + row_ptr_[i],
            static_cast<std::size_t>(row_size(i))};
  }
  std::span<const double> row_values(std::int64_t i) const {
    return {vals_.data() + row_ptr_[i],
            static_cast<std::size_t>(row_size(i))};
  }

  std::vector<Entry> entries() const;

  ObservedMatrix transposed() const;

  // Entries whose column lies in [col_begin, col_end), reindexed so the
  // slice's columns start at zero. Row count is unchanged.
  ObservedMatrix column_slice(std::int64_t col_begin,
                              std::int64_t col_end) const;

 private:
  std::int64_t n_rows_ = 0;
  std::int64_t n_cols_ = 0;
  std::vector<std::int64_t> row_ptr_;
  std::vector<std::int32_t> cols_;
  std::vector<double> vals_;
};

// Removes a uniform sample of round(holdout_fraction * |Omega|) observed
// entries; returns the remaining matrix and the removed entries. The two
// parts partition the observed set exactly.
std::pair<ObservedMatrix, std::vector<Entry>> split_validation(
    const ObservedMatrix& obs, double holdout_fraction, std::uint64_t seed);

}  // namespace fastimpute
