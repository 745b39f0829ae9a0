#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace fastimpute {

// Column side information B (p x m). The identity sentinel covers the
// no-side-information case: p == m and no data is materialized; all
// products treat B as index passthrough.
class FeatureMatrix {
 public:
  static FeatureMatrix identity(std::int64_t m);
  static FeatureMatrix dense(Eigen::MatrixXd data);

  bool is_identity() const { return identity_; }
  std::int64_t p() const { return p_; }
  std::int64_t cols() const { return m_; }

  // Only valid for the dense case.
  const Eigen::MatrixXd& data() const;

 private:
  bool identity_ = false;
  std::int64_t p_ = 0;
  std::int64_t m_ = 0;
  Eigen::MatrixXd data_;
};

}  // namespace fastimpute
