#include "fastimpute/features.hpp"

#include "fastimpute/errors.hpp"

namespace fastimpute {

FeatureMatrix FeatureMatrix::identity(std::int64_t m) {
  if (m <= 0) throw ParameterError("FeatureMatrix: m must be positive");
  FeatureMatrix f;
  f.identity_ = true;
  f.p_ = m;
  f.m_ = m;
  return f;
}

FeatureMatrix FeatureMatrix::dense(Eigen::MatrixXd data) {
  if (data.rows() == 0 || data.cols() == 0)
    throw ParameterError("FeatureMatrix: empty feature matrix");
  FeatureMatrix f;
  f.identity_ = false;
  f.p_ = data.rows();
  f.m_ = data.cols();
  f.data_ = std::move(data);
  return f;
}

const Eigen::MatrixXd& FeatureMatrix::data() const {
  if (identity_)
    throw ParameterError("FeatureMatrix: identity features are not materialized");
  return data_;
}

}  // namespace fastimpute
