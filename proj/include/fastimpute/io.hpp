#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fastimpute/observed.hpp"
#include "fastimpute/sphere.hpp"

namespace fastimpute {

// MatrixMarket coordinate format (1-based on disk, 0-based in memory).
// Malformed input raises InputError naming the file and line.
ObservedMatrix read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const ObservedMatrix& obs);

// MatrixMarket array format (dense, column-major on disk).
Eigen::MatrixXd read_matrix_market_dense(const std::string& path);
void write_matrix_market_dense(const std::string& path,
                               const Eigen::MatrixXd& mat);

// Plain CSV, no header; used for feature matrices (p rows x m columns)
// and dense outputs.
Eigen::MatrixXd read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& mat);

// Prediction requests: lines of "row,col" (0-based); predictions are
// written back as "row,col,value".
std::vector<std::pair<std::int64_t, std::int64_t>> read_requests_csv(
    const std::string& path);
void write_predictions_csv(
    const std::string& path,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& requests,
    const std::vector<double>& values);

// Descent trace: columns (t, eta, m_t, n_t, wall_ms).
void write_trace_csv(const std::string& path,
                     const std::vector<StepRecord>& trace);

}  // namespace fastimpute
