#include "fastimpute/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fastimpute/errors.hpp"

namespace fastimpute {

namespace {

[[noreturn]] void fail(const std::string& path, std::int64_t line,
                       const std::string& what) {
  throw InputError(path + ":" + std::to_string(line) + ": " + what);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open for reading");
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError(path + ": cannot open for writing");
  out.precision(17);
  return out;
}

// Reads the banner and skips comments; returns the format word
// ("coordinate" or "array") and leaves the stream at the size line.
std::string read_mm_header(std::ifstream& in, const std::string& path,
                           std::int64_t& line_no) {
  std::string line;
  if (!std::getline(in, line)) fail(path, 1, "empty file");
  line_no = 1;
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix")
    fail(path, 1, "not a MatrixMarket matrix file");
  if (lower(field) != "real" || lower(symmetry) != "general")
    fail(path, 1, "only 'real general' matrices are supported");
  return lower(format);
}

bool next_data_line(std::ifstream& in, std::string& line,
                    std::int64_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

ObservedMatrix read_matrix_market(const std::string& path) {
  auto in = open_for_read(path);
  std::int64_t line_no = 0;
  if (read_mm_header(in, path, line_no) != "coordinate")
    fail(path, 1, "expected a coordinate-format matrix");

  std::string line;
  if (!next_data_line(in, line, line_no)) fail(path, line_no, "missing size line");
  std::int64_t n = 0, m = 0, nnz = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> n >> m >> nnz)) fail(path, line_no, "malformed size line");
  }
  if (n <= 0 || m <= 0 || nnz < 0) fail(path, line_no, "invalid dimensions");

  std::vector<Entry> entries;
  entries.reserve(nnz);
  for (std::int64_t e = 0; e < nnz; ++e) {
    if (!next_data_line(in, line, line_no))
      fail(path, line_no, "fewer entries than declared");
    std::istringstream ss(line);
    std::int64_t i = 0, j = 0;
    double v = 0.0;
    if (!(ss >> i >> j >> v)) fail(path, line_no, "malformed entry");
    if (i < 1 || i > n || j < 1 || j > m)
      fail(path, line_no,
           "index out of bounds: (" + std::to_string(i) + ", " +
               std::to_string(j) + ") for " + std::to_string(n) + "x" +
               std::to_string(m));
    entries.push_back({i - 1, static_cast<std::int32_t>(j - 1), v});
  }
  try {
    return ObservedMatrix::from_entries(n, m, std::move(entries));
  } catch (const ParameterError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_matrix_market(const std::string& path, const ObservedMatrix& obs) {
  auto out = open_for_write(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << obs.n_rows() << ' ' << obs.n_cols() << ' ' << obs.omega_size()
      << '\n';
  for (std::int64_t i = 0; i < obs.n_rows(); ++i) {
    const auto cols = obs.row_cols(i);
    const auto vals = obs.row_values(i);
    for (std::size_t e = 0; e < cols.size(); ++e)
      out << (i + 1) << ' ' << (cols[e] + 1) << ' ' << vals[e] << '\n';
  }
}

Eigen::MatrixXd read_matrix_market_dense(const std::string& path) {
  auto in = open_for_read(path);
  std::int64_t line_no = 0;
  if (read_mm_header(in, path, line_no) != "array")
    fail(path, 1, "expected an array-format matrix");

  std::string line;
  if (!next_data_line(in, line, line_no)) fail(path, line_no, "missing size line");
  std::int64_t n = 0, m = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> n >> m)) fail(path, line_no, "malformed size line");
  }
  if (n <= 0 || m <= 0) fail(path, line_no, "invalid dimensions");
  Eigen::MatrixXd mat(n, m);
  for (std::int64_t j = 0; j < m; ++j) {
    for (std::int64_t i = 0; i < n; ++i) {
      if (!next_data_line(in, line, line_no))
        fail(path, line_no, "fewer values than declared");
      std::istringstream ss(line);
      if (!(ss >> mat(i, j))) fail(path, line_no, "malformed value");
    }
  }
  return mat;
}

void write_matrix_market_dense(const std::string& path,
                               const Eigen::MatrixXd& mat) {
  auto out = open_for_write(path);
  out << "%%MatrixMarket matrix array real general\n";
  out << mat.rows() << ' ' << mat.cols() << '\n';
  for (std::int64_t j = 0; j < mat.cols(); ++j)
    for (std::int64_t i = 0; i < mat.rows(); ++i) out << mat(i, j) << '\n';
}

Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  auto in = open_for_read(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::int64_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail(path, line_no, "not a number: '" + cell + "'");
      }
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      fail(path, line_no, "ragged row: expected " + std::to_string(width) +
                              " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(path + ": empty matrix");
  Eigen::MatrixXd mat(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) mat(i, j) = rows[i][j];
  return mat;
}

void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& mat) {
  auto out = open_for_write(path);
  for (std::int64_t i = 0; i < mat.rows(); ++i) {
    for (std::int64_t j = 0; j < mat.cols(); ++j) {
      if (j > 0) out << ',';
      out << mat(i, j);
    }
    out << '\n';
  }
}

std::vector<std::pair<std::int64_t, std::int64_t>> read_requests_csv(
    const std::string& path) {
  auto in = open_for_read(path);
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      fail(path, line_no, "expected 'row,col'");
    try {
      out.emplace_back(std::stoll(a), std::stoll(b));
    } catch (const std::exception&) {
      fail(path, line_no, "expected integer 'row,col'");
    }
  }
  return out;
}

void write_predictions_csv(
    const std::string& path,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& requests,
    const std::vector<double>& values) {
  if (requests.size() != values.size())
    throw ParameterError("write_predictions_csv: size mismatch");
  auto out = open_for_write(path);
  out << "row,col,value\n";
  for (std::size_t q = 0; q < requests.size(); ++q)
    out << requests[q].first << ',' << requests[q].second << ',' << values[q]
        << '\n';
}

void write_trace_csv(const std::string& path,
                     const std::vector<StepRecord>& trace) {
  auto out = open_for_write(path);
  out << "t,eta,m_t,n_t,wall_ms\n";
  for (const auto& rec : trace)
    out << rec.t << ',' << rec.eta << ',' << rec.m_t << ',' << rec.n_t << ','
        << rec.wall_ms << '\n';
}

}  // namespace fastimpute
