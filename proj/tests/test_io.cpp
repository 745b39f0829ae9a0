#include <unistd.h>

#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "fastimpute/errors.hpp"
#include "fastimpute/io.hpp"
#include "oracles.hpp"

using namespace fastimpute;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("fastimpute_io_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("sparse matrix roundtrip") {
  TempDir dir;
  auto obs = oracles::random_observed(13, 9, 0.4, 201, 0.001, 1.0);
  const auto path = dir.file("m.mtx");
  write_matrix_market(path, obs);
  auto back = read_matrix_market(path);
  CHECK(back.n_rows() == 13);
  CHECK(back.n_cols() == 9);
  const auto e0 = obs.entries();
  const auto e1 = back.entries();
  REQUIRE(e0.size() == e1.size());
  for (std::size_t i = 0; i < e0.size(); ++i) {
    CHECK(e0[i].row == e1[i].row);
    CHECK(e0[i].col == e1[i].col);
    CHECK(e0[i].value == e1[i].value);  // precision 17 roundtrips exactly
  }
}

TEST_CASE("dense matrix and csv roundtrips") {
  TempDir dir;
  Rng rng(207);
  Eigen::MatrixXd mat(4, 6);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 6; ++j) mat(i, j) = rng.uniform(-3.0, 3.0);

  write_matrix_market_dense(dir.file("d.mtx"), mat);
  CHECK(oracles::exact_equal(read_matrix_market_dense(dir.file("d.mtx")), mat));

  write_csv_matrix(dir.file("d.csv"), mat);
  CHECK(oracles::exact_equal(read_csv_matrix(dir.file("d.csv")), mat));
}

TEST_CASE("malformed input names the file and line") {
  TempDir dir;
  const auto path = dir.file("bad.mtx");

  SUBCASE("out-of-bounds index") {
    std::ofstream(path) << "%%MatrixMarket matrix coordinate real general\n"
                        << "2 2 2\n"
                        << "1 1 3.5\n"
                        << "3 1 2.0\n";
    try {
      read_matrix_market(path);
      FAIL("expected InputError");
    } catch (const InputError& e) {
      const std::string msg = e.what();
      CHECK(msg.find(path) != std::string::npos);
      CHECK(msg.find(":4") != std::string::npos);
    }
  }

  SUBCASE("garbage entry line") {
    std::ofstream(path) << "%%MatrixMarket matrix coordinate real general\n"
                        << "2 2 1\n"
                        << "1 x 3.5\n";
    try {
      read_matrix_market(path);
      FAIL("expected InputError");
    } catch (const InputError& e) {
      const std::string msg = e.what();
      CHECK(msg.find(":3") != std::string::npos);
    }
  }

  SUBCASE("missing header") {
    std::ofstream(path) << "2 2 1\n1 1 3.5\n";
    CHECK_THROWS_AS(read_matrix_market(path), InputError);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_matrix_market(dir.file("nope.mtx")), InputError);
  }

  SUBCASE("ragged csv") {
    std::ofstream(dir.file("r.csv")) << "1,2,3\n4,5\n";
    CHECK_THROWS_AS(read_csv_matrix(dir.file("r.csv")), InputError);
  }
}

TEST_CASE("request and prediction csvs") {
  TempDir dir;
  std::ofstream(dir.file("req.csv")) << "0,3\n2,1\n";
  auto requests = read_requests_csv(dir.file("req.csv"));
  REQUIRE(requests.size() == 2);
  CHECK(requests[0] == std::pair<std::int64_t, std::int64_t>{0, 3});
  CHECK(requests[1] == std::pair<std::int64_t, std::int64_t>{2, 1});

  write_predictions_csv(dir.file("pred.csv"), requests, {1.5, -2.25});
  std::ifstream in(dir.file("pred.csv"));
  std::string header, line1, line2;
  std::getline(in, header);
  std::getline(in, line1);
  std::getline(in, line2);
  CHECK(header == "row,col,value");
  CHECK(line1.rfind("0,3,", 0) == 0);
  CHECK(line2.rfind("2,1,", 0) == 0);
}

TEST_CASE("trace csv") {
  TempDir dir;
  std::vector<StepRecord> trace = {{1, 0.5, 10, 20, 1.25},
                                   {2, 0.25, 10, 40, 1.5}};
  write_trace_csv(dir.file("trace.csv"), trace);
  std::ifstream in(dir.file("trace.csv"));
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,eta,m_t,n_t,wall_ms");
  int lines = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 2);
}
