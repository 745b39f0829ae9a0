#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>
#include <Eigen/QR>

#include "fastimpute/errors.hpp"
#include "fastimpute/objective.hpp"
#include "oracles.hpp"

using namespace fastimpute;

TEST_CASE("zero-valued matrix gives zero cost and gradient") {
  auto obs = ObservedMatrix::from_entries(
      3, 4, {{0, 0, 0.0}, {1, 2, 0.0}, {2, 3, 0.0}});
  auto features = oracles::random_features(3, 4, 1);
  auto s = oracles::random_sphere(2, 3, 2);
  auto rows = all_rows(obs);
  auto cols = all_cols(obs);
  auto value = evaluate(s, obs, features, 10.0, rows, cols);
  CHECK(value.cost == 0.0);
  CHECK(value.gradient.norm() == 0.0);
}

TEST_CASE("cost matches the dense inversion oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto obs = oracles::random_observed(6, 5, 0.6, 100 + seed);
    auto features = oracles::random_features(4, 5, 200 + seed);
    auto s = oracles::random_sphere(2, 4, 300 + seed);
    auto rows = all_rows(obs);
    auto cols = all_cols(obs);
    for (double gamma : {1.0, 10.0, 1e3}) {
      const double reduced = cost(s, obs, features, gamma, rows, cols);
      const double dense =
          oracles::dense_cost(s, obs, features, gamma, rows, cols);
      CHECK(std::abs(reduced - dense) <= 1e-10 * std::max(1.0, dense));
    }
  }
}

TEST_CASE("identity features match the dense oracle too") {
  auto obs = oracles::random_observed(7, 6, 0.5, 9);
  auto features = FeatureMatrix::identity(6);
  auto s = oracles::random_sphere(3, 6, 10);
  auto rows = all_rows(obs);
  auto cols = all_cols(obs);
  const double reduced = cost(s, obs, features, 100.0, rows, cols);
  const double dense = oracles::dense_cost(s, obs, features, 100.0, rows, cols);
  CHECK(std::abs(reduced - dense) <= 1e-10 * std::max(1.0, dense));
}

TEST_CASE("gradient matches central finite differences") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto obs = oracles::random_observed(6, 5, 0.6, 400 + seed);
    auto features = oracles::random_features(4, 5, 500 + seed);
    auto s = oracles::random_sphere(2, 4, 600 + seed);
    auto rows = all_rows(obs);
    auto cols = all_cols(obs);
    const double gamma = 10.0;
    const Eigen::MatrixXd g = gradient(s, obs, features, gamma, rows, cols);
    const Eigen::MatrixXd fd =
        oracles::fd_gradient(s, obs, features, gamma, rows, cols);
    const double scale = std::max(fd.cwiseAbs().maxCoeff(), 1e-8);
    for (std::int64_t r = 0; r < g.rows(); ++r)
      for (std::int64_t c = 0; c < g.cols(); ++c) {
        const double denom = std::max(std::abs(fd(r, c)), 1e-4 * scale);
        CHECK(std::abs(g(r, c) - fd(r, c)) / denom < 1e-5);
      }
  }
}

TEST_CASE("identity features: gradient columns follow observed columns") {
  auto obs = ObservedMatrix::from_entries(
      3, 6, {{0, 1, 1.5}, {1, 4, -2.0}, {2, 1, 0.5}});
  auto features = FeatureMatrix::identity(6);
  auto s = oracles::random_sphere(2, 6, 11);
  auto rows = all_rows(obs);
  auto cols = all_cols(obs);
  const Eigen::MatrixXd g = gradient(s, obs, features, 50.0, rows, cols);
  for (std::int64_t c = 0; c < 6; ++c) {
    const bool observed = (c == 1 || c == 4);
    if (!observed) CHECK(g.col(c).norm() == 0.0);
  }
  CHECK(g.col(1).norm() > 0.0);
  CHECK(g.col(4).norm() > 0.0);
}

TEST_CASE("fused evaluation is bit-identical to separate calls") {
  auto obs = oracles::random_observed(8, 6, 0.5, 21);
  auto features = oracles::random_features(5, 6, 22);
  auto s = oracles::random_sphere(3, 5, 23);
  auto rows = all_rows(obs);
  auto cols = all_cols(obs);
  auto fused = evaluate(s, obs, features, 1e3, rows, cols);
  CHECK(fused.cost == cost(s, obs, features, 1e3, rows, cols));
  CHECK(oracles::exact_equal(fused.gradient,
                             gradient(s, obs, features, 1e3, rows, cols)));
}

TEST_CASE("fused evaluation performs one factorization per selected row") {
  auto obs = oracles::random_observed(50, 10, 0.4, 31);
  auto features = FeatureMatrix::identity(10);
  auto s = oracles::random_sphere(2, 10, 32);
  std::vector<std::int64_t> rows(20);
  std::iota(rows.begin(), rows.end(), 5);
  auto cols = all_cols(obs);
  std::int64_t nonempty = 0;
  for (auto i : rows) nonempty += obs.row_size(i) > 0 ? 1 : 0;
  const std::int64_t before = factorization_count();
  (void)evaluate(s, obs, features, 1e3, rows, cols);
  CHECK(factorization_count() - before == nonempty);
}

TEST_CASE("restricted column sets agree with the explicit submatrix") {
  // Restricting to a column subset must equal evaluating a matrix that
  // only contains those columns' entries (same column indexing).
  auto obs = oracles::random_observed(6, 8, 0.7, 41);
  auto features = FeatureMatrix::identity(8);
  auto s = oracles::random_sphere(2, 8, 42);
  auto rows = all_rows(obs);
  std::vector<std::int32_t> cols = {1, 2, 5, 6};

  std::vector<Entry> kept;
  for (const auto& e : obs.entries())
    if (e.col == 1 || e.col == 2 || e.col == 5 || e.col == 6) kept.push_back(e);
  auto sub = ObservedMatrix::from_entries(6, 8, std::move(kept));
  auto allc = all_cols(sub);

  auto restricted = evaluate(s, obs, features, 20.0, rows, cols);
  auto explicit_sub = evaluate(s, sub, features, 20.0, rows, allc);
  CHECK(std::abs(restricted.cost - explicit_sub.cost) <=
        1e-12 * std::max(1.0, explicit_sub.cost));
  CHECK((restricted.gradient - explicit_sub.gradient).norm() <=
        1e-12 * std::max(1.0, explicit_sub.gradient.norm()));
}

TEST_CASE("cost bounds and gamma monotonicity") {
  auto obs = oracles::random_observed(6, 5, 0.6, 51);
  auto features = oracles::random_features(4, 5, 52);
  auto s = oracles::random_sphere(2, 4, 53);
  auto rows = all_rows(obs);
  auto cols = all_cols(obs);

  double upper = 0.0;
  for (std::int64_t i = 0; i < obs.n_rows(); ++i)
    for (double v : obs.row_values(i)) upper += v * v;
  upper /= static_cast<double>(obs.n_rows());

  double prev = upper + 1.0;
  for (double gamma : {1e-3, 1.0, 1e3, 1e6}) {
    const double c = cost(s, obs, features, gamma, rows, cols);
    CHECK(c >= 0.0);
    CHECK(c <= upper * (1.0 + 1e-12));
    CHECK(c <= prev + 1e-12);
    prev = c;
  }

  // gamma -> 0 limit: cost approaches the raw mean squared magnitude.
  CHECK(cost(s, obs, features, 1e-12, rows, cols) ==
        doctest::Approx(upper).epsilon(1e-6));
}

TEST_CASE("cost is invariant under orthogonal rotation of S") {
  auto obs = oracles::random_observed(6, 5, 0.6, 61);
  auto features = oracles::random_features(4, 5, 62);
  auto s = oracles::random_sphere(3, 4, 63);
  auto rows = all_rows(obs);
  auto cols = all_cols(obs);

  Eigen::MatrixXd rand3(3, 3);
  Rng rng(64);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) rand3(i, j) = rng.normal();
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(rand3).householderQ();
  auto rotated = SphereCoefficients::normalized(q * s.data());

  const double c0 = cost(s, obs, features, 100.0, rows, cols);
  const double c1 = cost(rotated, obs, features, 100.0, rows, cols);
  CHECK(std::abs(c0 - c1) <= 1e-10 * std::max(1.0, c0));
}

TEST_CASE("empty row selection is a parameter error; empty rows contribute 0") {
  auto obs = oracles::random_observed(4, 4, 0.5, 71);
  auto features = FeatureMatrix::identity(4);
  auto s = oracles::random_sphere(2, 4, 72);
  auto cols = all_cols(obs);
  CHECK_THROWS_AS(
      cost(s, obs, features, 10.0, std::span<const std::int64_t>{}, cols),
      ParameterError);

  // A row whose observed columns are all excluded contributes zero but
  // still counts in the mean.
  auto obs2 = ObservedMatrix::from_entries(2, 4, {{0, 0, 3.0}, {1, 3, 2.0}});
  std::vector<std::int32_t> only0 = {0};
  auto rows2 = all_rows(obs2);
  const double both = cost(s, obs2, features, 10.0, rows2, only0);
  std::vector<std::int64_t> row0 = {0};
  const double solo = cost(s, obs2, features, 10.0, row0, only0);
  CHECK(both == doctest::Approx(solo / 2.0).epsilon(1e-14));
}

TEST_CASE("multithreaded evaluation is bit-identical to single-threaded") {
  auto obs = oracles::random_observed(600, 12, 0.4, 81);
  auto features = FeatureMatrix::identity(12);
  auto s = oracles::random_sphere(3, 12, 82);
  auto rows = all_rows(obs);
  auto cols = all_cols(obs);
  auto one = evaluate(s, obs, features, 1e4, rows, cols, {.threads = 1});
  auto four = evaluate(s, obs, features, 1e4, rows, cols, {.threads = 4});
  CHECK(one.cost == four.cost);
  CHECK(oracles::exact_equal(one.gradient, four.gradient));
}
