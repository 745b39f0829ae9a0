#include <algorithm>
#include <cmath>
#include <set>

#include <doctest.h>
#include <Eigen/SVD>

#include "fastimpute/errors.hpp"
#include "fastimpute/observed.hpp"
#include "fastimpute/rng.hpp"
#include "fastimpute/synthetic.hpp"

using namespace fastimpute;

TEST_CASE("observed matrix construction validates and sorts") {
  auto obs = ObservedMatrix::from_entries(
      2, 3, {{1, 2, 5.0}, {0, 1, 2.0}, {0, 0, 1.0}});
  CHECK(obs.omega_size() == 3);
  CHECK(obs.alpha() == doctest::Approx(0.5));
  CHECK(obs.row_cols(0)[0] == 0);
  CHECK(obs.row_cols(0)[1] == 1);
  CHECK(obs.row_values(1)[0] == 5.0);

  // In-memory construction reports parameter errors; the file readers
  // wrap them into input errors with file/line context.
  CHECK_THROWS_AS(ObservedMatrix::from_entries(2, 3, {{2, 0, 1.0}}),
                  ParameterError);
  CHECK_THROWS_AS(ObservedMatrix::from_entries(2, 3, {{0, 3, 1.0}}),
                  ParameterError);
  CHECK_THROWS_AS(
      ObservedMatrix::from_entries(2, 3, {{0, 0, 1.0}, {0, 0, 2.0}}),
      ParameterError);
  CHECK_THROWS_AS(ObservedMatrix::from_entries(2, 3, {{0, 0, NAN}}),
                  ParameterError);
}

TEST_CASE("transpose maps entries and is an involution") {
  auto obs = ObservedMatrix::from_entries(2, 3, {{0, 2, 5.0}, {1, 0, -1.0}});
  auto t = obs.transposed();
  CHECK(t.n_rows() == 3);
  CHECK(t.n_cols() == 2);
  CHECK(t.row_cols(2)[0] == 0);
  CHECK(t.row_values(2)[0] == 5.0);
  CHECK(t.alpha() == doctest::Approx(obs.alpha()));

  auto back = t.transposed();
  auto e0 = obs.entries();
  auto e1 = back.entries();
  REQUIRE(e0.size() == e1.size());
  for (std::size_t i = 0; i < e0.size(); ++i) {
    CHECK(e0[i].row == e1[i].row);
    CHECK(e0[i].col == e1[i].col);
    CHECK(e0[i].value == e1[i].value);
  }
}

TEST_CASE("column slice reindexes and keeps row count") {
  auto obs = ObservedMatrix::from_entries(
      2, 5, {{0, 0, 1.0}, {0, 3, 2.0}, {1, 4, 3.0}});
  auto slice = obs.column_slice(3, 5);
  CHECK(slice.n_rows() == 2);
  CHECK(slice.n_cols() == 2);
  CHECK(slice.omega_size() == 2);
  CHECK(slice.row_cols(0)[0] == 0);  // global column 3
  CHECK(slice.row_values(0)[0] == 2.0);
  CHECK(slice.row_cols(1)[0] == 1);  // global column 4
}

TEST_CASE("synthetic generation: exact counts, rank bound, determinism") {
  SUBCASE("nothing masked") {
    SyntheticParams params{.n = 4, .m = 3, .p = 3, .k = 2, .mu = 0.0, .seed = 1};
    auto inst = generate_synthetic(params);
    CHECK(inst.observed.omega_size() == 12);
    for (const auto& e : inst.observed.entries())
      CHECK(e.value == inst.truth(e.row, e.col));
  }

  SUBCASE("mask count and rank") {
    SyntheticParams params{
        .n = 100, .m = 50, .p = 10, .k = 5, .mu = 0.95, .seed = 7};
    auto inst = generate_synthetic(params);
    CHECK(inst.observed.omega_size() == 250);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(inst.truth);
    const auto& sv = svd.singularValues();
    for (int i = 5; i < sv.size(); ++i) CHECK(sv[i] < 1e-10 * sv[0]);
  }

  SUBCASE("bit-identical regeneration") {
    SyntheticParams params{
        .n = 30, .m = 20, .p = 6, .k = 3, .mu = 0.5, .seed = 42};
    auto a = generate_synthetic(params);
    auto b = generate_synthetic(params);
    CHECK((a.truth.array() == b.truth.array()).all());
    auto ea = a.observed.entries();
    auto eb = b.observed.entries();
    REQUIRE(ea.size() == eb.size());
    for (std::size_t i = 0; i < ea.size(); ++i) {
      CHECK(ea[i].row == eb[i].row);
      CHECK(ea[i].col == eb[i].col);
      CHECK(ea[i].value == eb[i].value);
    }
  }

  SUBCASE("identity protocol") {
    SyntheticParams params{.n = 10,
                           .m = 8,
                           .p = 8,
                           .k = 2,
                           .mu = 0.25,
                           .seed = 3,
                           .identity_features = true};
    auto inst = generate_synthetic(params);
    CHECK(inst.features.is_identity());
    CHECK(inst.observed.omega_size() == std::llround(0.75 * 80));
  }

  SUBCASE("dimension violations") {
    CHECK_THROWS_AS(generate_synthetic(SyntheticParams{
                        .n = 4, .m = 3, .p = 3, .k = 4, .mu = 0.0, .seed = 1}),
                    ParameterError);
    CHECK_THROWS_AS(generate_synthetic(SyntheticParams{
                        .n = 4, .m = 3, .p = 3, .k = 2, .mu = 1.0, .seed = 1}),
                    ParameterError);
  }
}

TEST_CASE("validation split partitions the observed set") {
  SyntheticParams params{.n = 10, .m = 10, .p = 4, .k = 2, .mu = 0.9, .seed = 5};
  auto inst = generate_synthetic(params);  // 10 observed entries
  REQUIRE(inst.observed.omega_size() == 10);

  auto [train, holdout] = split_validation(inst.observed, 0.2, 17);
  CHECK(train.omega_size() == 8);
  CHECK(holdout.size() == 2);

  std::set<std::pair<std::int64_t, std::int32_t>> seen;
  for (const auto& e : train.entries()) seen.insert({e.row, e.col});
  for (const auto& e : holdout) {
    CHECK(!seen.count({e.row, e.col}));
    seen.insert({e.row, e.col});
  }
  CHECK(seen.size() == 10);

  auto [train2, holdout2] = split_validation(inst.observed, 0.2, 17);
  CHECK(train2.omega_size() == train.omega_size());
  for (std::size_t i = 0; i < holdout.size(); ++i) {
    CHECK(holdout[i].row == holdout2[i].row);
    CHECK(holdout[i].col == holdout2[i].col);
  }

  auto single = ObservedMatrix::from_entries(1, 1, {{0, 0, 1.0}});
  CHECK_THROWS_AS(split_validation(single, 0.5, 1), ParameterError);
}

TEST_CASE("rng streams are deterministic and samples are distinct") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  Rng c(123);
  auto s = c.sample(1000, 50);
  std::set<std::int64_t> uniq(s.begin(), s.end());
  CHECK(uniq.size() == 50);
  for (auto v : s) {
    CHECK(v >= 0);
    CHECK(v < 1000);
  }

  Rng d(123);
  auto sorted = d.derive(9).sample(100, 100, /*sorted=*/true);
  CHECK(std::is_sorted(sorted.begin(), sorted.end()));
  CHECK(sorted.front() == 0);
  CHECK(sorted.back() == 99);

  Rng e(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = e.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
