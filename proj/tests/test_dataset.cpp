#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "mfdr/csv.hpp"
#include "mfdr/dataset.hpp"
#include "mfdr/errors.hpp"
#include "mfdr/rng.hpp"

using namespace mfdr;

namespace {

Eigen::MatrixXd random_matrix(int n, int p, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd X(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = rng.normal();
  return X;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path =
      (std::filesystem::temp_directory_path() / name).string();
  write_text_file(path, content);
  return path;
}

}  // namespace

TEST_CASE("standardize centers and scales a known column") {
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  Eigen::VectorXd y(3);
  y << 4, 5, 9;
  const Dataset ds = standardize(X, y);
  const double s = std::sqrt(1.5);  // (-1,0,1) scaled to mean-square one
  CHECK(ds.X(0, 0) == doctest::Approx(-s).epsilon(1e-12));
  CHECK(ds.X(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ds.X(2, 0) == doctest::Approx(s).epsilon(1e-12));
  CHECK(ds.col_means[0] == doctest::Approx(2.0));
  CHECK(ds.col_scales[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(ds.y_mean == doctest::Approx(6.0));
  CHECK(ds.y[0] == doctest::Approx(-2.0));
  CHECK(ds.y[1] == doctest::Approx(-1.0));
  CHECK(ds.y[2] == doctest::Approx(3.0));
  CHECK(ds.feature_names == std::vector<std::string>{"x1"});
  ds.validate();
}

TEST_CASE("standardize is idempotent on its own output") {
  const Eigen::MatrixXd X = random_matrix(20, 5, 11);
  Eigen::VectorXd y = random_matrix(20, 1, 12).col(0);
  const Dataset ds = standardize(X, y);
  const Dataset again = standardize(ds.X, ds.y, ds.feature_names);
  CHECK((again.X - ds.X).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((again.y - ds.y).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(again.col_means.cwiseAbs().maxCoeff() < 1e-12);
  CHECK((again.col_scales.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("standardized moments recompute to zero mean and unit mean square") {
  Eigen::MatrixXd X = random_matrix(50, 8, 21);
  // wildly different raw scales and offsets per column
  for (int j = 0; j < 8; ++j)
    X.col(j) = X.col(j) * std::pow(10.0, j - 4) +
               Eigen::VectorXd::Constant(50, 3.0 * j);
  Eigen::VectorXd y = 100.0 + 5.0 * random_matrix(50, 1, 22).col(0).array();
  const Dataset ds = standardize(X, y);
  for (int j = 0; j < ds.p(); ++j) {
    CHECK(std::abs(ds.X.col(j).mean()) < 1e-12);
    CHECK(ds.X.col(j).squaredNorm() / ds.n() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(std::abs(ds.y.mean()) < 1e-12);
  ds.validate();
}

TEST_CASE("validate rejects tampered invariants") {
  const Eigen::MatrixXd X = random_matrix(10, 3, 31);
  const Eigen::VectorXd y = random_matrix(10, 1, 32).col(0);
  Dataset ds = standardize(X, y);
  ds.X(0, 0) += 1e-3;
  CHECK_THROWS_AS(ds.validate(), InvalidInput);
}

TEST_CASE("constant column is rejected by name") {
  Eigen::MatrixXd X = random_matrix(10, 3, 41);
  X.col(1).setConstant(7.5);
  const Eigen::VectorXd y = random_matrix(10, 1, 42).col(0);
  try {
    standardize(X, y, {"height", "width", "depth"});
    FAIL("expected a constant-column rejection");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("width") != std::string::npos);
  }
}

TEST_CASE("non-finite entries and degenerate shapes are rejected") {
  Eigen::MatrixXd X = random_matrix(10, 3, 51);
  Eigen::VectorXd y = random_matrix(10, 1, 52).col(0);
  SUBCASE("NaN predictor") {
    X(3, 1) = std::nan("");
    CHECK_THROWS_AS(standardize(X, y), InvalidInput);
  }
  SUBCASE("infinite response") {
    y[2] = INFINITY;
    CHECK_THROWS_AS(standardize(X, y), InvalidInput);
  }
  SUBCASE("single observation") {
    CHECK_THROWS_AS(standardize(X.topRows(1), y.head(1)), InvalidInput);
  }
  SUBCASE("constant response") {
    y.setConstant(3.0);
    CHECK_THROWS_AS(standardize(X, y), InvalidInput);
  }
  SUBCASE("zero columns") {
    Eigen::MatrixXd empty(10, 0);
    CHECK_THROWS_AS(standardize(empty, y), InvalidInput);
  }
}

TEST_CASE("lambda_max matches a brute-force scan") {
  const Eigen::MatrixXd X = random_matrix(40, 7, 61);
  const Eigen::VectorXd y = random_matrix(40, 1, 62).col(0);
  const Dataset ds = standardize(X, y);
  double brute = 0.0;
  for (int j = 0; j < ds.p(); ++j)
    brute = std::max(brute, std::abs(ds.X.col(j).dot(ds.y)) / ds.n());
  CHECK(lambda_max(ds) == doctest::Approx(brute).epsilon(1e-14));
}

TEST_CASE("response orthogonal to every column makes lambda_max an error") {
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  Eigen::VectorXd y(3);
  y << 1, -2, 1;  // centered and orthogonal to the centered column
  const Dataset ds = standardize(X, y);
  CHECK_THROWS_AS(lambda_max(ds), InvalidInput);
}

TEST_CASE("log-spaced grid hits exact endpoints with geometric spacing") {
  const auto g = log_spaced_grid(1.0, 0.01, 3);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(g[2] == 0.01);
  CHECK_THROWS_AS(log_spaced_grid(1.0, 0.01, 1), InvalidInput);
  CHECK_THROWS_AS(log_spaced_grid(0.01, 1.0, 5), InvalidInput);
  CHECK_THROWS_AS(log_spaced_grid(1.0, 0.0, 5), InvalidInput);
}

TEST_CASE("default grid ratio depends on the aspect ratio") {
  const Eigen::VectorXd y_tall = random_matrix(30, 1, 72).col(0);
  const Dataset tall = standardize(random_matrix(30, 5, 71), y_tall);
  const auto g1 = default_grid(tall, 10);
  CHECK(g1.front() == lambda_max(tall));
  CHECK(g1.back() == doctest::Approx(0.001 * lambda_max(tall)).epsilon(1e-12));

  const Eigen::VectorXd y_wide = random_matrix(10, 1, 74).col(0);
  const Dataset wide = standardize(random_matrix(10, 25, 73), y_wide);
  const auto g2 = default_grid(wide, 10);
  CHECK(g2.back() == doctest::Approx(0.05 * lambda_max(wide)).epsilon(1e-12));

  const auto g3 = default_grid(tall, 7, 0.2);
  CHECK(g3.size() == 7);
  CHECK(g3.back() == doctest::Approx(0.2 * lambda_max(tall)).epsilon(1e-12));
}

TEST_CASE("csv reader parses a table and locates columns") {
  const auto path = write_temp("mfdr_test_ok.csv", "a,b,y\n1,2,3\n4,5.5,-6\n");
  const CsvTable t = read_csv(path);
  CHECK(t.n_rows() == 2);
  CHECK(t.n_cols() == 3);
  CHECK(t.header[1] == "b");
  CHECK(t.rows[1][1] == 5.5);
  CHECK(t.column("y") == 2);
  CHECK_THROWS_AS(t.column("missing"), InvalidInput);
  std::remove(path.c_str());
}

TEST_CASE("csv reader rejects malformed input with its location") {
  SUBCASE("ragged row") {
    const auto path = write_temp("mfdr_test_ragged.csv", "a,b\n1,2\n3\n");
    try {
      read_csv(path);
      FAIL("expected a ragged-row rejection");
    } catch (const InvalidInput& e) {
      // rows are numbered as physical file lines, header included
      CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
    std::remove(path.c_str());
  }
  SUBCASE("non-numeric cell") {
    const auto path = write_temp("mfdr_test_text.csv", "a,b\n1,apple\n");
    CHECK_THROWS_AS(read_csv(path), InvalidInput);
    std::remove(path.c_str());
  }
  SUBCASE("empty cell") {
    const auto path = write_temp("mfdr_test_empty.csv", "a,b\n1,\n");
    CHECK_THROWS_AS(read_csv(path), InvalidInput);
    std::remove(path.c_str());
  }
  SUBCASE("non-finite cell") {
    const auto path = write_temp("mfdr_test_inf.csv", "a,b\n1,inf\n");
    CHECK_THROWS_AS(read_csv(path), InvalidInput);
    std::remove(path.c_str());
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_csv("/nonexistent/nowhere.csv"), InvalidInput);
  }
}

TEST_CASE("format_double round-trips exactly") {
  for (const double v : {0.1, 1.0 / 3.0, 1e-300, 6.02e23, -0.0, 123456.789,
                         3.141592653589793, -2.5e-8}) {
    const std::string s = format_double(v);
    const double back = parse_double(s, "round trip");
    CHECK(back == v);
    CHECK(std::signbit(back) == std::signbit(v));
  }
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("dataset_from_csv splits out the named response") {
  const auto path = write_temp("mfdr_test_ds.csv",
                               "a,y,b\n1,10,7\n2,20,5\n3,15,9\n4,12,2\n");
  const CsvTable t = read_csv(path);
  const Dataset ds = dataset_from_csv(t, "y");
  CHECK(ds.p() == 2);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.y_mean == doctest::Approx(14.25));
  // matches standardizing the same columns by hand
  Eigen::MatrixXd X(4, 2);
  X << 1, 7, 2, 5, 3, 9, 4, 2;
  Eigen::VectorXd y(4);
  y << 10, 20, 15, 12;
  const Dataset manual = standardize(X, y, {"a", "b"});
  CHECK((ds.X - manual.X).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((ds.y - manual.y).cwiseAbs().maxCoeff() < 1e-14);

  // separately supplied response
  const Dataset ds2 = dataset_from_csv(t, y);
  CHECK(ds2.p() == 3);
  CHECK(ds2.feature_names == std::vector<std::string>{"a", "y", "b"});
  std::remove(path.c_str());
}

TEST_CASE("seed derivation separates streams") {
  const std::uint64_t a = derive_seed(42, 0);
  const std::uint64_t b = derive_seed(42, 1);
  const std::uint64_t c = derive_seed(43, 0);
  CHECK(a != b);
  CHECK(a != c);
  CHECK(derive_seed(42, 0) == a);  // pure function
}

TEST_CASE("rng produces a deterministic permutation that is a bijection") {
  Rng rng(123);
  const auto perm = rng.permutation(10);
  std::vector<bool> seen(10, false);
  for (const int v : perm) {
    REQUIRE(v >= 0);
    REQUIRE(v < 10);
    CHECK(!seen[v]);
    seen[v] = true;
  }
  Rng rng2(123);
  CHECK(rng2.permutation(10) == perm);
  Rng rng3(124);
  CHECK(rng3.permutation(10) != perm);
}

TEST_CASE("rng moments are sane") {
  Rng rng(7);
  double su = 0, sn = 0, sn2 = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    su += rng.uniform();
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / N == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / N) < 0.02);  // 9 MC standard errors
  CHECK(sn2 / N == doctest::Approx(1.0).epsilon(0.02));
}
