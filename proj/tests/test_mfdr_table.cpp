#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "mfdr/dataset.hpp"
#include "mfdr/errors.hpp"
#include "mfdr/mfdr_table.hpp"
#include "mfdr/rng.hpp"
#include "mfdr/solver.hpp"

using namespace mfdr;

namespace {

Eigen::MatrixXd random_matrix(int n, int p, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd X(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = rng.normal();
  return X;
}

Dataset orthonormal_noise_dataset(int n, int p, double sigma,
                                  std::uint64_t seed) {
  Eigen::MatrixXd raw = random_matrix(n, p, seed);
  raw.rowwise() -= raw.colwise().mean();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  Dataset ds;
  ds.X = std::sqrt(static_cast<double>(n)) * Q;
  Rng rng(seed + 101);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = sigma * rng.normal();
  ds.y = y.array() - y.mean();
  ds.y_mean = y.mean();
  ds.col_means = Eigen::VectorXd::Zero(p);
  ds.col_scales = Eigen::VectorXd::Ones(p);
  for (int j = 0; j < p; ++j)
    ds.feature_names.push_back("q" + std::to_string(j + 1));
  return ds;
}

MfdrRow make_row(double lambda, int n_selected, double mfdr,
                 bool defined = true) {
  MfdrRow r;
  r.lambda = lambda;
  r.n_selected = n_selected;
  r.mfdr = mfdr;
  r.defined = defined;
  if (!defined) {
    r.mfdr = std::nan("");
    r.sigma_hat = std::nan("");
    r.expected_fd = std::nan("");
  }
  return r;
}

}  // namespace

TEST_CASE("normal cdf matches tabulated values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-9));
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(normal_cdf(-3.0) ==
        doctest::Approx(0.0013498980316300933).epsilon(1e-10));
  for (const double x : {-2.3, -0.7, 0.4, 1.9})
    CHECK(normal_cdf(x) + normal_cdf(-x) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("expected false-discovery count at a frozen operating point") {
  // n=100, p=60, lambda=0.3, sigma=1: 2 * 60 * Phi(-3)
  CHECK(analytic_expected_fd(100, 60, 0.3, 1.0) ==
        doctest::Approx(0.16198776379561119).epsilon(1e-10));
  // doubling sigma halves the standardized threshold: 120 * Phi(-1.5)
  CHECK(analytic_expected_fd(100, 60, 0.3, 2.0) ==
        doctest::Approx(120.0 * 0.06680720126885807).epsilon(1e-10));
}

TEST_CASE("expected false discoveries move the right way") {
  CHECK(analytic_expected_fd(100, 10, 0.2, 1.0) <
        analytic_expected_fd(100, 100, 0.2, 1.0));
  CHECK(analytic_expected_fd(100, 100, 0.2, 1.0) <
        analytic_expected_fd(100, 1000, 0.2, 1.0));
  CHECK(analytic_expected_fd(100, 60, 0.3, 1.0) <
        analytic_expected_fd(100, 60, 0.2, 1.0));
  CHECK(analytic_expected_fd(100, 60, 0.2, 1.0) <
        analytic_expected_fd(100, 60, 0.1, 1.0));
}

TEST_CASE("sigma estimate above the entry penalty is the response scale") {
  const Eigen::MatrixXd X = random_matrix(50, 5, 7);
  const Eigen::VectorXd y = random_matrix(50, 1, 8).col(0);
  const Dataset ds = standardize(X, y);
  const double lm = lambda_max(ds);
  PenaltySpec spec;
  spec.lambda_grid = {1.2 * lm, 1.1 * lm};
  const PathFit fit = fit_path(ds, spec);
  REQUIRE(fit.n_selected(0) == 0);
  const double expect = std::sqrt(ds.y.squaredNorm() / ds.n());
  CHECK(estimate_sigma(ds, fit, 0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("null sigma estimate concentrates around the true noise scale") {
  // y = 2 * eps with nothing selected: sigma_hat^2 is a scaled chi-square
  // with ~n degrees of freedom, so 200 replicates stay well inside (1.4, 2.6)
  const int n = 100;
  double sum = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::MatrixXd X = random_matrix(n, 5, 1000 + rep);
    Rng rng(5000 + rep);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = 2.0 * rng.normal();
    const Dataset ds = standardize(X, y);
    const double lm = lambda_max(ds);
    PenaltySpec spec;
    spec.lambda_grid = {1.2 * lm, 1.1 * lm};
    const PathFit fit = fit_path(ds, spec);
    const double s = estimate_sigma(ds, fit, 0);
    CHECK(s > 1.4);
    CHECK(s < 2.6);
    sum += s;
  }
  CHECK(sum / 200 == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("saturated selection makes the variance estimate unavailable") {
  const Eigen::MatrixXd X = random_matrix(5, 10, 21);
  const Eigen::VectorXd y = random_matrix(5, 1, 22).col(0);
  const Dataset ds = standardize(X, y);
  PathFit fit;
  fit.spec.lambda_grid = {0.5, 0.4};
  fit.beta = Eigen::MatrixXd::Zero(10, 2);
  for (int j = 0; j < 6; ++j) fit.beta(j, 1) = 0.1;  // 6 >= n = 5
  fit.residuals.resize(5, 2);
  fit.residuals.col(0) = ds.y;
  fit.residuals.col(1) = ds.y - ds.X * fit.beta.col(1);
  fit.selected = {{}, {0, 1, 2, 3, 4, 5}};
  fit.kkt_violation = Eigen::VectorXd::Zero(2);
  fit.converged = {1, 1};

  CHECK_THROWS_AS(estimate_sigma(ds, fit, 1), NumericalError);
  const MfdrTable table = mfdr_analytic(ds, fit);
  REQUIRE(table.n_rows() == 2);
  CHECK(table.rows[0].defined);
  CHECK(table.rows[0].mfdr == 0.0);  // empty selection
  CHECK_FALSE(table.rows[1].defined);
  CHECK(std::isnan(table.rows[1].mfdr));
  CHECK(std::isnan(table.rows[1].sigma_hat));
}

TEST_CASE("analytic table rows recompute from their own ingredients") {
  const Eigen::MatrixXd X = random_matrix(60, 25, 31);
  Rng rng(32);
  Eigen::VectorXd y(60);
  for (int i = 0; i < 60; ++i)
    y[i] = X(i, 0) + X(i, 1) - X(i, 2) + rng.normal();
  const Dataset ds = standardize(X, y);

  for (const auto family : {PenaltyFamily::lasso, PenaltyFamily::enet}) {
    PenaltySpec spec;
    spec.family = family;
    spec.alpha = family == PenaltyFamily::enet ? 0.5 : 1.0;
    spec.lambda_grid = default_grid(ds, 12, 0.05);
    const PathFit fit = fit_path(ds, spec);
    const MfdrTable table = mfdr_analytic(ds, fit);
    REQUIRE(table.n_rows() == 12);
    CHECK(table.method == "analytic");
    for (int i = 0; i < 12; ++i) {
      const MfdrRow& row = table.rows[i];
      CHECK(row.lambda == spec.lambda_grid[i]);
      CHECK(row.n_selected == fit.n_selected(i));
      if (!row.defined) continue;
      const double sigma = estimate_sigma(ds, fit, i);
      CHECK(row.sigma_hat == doctest::Approx(sigma).epsilon(1e-14));
      // the selection threshold is alpha * lambda under the l2 mixture
      const double fd =
          analytic_expected_fd(ds.n(), ds.p(), spec.threshold(i), sigma);
      CHECK(row.expected_fd == doctest::Approx(fd).epsilon(1e-14));
      if (row.n_selected == 0) {
        CHECK(row.mfdr == 0.0);
      } else {
        CHECK(row.mfdr ==
              doctest::Approx(std::min(1.0, fd / row.n_selected))
                  .epsilon(1e-14));
        CHECK(row.mfdr >= 0.0);
        CHECK(row.mfdr <= 1.0);
      }
    }
  }
}

TEST_CASE("standardized noise scores look standard normal when independent") {
  const int n = 300, p = 150;
  const Dataset ds = orthonormal_noise_dataset(n, p, 1.0, 41);
  PenaltySpec spec;
  const double lm = lambda_max(ds);
  spec.lambda_grid = {std::max(1.01 * lm, 0.13), 0.12, 0.1};
  const PathFit fit = fit_path(ds, spec);
  std::vector<int> all;
  for (int j = 0; j < p; ++j) all.push_back(j);
  const auto scores = noise_score_distribution(ds, fit, 2, all);
  REQUIRE(scores.size() == static_cast<size_t>(p));
  double mean = 0, var = 0;
  for (const double s : scores) mean += s;
  mean /= p;
  for (const double s : scores) var += (s - mean) * (s - mean);
  var /= p - 1;
  CHECK(std::abs(mean) < 0.25);  // ~3 standard errors at p = 150
  CHECK(var > 0.7);
  CHECK(var < 1.35);
}

TEST_CASE("smallest-penalty-under-target rule walks the table literally") {
  MfdrTable t;
  t.method = "analytic";

  SUBCASE("a nonempty qualifying row wins") {
    t.rows = {make_row(1.0, 0, 0.0), make_row(0.5, 2, 0.05),
              make_row(0.25, 5, 0.2)};
    const ChosenLambda ch = choose_lambda_mfdr(t, 0.1);
    CHECK(ch.status == LambdaChoice::ok);
    CHECK(ch.index == 1);
    CHECK(ch.lambda == 0.5);
  }
  SUBCASE("only the empty head qualifies") {
    t.rows = {make_row(1.0, 0, 0.0), make_row(0.5, 3, 0.5)};
    const ChosenLambda ch = choose_lambda_mfdr(t, 0.1);
    CHECK(ch.status == LambdaChoice::empty_only);
    CHECK(ch.index == 0);
  }
  SUBCASE("nothing qualifies") {
    t.rows = {make_row(1.0, 1, 0.4), make_row(0.5, 3, 0.5)};
    const ChosenLambda ch = choose_lambda_mfdr(t, 0.1);
    CHECK(ch.status == LambdaChoice::none);
    CHECK(ch.index == -1);
  }
  SUBCASE("undefined rows never qualify") {
    t.rows = {make_row(1.0, 0, 0.0), make_row(0.5, 2, 0.05),
              make_row(0.25, 6, 0.0, /*defined=*/false)};
    const ChosenLambda ch = choose_lambda_mfdr(t, 0.1);
    CHECK(ch.status == LambdaChoice::ok);
    CHECK(ch.index == 1);
  }
  SUBCASE("non-monotone tables still pick the smallest qualifying penalty") {
    t.rows = {make_row(1.0, 1, 0.05), make_row(0.5, 2, 0.3),
              make_row(0.25, 4, 0.08), make_row(0.125, 9, 0.6)};
    const ChosenLambda ch = choose_lambda_mfdr(t, 0.1);
    CHECK(ch.status == LambdaChoice::ok);
    CHECK(ch.index == 2);
    CHECK(ch.lambda == 0.25);
  }
  SUBCASE("target must be a proper fraction") {
    t.rows = {make_row(1.0, 0, 0.0)};
    CHECK_THROWS_AS(choose_lambda_mfdr(t, 0.0), InvalidInput);
    CHECK_THROWS_AS(choose_lambda_mfdr(t, 1.0), InvalidInput);
    CHECK_THROWS_AS(choose_lambda_mfdr(t, -0.2), InvalidInput);
  }
}

TEST_CASE("chosen penalty on a real table has no qualifying row below it") {
  const Eigen::MatrixXd X = random_matrix(80, 40, 51);
  Rng rng(52);
  Eigen::VectorXd y(80);
  for (int i = 0; i < 80; ++i)
    y[i] = 0.8 * (X(i, 0) + X(i, 1) + X(i, 2)) + rng.normal();
  const Dataset ds = standardize(X, y);
  PenaltySpec spec;
  spec.lambda_grid = default_grid(ds, 30, 0.05);
  const PathFit fit = fit_path(ds, spec);
  const MfdrTable table = mfdr_analytic(ds, fit);
  const double target = 0.3;
  const ChosenLambda ch = choose_lambda_mfdr(table, target);
  if (ch.status != LambdaChoice::none) {
    REQUIRE(ch.index >= 0);
    CHECK(table.rows[ch.index].mfdr < target);
    for (int k = ch.index + 1; k < table.n_rows(); ++k) {
      const MfdrRow& row = table.rows[k];
      CHECK((!row.defined || row.mfdr >= target));
    }
  }
}
