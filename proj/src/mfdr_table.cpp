#include "mfdr/mfdr_table.hpp"

#include <cmath>
#include <limits>

#include "mfdr/errors.hpp"

namespace mfdr {

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double analytic_expected_fd(int n, int p, double lambda_eff, double sigma) {
  if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
  return 2.0 * p * normal_cdf(-std::sqrt(static_cast<double>(n)) * lambda_eff / sigma);
}

double estimate_sigma(const Dataset& ds, const PathFit& fit,
                      int lambda_index) {
  if (lambda_index < 0 || lambda_index >= fit.n_lambda())
    throw InvalidInput("lambda index out of range");
  const int n = ds.n();
  const int s = fit.n_selected(lambda_index);
  if (s >= n)
    throw NumericalError("model saturated at lambda index " +
                         std::to_string(lambda_index) + ": " +
                         std::to_string(s) + " features selected with n = " +
                         std::to_string(n));
  const double rss = fit.residuals.col(lambda_index).squaredNorm();
  return std::sqrt(rss / (n - s));
}

MfdrTable mfdr_analytic(const Dataset& ds, const PathFit& fit) {
  const int n = ds.n();
  const int p = ds.p();
  MfdrTable table;
  table.method = "analytic";
  table.rows.resize(fit.n_lambda());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < fit.n_lambda(); ++i) {
    MfdrRow& row = table.rows[i];
    row.lambda = fit.spec.lambda_grid[i];
    row.n_selected = fit.n_selected(i);
    if (row.n_selected >= n) {
      row.defined = false;
      row.sigma_hat = row.expected_fd = row.mfdr = nan;
      continue;
    }
    row.sigma_hat = estimate_sigma(ds, fit, i);
    row.expected_fd =
        analytic_expected_fd(n, p, fit.spec.threshold(i), row.sigma_hat);
    row.mfdr = row.n_selected == 0
                   ? 0.0
                   : std::min(1.0, row.expected_fd / row.n_selected);
  }
  return table;
}

std::vector<double> noise_score_distribution(
    const Dataset& ds, const PathFit& fit, int lambda_index,
    const std::vector<int>& features) {
  const double sigma = estimate_sigma(ds, fit, lambda_index);
  const double root_n = std::sqrt(static_cast<double>(ds.n()));
  std::vector<double> scores;
  scores.reserve(features.size());
  for (const int j : features) {
    scores.push_back(root_n *
                     partial_residual_score(ds, fit, lambda_index, j) / sigma);
  }
  return scores;
}

ChosenLambda choose_lambda_mfdr(const MfdrTable& table, double target) {
  if (!(target > 0.0 && target < 1.0))
    throw InvalidInput("mfdr target must lie in (0, 1)");
  if (table.rows.empty()) throw InvalidInput("mfdr table is empty");
  ChosenLambda best;
  for (int i = 0; i < table.n_rows(); ++i) {
    const MfdrRow& row = table.rows[i];
    if (!row.defined || !(row.mfdr < target)) continue;
    if (best.index < 0 || row.lambda < best.lambda) {
      best.index = i;
      best.lambda = row.lambda;
      best.status =
          row.n_selected > 0 ? LambdaChoice::ok : LambdaChoice::empty_only;
    }
  }
  return best;
}

}  // namespace mfdr
