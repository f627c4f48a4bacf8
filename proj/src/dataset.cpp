#include "mfdr/dataset.hpp"

#include <cmath>

#include "mfdr/csv.hpp"
#include "mfdr/errors.hpp"

namespace mfdr {

void Dataset::validate(double tol) const {
  const int nn = n(), pp = p();
  if (nn < 2) throw InvalidInput("dataset needs at least 2 observations");
  if (pp < 1) throw InvalidInput("dataset needs at least 1 feature");
  if (y.size() != nn) throw InvalidInput("response length does not match X");
  if (static_cast<int>(feature_names.size()) != pp)
    throw InvalidInput("feature_names length does not match X");
  if (!X.allFinite() || !y.allFinite())
    throw InvalidInput("dataset contains non-finite values");
  if (std::abs(y.mean()) > tol)
    throw InvalidInput("response is not centered");
  for (int j = 0; j < pp; ++j) {
    if (std::abs(X.col(j).mean()) > tol)
      throw InvalidInput("column " + feature_names[j] + " is not centered");
    const double msq = X.col(j).squaredNorm() / nn;
    if (std::abs(msq - 1.0) > tol)
      throw InvalidInput("column " + feature_names[j] +
                         " is not scaled to unit mean square");
  }
}

Dataset standardize(const Eigen::MatrixXd& X_raw, const Eigen::VectorXd& y_raw,
                    std::vector<std::string> feature_names) {
  const int n = static_cast<int>(X_raw.rows());
  const int p = static_cast<int>(X_raw.cols());
  if (n < 2)
    throw InvalidInput("need at least 2 observations, got " +
                       std::to_string(n));
  if (p < 1) throw InvalidInput("need at least 1 feature");
  if (y_raw.size() != n)
    throw InvalidInput("response length " + std::to_string(y_raw.size()) +
                       " does not match " + std::to_string(n) + " rows");
  if (!X_raw.allFinite()) throw InvalidInput("X contains non-finite values");
  if (!y_raw.allFinite())
    throw InvalidInput("response contains non-finite values");

  if (feature_names.empty()) {
    feature_names.resize(p);
    for (int j = 0; j < p; ++j) feature_names[j] = "x" + std::to_string(j + 1);
  }
  if (static_cast<int>(feature_names.size()) != p)
    throw InvalidInput("feature name count does not match column count");

  Dataset ds;
  ds.feature_names = std::move(feature_names);
  ds.col_means.resize(p);
  ds.col_scales.resize(p);
  ds.X.resize(n, p);
  for (int j = 0; j < p; ++j) {
    const double mean = X_raw.col(j).mean();
    Eigen::VectorXd centered = X_raw.col(j).array() - mean;
    const double scale = std::sqrt(centered.squaredNorm() / n);
    if (scale <= 0.0 || scale < 1e-12 * (1.0 + std::abs(mean)))
      throw InvalidInput("column " + ds.feature_names[j] +
                         " is constant and cannot be standardized");
    ds.col_means[j] = mean;
    ds.col_scales[j] = scale;
    ds.X.col(j) = centered / scale;
  }
  ds.y_mean = y_raw.mean();
  ds.y = y_raw.array() - ds.y_mean;
  if (ds.y.lpNorm<Eigen::Infinity>() == 0.0)
    throw InvalidInput("response is constant");
  return ds;
}

Dataset dataset_from_csv(const CsvTable& table,
                         const std::string& response_name) {
  const int y_col = table.column(response_name);
  const int n = table.n_rows();
  const int p = table.n_cols() - 1;
  if (n < 2) throw InvalidInput("CSV has fewer than 2 data rows");
  if (p < 1) throw InvalidInput("CSV has no feature columns besides response");
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  std::vector<std::string> names;
  names.reserve(p);
  for (int j = 0, out = 0; j < table.n_cols(); ++j) {
    if (j == y_col) continue;
    names.push_back(table.header[j]);
    for (int i = 0; i < n; ++i) X(i, out) = table.rows[i][j];
    ++out;
  }
  for (int i = 0; i < n; ++i) y[i] = table.rows[i][y_col];
  return standardize(X, y, std::move(names));
}

Dataset dataset_from_csv(const CsvTable& table, const Eigen::VectorXd& y_raw) {
  const int n = table.n_rows();
  const int p = table.n_cols();
  if (n < 2) throw InvalidInput("CSV has fewer than 2 data rows");
  if (y_raw.size() != n)
    throw InvalidInput("response length " + std::to_string(y_raw.size()) +
                       " does not match CSV with " + std::to_string(n) +
                       " rows");
  Eigen::MatrixXd X(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = table.rows[i][j];
  return standardize(X, y_raw, table.header);
}

double lambda_max(const Dataset& ds) {
  const double lm = (ds.X.transpose() * ds.y).lpNorm<Eigen::Infinity>() / ds.n();
  if (lm <= 0.0)
    throw InvalidInput(
        "lambda_max is zero: response is orthogonal to every feature");
  return lm;
}

std::vector<double> log_spaced_grid(double top, double bottom, int length) {
  if (!(top > 0.0) || !(bottom > 0.0) || !(bottom < top))
    throw InvalidInput("grid needs 0 < bottom < top");
  if (length < 2) throw InvalidInput("grid needs at least 2 points");
  std::vector<double> grid(length);
  const double lt = std::log(top), lb = std::log(bottom);
  for (int i = 0; i < length; ++i)
    grid[i] = std::exp(lt + (lb - lt) * i / (length - 1));
  grid.front() = top;
  grid.back() = bottom;
  return grid;
}

std::vector<double> default_grid(const Dataset& ds, int length, double ratio) {
  if (ratio == 0.0) ratio = ds.p() > ds.n() ? 0.05 : 0.001;
  if (!(ratio > 0.0 && ratio < 1.0))
    throw InvalidInput("grid ratio must lie in (0, 1)");
  const double lm = lambda_max(ds);
  return log_spaced_grid(lm, ratio * lm, length);
}

}  // namespace mfdr
