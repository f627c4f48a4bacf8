#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mfdr {

// Design matrix and response in solver coordinates.  Invariants, enforced by
// standardize() and validate():
//   - every column of X has mean 0 and (1/n) * sum(x^2) == 1
//   - y has mean 0
//   - col_means / col_scales hold the affine map back to the raw inputs
// Scaling by the root mean square (denominator n, not n-1) makes each
// column's Gram diagonal exactly 1, which the coordinate updates rely on.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd col_means;
  Eigen::VectorXd col_scales;
  double y_mean = 0.0;
  std::vector<std::string> feature_names;

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }

  // checks the invariants above within `tol`; throws InvalidInput otherwise
  void validate(double tol = 1e-8) const;
};

// Centers and scales raw inputs into a Dataset.  Requires n >= 2 and at
// least one column; rejects constant columns (named in the error), n of 1,
// and an all-constant response.
Dataset standardize(const Eigen::MatrixXd& X_raw, const Eigen::VectorXd& y_raw,
                    std::vector<std::string> feature_names = {});

// Entry point for CSV data: all columns numeric; the response is either the
// named column of `table` or, when response_name is empty, supplied
// separately via y.
Dataset dataset_from_csv(const struct CsvTable& table,
                         const std::string& response_name);
Dataset dataset_from_csv(const struct CsvTable& table,
                         const Eigen::VectorXd& y_raw);

// max_j |x_j' y| / n: the smallest penalty at which every coefficient of the
// l1 path is zero.  Errors when it is 0 (response orthogonal to all columns).
double lambda_max(const Dataset& ds);

// Log-spaced decreasing grid from lambda_max(ds) down to ratio * lambda_max.
// Default ratio: 0.05 when p > n, else 0.001.
std::vector<double> default_grid(const Dataset& ds, int length = 100,
                                 double ratio = 0.0);
std::vector<double> log_spaced_grid(double top, double bottom, int length);

}  // namespace mfdr
