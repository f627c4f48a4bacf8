#pragma once

#include <string>
#include <vector>

#include "mfdr/dataset.hpp"
#include "mfdr/solver.hpp"

namespace mfdr {

double normal_cdf(double x);

// E[count of independent null features crossing the selection threshold]:
// 2 * p * Phi(-sqrt(n) * lambda_eff / sigma).  Under an orthonormal design
// this is exact for the noise features; under correlated designs it is an
// upper bound on average, which is what makes the estimator conservative.
double analytic_expected_fd(int n, int p, double lambda_eff, double sigma);

// Per-lambda false-discovery summary.  Undefined entries (saturated variance
// estimate) are stored as NaN.  mfdr is expected_fd / n_selected capped at 1,
// and 0 by convention when nothing is selected.
struct MfdrRow {
  double lambda = 0.0;
  int n_selected = 0;
  double sigma_hat = 0.0;
  double expected_fd = 0.0;
  double mfdr = 0.0;
  bool defined = true;
};

struct MfdrTable {
  std::string method;  // "analytic", "perm-y", or "perm-r"
  std::vector<MfdrRow> rows;

  int n_rows() const { return static_cast<int>(rows.size()); }
};

// Residual-variance estimate at one grid point with the selected-set size as
// the degrees-of-freedom correction: sqrt(r'r / (n - |S|)).  Throws
// NumericalError once |S| >= n (saturated model).
double estimate_sigma(const Dataset& ds, const PathFit& fit, int lambda_index);

// Analytic table over the whole grid.  Saturated rows are marked undefined
// rather than extrapolated.
MfdrTable mfdr_analytic(const Dataset& ds, const PathFit& fit);

// Standardized partial-residual scores sqrt(n) * score_j / sigma_hat for the
// given features (callers pass the known noise set in simulations).  Under an
// independent-feature null these approach a standard normal for lambda in
// the sqrt(n)-bounded regime, away from lambda_max.
std::vector<double> noise_score_distribution(const Dataset& ds,
                                             const PathFit& fit,
                                             int lambda_index,
                                             const std::vector<int>& features);

// Outcome of the smallest-lambda-under-target rule.
enum class LambdaChoice {
  ok,          // chosen lambda selects a nonempty model under target
  empty_only,  // only empty-model rows sit under target
  none         // every row is nonempty with mfdr >= target
};

struct ChosenLambda {
  LambdaChoice status = LambdaChoice::none;
  int index = -1;
  double lambda = 0.0;
};

// Smallest grid lambda whose mfdr is below target (undefined rows never
// qualify).  If only empty-model rows qualify, returns the smallest of those
// with status empty_only.
ChosenLambda choose_lambda_mfdr(const MfdrTable& table, double target);

}  // namespace mfdr
