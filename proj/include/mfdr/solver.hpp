#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mfdr/dataset.hpp"
#include "mfdr/penalty.hpp"

namespace mfdr {

struct SolverConfig {
  // converged when no coefficient moves more than tol in a sweep and the
  // stationarity residual is below kkt_slack * tol
  double tol = 1e-7;
  int max_sweeps = 10000;  // per lambda value
  double kkt_slack = 5.0;
};

// Solution path over a decreasing lambda grid.  Column i of beta/residuals
// belongs to lambda_grid[i]; residuals are recomputed as y - X*beta after
// convergence, so they reproduce the stored coefficients exactly.
struct PathFit {
  PenaltySpec spec;
  Eigen::MatrixXd beta;       // p x L
  Eigen::MatrixXd residuals;  // n x L
  std::vector<std::vector<int>> selected;  // nonzero indices, ascending
  Eigen::VectorXd kkt_violation;           // per lambda
  std::vector<std::uint8_t> converged;     // per lambda

  int n_lambda() const { return static_cast<int>(spec.lambda_grid.size()); }
  int n_selected(int i) const { return static_cast<int>(selected[i].size()); }
};

struct SolveInfo {
  int sweeps = 0;
  double kkt_violation = 0.0;
  bool converged = false;
};

// Coordinate descent at a single penalty point.  beta/resid are the warm
// start and are updated in place; resid must equal y - X*beta on entry.
// When objective_trace is given, the objective value is appended after every
// sweep (it never increases for lasso/enet; each 1-D update is an exact
// minimization).
SolveInfo solve_one(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const PenaltyPoint& pen, const SolverConfig& cfg,
                    Eigen::VectorXd& beta, Eigen::VectorXd& resid,
                    std::vector<double>* objective_trace = nullptr);

// Warm-started path solve, largest lambda first.
PathFit fit_path(const Dataset& ds, const PenaltySpec& spec,
                 const SolverConfig& cfg = {});

// Max stationarity violation of beta for the given penalty: how far the
// gradient conditions are from holding, in penalty units.
double kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& beta, const PenaltyPoint& pen);
double kkt_check(const Dataset& ds, const PathFit& fit, int lambda_index);

// (1/n) x_j' r(lambda_i) + beta_j(lambda_i): the coefficient feature j would
// receive, before thresholding, with all other coefficients held fixed.
// |score| > threshold exactly when j is selected.
double partial_residual_score(const Dataset& ds, const PathFit& fit,
                              int lambda_index, int j);

// (1/2n) ||y - X beta||^2 + penalty(beta)
double objective_value(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, const PenaltyPoint& pen);

struct CvResult {
  std::vector<double> lambda;
  Eigen::VectorXd mean_error;  // mean held-out squared error per lambda
  int best_index = 0;
  double best_lambda = 0.0;
};

// k-fold cross-validation over spec's grid.  Folds come from one seeded
// shuffle; each training block is re-standardized before fitting and
// predictions are mapped back, so every fold sees a dataset that satisfies
// the solver's scaling invariant.  k == n gives leave-one-out.  Ties in the
// mean error go to the larger (sparser) lambda.
CvResult cross_validate(const Dataset& ds, const PenaltySpec& spec, int k,
                        const SolverConfig& cfg, std::uint64_t seed);

}  // namespace mfdr
