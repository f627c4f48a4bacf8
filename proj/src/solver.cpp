#include "mfdr/solver.hpp"

#include <algorithm>
#include <cmath>

#include "mfdr/errors.hpp"
#include "mfdr/rng.hpp"

namespace mfdr {

namespace {

// stationarity residual at coordinate j given g = (1/n) x_j' r
double coord_violation(double g, double b, const PenaltyPoint& pen) {
  if (b == 0.0) return std::max(0.0, std::abs(g) - pen.threshold());
  const double s = b > 0.0 ? 1.0 : -1.0;
  switch (pen.family) {
    case PenaltyFamily::lasso:
      return std::abs(g - pen.lambda * s);
    case PenaltyFamily::mcp:
      return std::abs(g - s * std::max(0.0, pen.lambda - std::abs(b) / pen.gamma));
    case PenaltyFamily::enet:
      return std::abs(g - pen.lambda * pen.alpha * s -
                      pen.lambda * (1.0 - pen.alpha) * b);
  }
  return 0.0;
}

}  // namespace

double objective_value(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, const PenaltyPoint& pen) {
  const Eigen::VectorXd r = y - X * beta;
  double obj = r.squaredNorm() / (2.0 * X.rows());
  for (int j = 0; j < beta.size(); ++j)
    obj += penalty_value_one(beta[j], pen);
  return obj;
}

double kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& beta, const PenaltyPoint& pen) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  const Eigen::VectorXd r = y - X * beta;
  double worst = 0.0;
  for (int j = 0; j < p; ++j) {
    const double g = X.col(j).dot(r) / n;
    worst = std::max(worst, coord_violation(g, beta[j], pen));
  }
  return worst;
}

SolveInfo solve_one(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const PenaltyPoint& pen, const SolverConfig& cfg,
                    Eigen::VectorXd& beta, Eigen::VectorXd& resid,
                    std::vector<double>* objective_trace) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  SolveInfo info;

  std::vector<int> active;
  active.reserve(p);
  for (int j = 0; j < p; ++j)
    if (beta[j] != 0.0) active.push_back(j);

  const auto update_coord = [&](int j) -> double {
    const double z = X.col(j).dot(resid) / n + beta[j];
    const double b_new = coordinate_update(z, pen);
    const double d = b_new - beta[j];
    if (d != 0.0) {
      resid.noalias() -= X.col(j) * d;
      beta[j] = b_new;
    }
    return std::abs(d);
  };

  const auto trace = [&] {
    if (objective_trace)
      objective_trace->push_back(resid.squaredNorm() / (2.0 * n) +
                                 [&] {
                                   double s = 0.0;
                                   for (int j = 0; j < p; ++j)
                                     s += penalty_value_one(beta[j], pen);
                                   return s;
                                 }());
  };
  trace();

  while (info.sweeps < cfg.max_sweeps) {
    // cycle the current active set to tolerance
    while (info.sweeps < cfg.max_sweeps) {
      double change = 0.0;
      for (const int j : active) change = std::max(change, update_coord(j));
      ++info.sweeps;
      trace();
      if (change < cfg.tol) break;
    }
    if (info.sweeps >= cfg.max_sweeps) break;

    // full sweep: picks up features whose gradient now beats the threshold
    double change = 0.0;
    bool activated = false;
    for (int j = 0; j < p; ++j) {
      const bool was_zero = beta[j] == 0.0;
      const double d = update_coord(j);
      change = std::max(change, d);
      if (was_zero && beta[j] != 0.0) activated = true;
    }
    ++info.sweeps;
    trace();

    active.clear();
    for (int j = 0; j < p; ++j)
      if (beta[j] != 0.0) active.push_back(j);

    if (!activated && change < cfg.tol) {
      // candidate solution: accept only if stationarity actually holds
      double worst = 0.0;
      for (int j = 0; j < p; ++j) {
        const double g = X.col(j).dot(resid) / n;
        worst = std::max(worst, coord_violation(g, beta[j], pen));
      }
      info.kkt_violation = worst;
      if (worst <= cfg.kkt_slack * cfg.tol) {
        info.converged = true;
        return info;
      }
    }
  }
  info.kkt_violation = kkt_violation(X, y, beta, pen);
  info.converged = info.kkt_violation <= cfg.kkt_slack * cfg.tol;
  return info;
}

PathFit fit_path(const Dataset& ds, const PenaltySpec& spec,
                 const SolverConfig& cfg) {
  spec.validate();
  if (ds.y.size() == 0 || ds.y.lpNorm<Eigen::Infinity>() == 0.0)
    throw InvalidInput("response is identically zero");
  const int n = ds.n();
  const int p = ds.p();
  const int L = static_cast<int>(spec.lambda_grid.size());

  PathFit fit;
  fit.spec = spec;
  fit.beta.setZero(p, L);
  fit.residuals.resize(n, L);
  fit.selected.resize(L);
  fit.kkt_violation.resize(L);
  fit.converged.assign(L, 0);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd resid = ds.y;
  for (int i = 0; i < L; ++i) {
    const PenaltyPoint pen = penalty_at(spec, i);
    const SolveInfo info = solve_one(ds.X, ds.y, pen, cfg, beta, resid);
    // store a residual recomputed from scratch so the stored pair (beta,
    // residual) is exactly consistent, free of incremental drift
    resid.noalias() = ds.y - ds.X * beta;
    fit.beta.col(i) = beta;
    fit.residuals.col(i) = resid;
    fit.converged[i] = info.converged ? 1 : 0;
    fit.kkt_violation[i] = kkt_violation(ds.X, ds.y, beta, pen);
    auto& sel = fit.selected[i];
    for (int j = 0; j < p; ++j)
      if (beta[j] != 0.0) sel.push_back(j);
  }
  return fit;
}

double kkt_check(const Dataset& ds, const PathFit& fit, int lambda_index) {
  if (lambda_index < 0 || lambda_index >= fit.n_lambda())
    throw InvalidInput("lambda index out of range");
  return kkt_violation(ds.X, ds.y, fit.beta.col(lambda_index),
                       penalty_at(fit.spec, lambda_index));
}

double partial_residual_score(const Dataset& ds, const PathFit& fit,
                              int lambda_index, int j) {
  if (lambda_index < 0 || lambda_index >= fit.n_lambda())
    throw InvalidInput("lambda index out of range");
  if (j < 0 || j >= ds.p()) throw InvalidInput("feature index out of range");
  return ds.X.col(j).dot(fit.residuals.col(lambda_index)) / ds.n() +
         fit.beta(j, lambda_index);
}

CvResult cross_validate(const Dataset& ds, const PenaltySpec& spec, int k,
                        const SolverConfig& cfg, std::uint64_t seed) {
  spec.validate();
  const int n = ds.n();
  if (k < 2) throw InvalidInput("cross-validation needs k >= 2");
  if (k > n) throw InvalidInput("more folds than observations");
  const int L = static_cast<int>(spec.lambda_grid.size());

  // one seeded shuffle; fold sizes differ by at most 1
  std::vector<int> order = Rng(seed).permutation(n);
  std::vector<int> fold_of(n);
  {
    const int base = n / k, extra = n % k;
    int pos = 0;
    for (int f = 0; f < k; ++f) {
      const int size = base + (f < extra ? 1 : 0);
      for (int s = 0; s < size; ++s) fold_of[order[pos++]] = f;
    }
  }

  Eigen::VectorXd total_sq_err = Eigen::VectorXd::Zero(L);
  for (int f = 0; f < k; ++f) {
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i)
      (fold_of[i] == f ? test : train).push_back(i);
    if (static_cast<int>(train.size()) < 2)
      throw InvalidInput("training split has fewer than 2 observations");

    Eigen::MatrixXd Xtr(train.size(), ds.p());
    Eigen::VectorXd ytr(train.size());
    for (size_t r = 0; r < train.size(); ++r) {
      Xtr.row(r) = ds.X.row(train[r]);
      ytr[r] = ds.y[train[r]];
    }
    const Dataset sub = standardize(Xtr, ytr, ds.feature_names);
    const PathFit fit = fit_path(sub, spec, cfg);

    for (const int i : test) {
      for (int l = 0; l < L; ++l) {
        double pred = sub.y_mean;
        for (const int j : fit.selected[l]) {
          pred += fit.beta(j, l) * (ds.X(i, j) - sub.col_means[j]) /
                  sub.col_scales[j];
        }
        const double e = ds.y[i] - pred;
        total_sq_err[l] += e * e;
      }
    }
  }

  CvResult cv;
  cv.lambda = spec.lambda_grid;
  cv.mean_error = total_sq_err / n;
  cv.best_index = 0;
  for (int l = 1; l < L; ++l)
    if (cv.mean_error[l] < cv.mean_error[cv.best_index]) cv.best_index = l;
  cv.best_lambda = spec.lambda_grid[cv.best_index];
  return cv;
}

}  // namespace mfdr
