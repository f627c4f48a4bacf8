#include "mfdr/permutation.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "mfdr/errors.hpp"
#include "mfdr/parallel.hpp"
#include "mfdr/rng.hpp"

namespace mfdr {

void PermutationPlan::validate() const {
  if (B < 1) throw InvalidInput("permutation count B must be at least 1");
  if (n_threads < 1) throw InvalidInput("thread count must be at least 1");
}

namespace {

void check_grid_match(const PenaltySpec& spec, const PathFit& fit) {
  if (fit.spec.lambda_grid != spec.lambda_grid)
    throw InvalidInput(
        "original fit's lambda grid does not match the requested grid");
  if (fit.spec.family != spec.family)
    throw InvalidInput("original fit's penalty family does not match");
}

MfdrTable counts_to_table(const char* method, const PenaltySpec& spec,
                          const PathFit& original,
                          const std::vector<std::vector<int>>& counts, int B) {
  MfdrTable table;
  table.method = method;
  const int L = static_cast<int>(spec.lambda_grid.size());
  table.rows.resize(L);
  for (int l = 0; l < L; ++l) {
    MfdrRow& row = table.rows[l];
    row.lambda = spec.lambda_grid[l];
    row.n_selected = original.n_selected(l);
    row.sigma_hat = std::numeric_limits<double>::quiet_NaN();
    double total = 0.0;
    for (int b = 0; b < B; ++b) total += counts[b][l];
    row.expected_fd = total / B;
    row.mfdr = row.n_selected == 0
                   ? 0.0
                   : std::min(1.0, row.expected_fd / row.n_selected);
  }
  return table;
}

int count_nonzero(const Eigen::VectorXd& beta) {
  int c = 0;
  for (int j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) ++c;
  return c;
}

}  // namespace

MfdrTable mfdr_perm_y(const Dataset& ds, const PenaltySpec& spec,
                      const SolverConfig& cfg, const PermutationPlan& plan,
                      const PathFit* original_fit) {
  spec.validate();
  plan.validate();
  PathFit computed;
  if (original_fit) {
    check_grid_match(spec, *original_fit);
  } else {
    computed = fit_path(ds, spec, cfg);
    original_fit = &computed;
  }
  const int n = ds.n();
  const int p = ds.p();
  const int L = static_cast<int>(spec.lambda_grid.size());

  std::vector<std::vector<int>> counts(plan.B, std::vector<int>(L, 0));
  parallel_for(plan.B, plan.n_threads, [&](int b) {
    Rng rng(derive_seed(plan.seed, static_cast<std::uint64_t>(b)));
    const std::vector<int> pi = rng.permutation(n);
    Eigen::VectorXd y_perm(n);
    for (int i = 0; i < n; ++i) y_perm[i] = ds.y[pi[i]];

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd resid = y_perm;
    for (int l = 0; l < L; ++l) {
      solve_one(ds.X, y_perm, penalty_at(spec, l), cfg, beta, resid);
      counts[b][l] = count_nonzero(beta);
    }
  });
  return counts_to_table("perm-y", spec, *original_fit, counts, plan.B);
}

MfdrTable mfdr_perm_r(const Dataset& ds, const PenaltySpec& spec,
                      const SolverConfig& cfg, const PermutationPlan& plan,
                      const PathFit* original_fit) {
  spec.validate();
  plan.validate();
  PathFit computed;
  if (original_fit) {
    check_grid_match(spec, *original_fit);
  } else {
    computed = fit_path(ds, spec, cfg);
    original_fit = &computed;
  }
  const PathFit& orig = *original_fit;
  const int n = ds.n();
  const int p = ds.p();
  const int L = static_cast<int>(spec.lambda_grid.size());

  std::vector<std::vector<int>> counts(plan.B, std::vector<int>(L, 0));
  parallel_for(plan.B, plan.n_threads, [&](int b) {
    Rng rng(derive_seed(plan.seed, static_cast<std::uint64_t>(b)));
    // one permutation per b, reused down the grid: the residual changes
    // slowly in lambda, which is what makes the warm start effective
    const std::vector<int> pi = rng.permutation(n);

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd response = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd resid = Eigen::VectorXd::Zero(n);
    for (int l = 0; l < L; ++l) {
      Eigen::VectorXd next(n);
      const auto r_col = orig.residuals.col(l);
      for (int i = 0; i < n; ++i) next[i] = r_col[pi[i]];
      // keep resid == response - X*beta as the response switches columns
      resid += next - response;
      response = std::move(next);
      solve_one(ds.X, response, penalty_at(spec, l), cfg, beta, resid);
      counts[b][l] = count_nonzero(beta);
    }
  });
  return counts_to_table("perm-r", spec, orig, counts, plan.B);
}

}  // namespace mfdr
