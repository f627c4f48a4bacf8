#include "mfdr/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfdr/errors.hpp"
#include "mfdr/parallel.hpp"
#include "mfdr/rng.hpp"

namespace mfdr {

std::string noise_kind_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::independent: return "independent";
    case NoiseKind::ar: return "ar";
    case NoiseKind::exchangeable: return "exchangeable";
  }
  return "?";
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "independent") return NoiseKind::independent;
  if (name == "ar") return NoiseKind::ar;
  if (name == "exchangeable") return NoiseKind::exchangeable;
  throw InvalidInput("unknown noise structure '" + name +
                     "' (expected independent, ar, or exchangeable)");
}

void SimDesign::validate() const {
  if (n < 2) throw InvalidInput("design needs n >= 2");
  if (p < 1) throw InvalidInput("design needs p >= 1");
  if (n_causative < 0 || m_per_causative < 0)
    throw InvalidInput("feature counts cannot be negative");
  if (n_noise() < 0)
    throw InvalidInput("causative*(1+m) exceeds p");
  if (!(rho_corr > -1.0 && rho_corr < 1.0))
    throw InvalidInput("rho_corr must lie in (-1, 1)");
  if (noise == NoiseKind::ar && !(rho_noise > -1.0 && rho_noise < 1.0))
    throw InvalidInput("ar rho must lie in (-1, 1)");
  if (noise == NoiseKind::exchangeable &&
      !(rho_noise >= 0.0 && rho_noise < 1.0))
    throw InvalidInput("exchangeable rho must lie in [0, 1)");
  if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
  if (!std::isfinite(beta)) throw InvalidInput("beta must be finite");
}

SimData generate(const SimDesign& d) {
  d.validate();
  Rng rng(d.seed);
  const int n = d.n, A = d.n_causative, m = d.m_per_causative;
  const int n_corr = d.n_correlated(), n_noise = d.n_noise();

  Eigen::MatrixXd X(n, d.p);
  std::vector<std::string> names(d.p);
  TruthLabels labels;

  // columns are drawn in a fixed order so a seed pins the whole dataset
  int col = 0;
  for (int a = 0; a < A; ++a) {
    for (int i = 0; i < n; ++i) X(i, col) = rng.normal();
    names[col] = "A" + std::to_string(a + 1);
    labels.causative.push_back(col);
    ++col;
  }
  const double corr_mix = std::sqrt(1.0 - d.rho_corr * d.rho_corr);
  for (int a = 0; a < A; ++a) {
    for (int c = 0; c < m; ++c) {
      for (int i = 0; i < n; ++i)
        X(i, col) = d.rho_corr * X(i, a) + corr_mix * rng.normal();
      names[col] = "B" + std::to_string(a * m + c + 1);
      labels.correlated.push_back(col);
      ++col;
    }
  }
  switch (d.noise) {
    case NoiseKind::independent:
      for (int k = 0; k < n_noise; ++k, ++col) {
        for (int i = 0; i < n; ++i) X(i, col) = rng.normal();
        names[col] = "N" + std::to_string(k + 1);
        labels.noise.push_back(col);
      }
      break;
    case NoiseKind::ar: {
      const double mix = std::sqrt(1.0 - d.rho_noise * d.rho_noise);
      for (int k = 0; k < n_noise; ++k, ++col) {
        if (k == 0) {
          for (int i = 0; i < n; ++i) X(i, col) = rng.normal();
        } else {
          for (int i = 0; i < n; ++i)
            X(i, col) = d.rho_noise * X(i, col - 1) + mix * rng.normal();
        }
        names[col] = "N" + std::to_string(k + 1);
        labels.noise.push_back(col);
      }
      break;
    }
    case NoiseKind::exchangeable: {
      Eigen::VectorXd w(n);
      for (int i = 0; i < n; ++i) w[i] = rng.normal();
      const double shared = std::sqrt(d.rho_noise);
      const double own = std::sqrt(1.0 - d.rho_noise);
      for (int k = 0; k < n_noise; ++k, ++col) {
        for (int i = 0; i < n; ++i)
          X(i, col) = shared * w[i] + own * rng.normal();
        names[col] = "N" + std::to_string(k + 1);
        labels.noise.push_back(col);
      }
      break;
    }
  }

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    double signal = 0.0;
    for (int a = 0; a < A; ++a) signal += X(i, a);
    y[i] = d.beta * signal + d.sigma * rng.normal();
  }

  SimData out{standardize(X, y, std::move(names)), std::move(labels)};
  return out;
}

TrueCounts true_counts(const PathFit& fit, const TruthLabels& labels) {
  const int L = fit.n_lambda();
  const int p = static_cast<int>(fit.beta.rows());
  std::vector<int> role(p, 2);  // default noise
  for (const int j : labels.causative) role[j] = 0;
  for (const int j : labels.correlated) role[j] = 1;
  TrueCounts tc;
  tc.causative.assign(L, 0);
  tc.correlated.assign(L, 0);
  tc.noise.assign(L, 0);
  tc.selected.assign(L, 0);
  for (int l = 0; l < L; ++l) {
    for (const int j : fit.selected[l]) {
      ++tc.selected[l];
      if (role[j] == 0) ++tc.causative[l];
      else if (role[j] == 1) ++tc.correlated[l];
      else ++tc.noise[l];
    }
  }
  return tc;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::analytic: return "analytic";
    case Method::perm_y: return "perm-y";
    case Method::perm_r: return "perm-r";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "analytic") return Method::analytic;
  if (name == "perm-y") return Method::perm_y;
  if (name == "perm-r") return Method::perm_r;
  throw InvalidInput("unknown method '" + name +
                     "' (expected analytic, perm-y, or perm-r)");
}

const MethodCurve& StudyResult::curve(Method m) const {
  for (const auto& c : curves)
    if (c.method == m) return c;
  throw InvalidInput("method " + method_name(m) + " not present in study");
}

namespace {

// per-replicate results, written into slot r for determinism
struct ReplicateRecord {
  bool failed = false;
  TrueCounts truth;
  // per method: expected_fd / mfdr per lambda, NaN when undefined
  std::vector<std::vector<double>> est_fd;
  std::vector<std::vector<double>> est_mfdr;
  // chosen-lambda outcome under the analytic table
  int chosen_status = -1;  // matches LambdaChoice when >= 0
  int chosen_fd = 0;
  int chosen_selected = 0;
};

}  // namespace

StudyResult replicate_study(const StudyConfig& cfg) {
  cfg.design.validate();
  cfg.spec.validate();
  if (cfg.reps < 1) throw InvalidInput("study needs at least 1 replicate");
  const bool want_choice = cfg.mfdr_target > 0.0;
  if (want_choice && !(cfg.mfdr_target < 1.0))
    throw InvalidInput("mfdr target must lie in (0, 1)");
  const int L = static_cast<int>(cfg.spec.lambda_grid.size());
  const int n_methods = static_cast<int>(cfg.methods.size());
  const bool has_analytic =
      std::find(cfg.methods.begin(), cfg.methods.end(), Method::analytic) !=
      cfg.methods.end();
  if (want_choice && !has_analytic)
    throw InvalidInput("mfdr_target needs the analytic method in the study");

  std::vector<ReplicateRecord> recs(cfg.reps);
  parallel_for(cfg.reps, cfg.n_threads, [&](int r) {
    ReplicateRecord& rec = recs[r];
    try {
      SimDesign d = cfg.design;
      d.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
      const SimData sim = generate(d);
      const PathFit fit = fit_path(sim.ds, cfg.spec, cfg.solver);
      rec.truth = true_counts(fit, sim.labels);
      rec.est_fd.resize(n_methods);
      rec.est_mfdr.resize(n_methods);
      for (int mi = 0; mi < n_methods; ++mi) {
        MfdrTable table;
        switch (cfg.methods[mi]) {
          case Method::analytic:
            table = mfdr_analytic(sim.ds, fit);
            break;
          case Method::perm_y: {
            PermutationPlan plan{cfg.B, derive_seed(d.seed, 1000001), 1};
            table = mfdr_perm_y(sim.ds, cfg.spec, cfg.solver, plan, &fit);
            break;
          }
          case Method::perm_r: {
            PermutationPlan plan{cfg.B, derive_seed(d.seed, 1000002), 1};
            table = mfdr_perm_r(sim.ds, cfg.spec, cfg.solver, plan, &fit);
            break;
          }
        }
        auto& fd = rec.est_fd[mi];
        auto& mf = rec.est_mfdr[mi];
        fd.resize(L);
        mf.resize(L);
        for (int l = 0; l < L; ++l) {
          const MfdrRow& row = table.rows[l];
          const double nan = std::numeric_limits<double>::quiet_NaN();
          fd[l] = row.defined ? row.expected_fd : nan;
          mf[l] = row.defined ? row.mfdr : nan;
        }
        if (want_choice && cfg.methods[mi] == Method::analytic) {
          const ChosenLambda ch = choose_lambda_mfdr(table, cfg.mfdr_target);
          rec.chosen_status = static_cast<int>(ch.status);
          if (ch.status == LambdaChoice::ok) {
            rec.chosen_fd = rec.truth.noise[ch.index];
            rec.chosen_selected = rec.truth.selected[ch.index];
          }
        }
      }
    } catch (const std::exception&) {
      rec.failed = true;
    }
  });

  StudyResult out;
  out.lambda = cfg.spec.lambda_grid;
  out.reps = cfg.reps;
  for (const auto& rec : recs)
    if (rec.failed) ++out.failures;
  if (out.failures * 20 > cfg.reps)
    throw NumericalError(std::to_string(out.failures) + " of " +
                         std::to_string(cfg.reps) +
                         " replicates failed (more than 5%)");
  const int R = cfg.reps - out.failures;
  if (R == 0) throw NumericalError("every replicate failed");

  out.mean_true_fd.assign(L, 0.0);
  out.mean_corr_selected.assign(L, 0.0);
  out.mean_causative_selected.assign(L, 0.0);
  out.mean_selected.assign(L, 0.0);
  out.true_mfdr.assign(L, 0.0);
  out.se_true_mfdr.assign(L, 0.0);
  for (int l = 0; l < L; ++l) {
    double fd_sum = 0.0, sel_sum = 0.0, corr_sum = 0.0, cau_sum = 0.0;
    for (const auto& rec : recs) {
      if (rec.failed) continue;
      fd_sum += rec.truth.noise[l];
      sel_sum += rec.truth.selected[l];
      corr_sum += rec.truth.correlated[l];
      cau_sum += rec.truth.causative[l];
    }
    out.mean_true_fd[l] = fd_sum / R;
    out.mean_selected[l] = sel_sum / R;
    out.mean_corr_selected[l] = corr_sum / R;
    out.mean_causative_selected[l] = cau_sum / R;
    if (sel_sum > 0.0) {
      const double ratio = fd_sum / sel_sum;
      out.true_mfdr[l] = ratio;
      // delta method for the ratio of means
      double var_acc = 0.0;
      for (const auto& rec : recs) {
        if (rec.failed) continue;
        const double d = rec.truth.noise[l] - ratio * rec.truth.selected[l];
        var_acc += d * d;
      }
      const double mean_sel = sel_sum / R;
      if (R > 1)
        out.se_true_mfdr[l] =
            std::sqrt(var_acc / (R - 1) / R) / mean_sel;
    }
  }

  out.curves.resize(n_methods);
  for (int mi = 0; mi < n_methods; ++mi) {
    MethodCurve& c = out.curves[mi];
    c.method = cfg.methods[mi];
    c.mean_expected_fd.assign(L, 0.0);
    c.mean_mfdr.assign(L, 0.0);
    c.se_mfdr.assign(L, 0.0);
    c.rate.assign(L, 0.0);
    c.se_rate.assign(L, 0.0);
    c.n_defined.assign(L, 0);
    for (int l = 0; l < L; ++l) {
      double fd_sum = 0.0, mf_sum = 0.0, sel_sum = 0.0;
      int k = 0;
      for (const auto& rec : recs) {
        if (rec.failed) continue;
        const double fd = rec.est_fd[mi][l];
        if (std::isnan(fd)) continue;
        fd_sum += fd;
        mf_sum += rec.est_mfdr[mi][l];
        sel_sum += rec.truth.selected[l];
        ++k;
      }
      c.n_defined[l] = k;
      if (k == 0) {
        c.mean_expected_fd[l] = std::numeric_limits<double>::quiet_NaN();
        c.mean_mfdr[l] = std::numeric_limits<double>::quiet_NaN();
        c.se_mfdr[l] = std::numeric_limits<double>::quiet_NaN();
        c.rate[l] = std::numeric_limits<double>::quiet_NaN();
        c.se_rate[l] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      c.mean_expected_fd[l] = fd_sum / k;
      c.mean_mfdr[l] = mf_sum / k;
      // ratio of means over the replicates where this method is defined;
      // the SE linearizes the uncapped ratio (same delta method as the
      // truth curve), so it stays meaningful when the cap binds.
      const double ratio = sel_sum > 0.0 ? fd_sum / sel_sum : 0.0;
      c.rate[l] = std::min(1.0, ratio);
      if (k > 1) {
        double var_acc = 0.0, rate_var_acc = 0.0;
        for (const auto& rec : recs) {
          if (rec.failed) continue;
          const double mf = rec.est_mfdr[mi][l];
          if (std::isnan(mf)) continue;
          const double d = mf - c.mean_mfdr[l];
          var_acc += d * d;
          const double rd = rec.est_fd[mi][l] - ratio * rec.truth.selected[l];
          rate_var_acc += rd * rd;
        }
        c.se_mfdr[l] = std::sqrt(var_acc / (k - 1) / k);
        if (sel_sum > 0.0)
          c.se_rate[l] =
              std::sqrt(rate_var_acc / (k - 1) / k) / (sel_sum / k);
      }
    }
  }

  if (want_choice) {
    double fd_sum = 0.0, sel_sum = 0.0;
    for (const auto& rec : recs) {
      if (rec.failed) continue;
      switch (rec.chosen_status) {
        case static_cast<int>(LambdaChoice::ok):
          ++out.chosen_ok;
          fd_sum += rec.chosen_fd;
          sel_sum += rec.chosen_selected;
          break;
        case static_cast<int>(LambdaChoice::empty_only):
          ++out.chosen_empty;
          break;
        default:
          ++out.chosen_none;
          break;
      }
    }
    out.realized_true_mfdr = sel_sum > 0.0 ? fd_sum / sel_sum : 0.0;
  }
  return out;
}

double interp_at_lambda(const std::vector<double>& grid,
                        const std::vector<double>& values,
                        double lambda_star) {
  if (grid.size() != values.size() || grid.size() < 2)
    throw InvalidInput("curve and grid sizes disagree");
  if (lambda_star > grid.front() || lambda_star < grid.back())
    throw InvalidInput("lambda outside the grid range");
  for (size_t i = 0; i + 1 < grid.size(); ++i) {
    if (lambda_star <= grid[i] && lambda_star >= grid[i + 1]) {
      const double hi = std::log(grid[i]), lo = std::log(grid[i + 1]);
      const double t =
          hi == lo ? 0.0 : (std::log(lambda_star) - hi) / (lo - hi);
      return values[i] + t * (values[i + 1] - values[i]);
    }
  }
  return values.back();
}

int bivariate_approx_count(double z1, double z2, double lambda) {
  return (std::abs(z1) > lambda ? 1 : 0) + (std::abs(z2) > lambda ? 1 : 0);
}

int bivariate_exact_count(double z1, double z2, double rho, double lambda) {
  if (!(rho > -1.0 && rho < 1.0)) throw InvalidInput("rho must lie in (-1, 1)");
  if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
  // candidates of min 0.5 b'Gb - z'b + lambda*|b|_1, G = [[1,rho],[rho,1]]:
  // exactly one is KKT-valid up to boundary ties
  const double det = 1.0 - rho * rho;
  for (const double s1 : {1.0, -1.0}) {
    for (const double s2 : {1.0, -1.0}) {
      const double u1 = z1 - lambda * s1, u2 = z2 - lambda * s2;
      const double b1 = (u1 - rho * u2) / det;
      const double b2 = (u2 - rho * u1) / det;
      if (b1 * s1 > 0.0 && b2 * s2 > 0.0) return 2;
    }
  }
  {
    const double b1 = soft_threshold(z1, lambda);
    if (b1 != 0.0 && std::abs(z2 - rho * b1) <= lambda) return 1;
    const double b2 = soft_threshold(z2, lambda);
    if (b2 != 0.0 && std::abs(z1 - rho * b2) <= lambda) return 1;
  }
  return 0;
}

double bivariate_boundary_margin(double z1, double z2, double rho,
                                 double lambda) {
  const double det = 1.0 - rho * rho;
  double margin = std::numeric_limits<double>::infinity();
  const auto upd = [&](double v) { margin = std::min(margin, std::abs(v)); };
  upd(std::abs(z1) - lambda);
  upd(std::abs(z2) - lambda);
  const double b1 = soft_threshold(z1, lambda);
  if (b1 != 0.0) upd(std::abs(z2 - rho * b1) - lambda);
  const double b2 = soft_threshold(z2, lambda);
  if (b2 != 0.0) upd(std::abs(z1 - rho * b2) - lambda);
  for (const double s1 : {1.0, -1.0}) {
    for (const double s2 : {1.0, -1.0}) {
      const double u1 = z1 - lambda * s1, u2 = z2 - lambda * s2;
      upd((u1 - rho * u2) / det);
      upd((u2 - rho * u1) / det);
    }
  }
  return margin;
}

StudyPreset preset_by_name(const std::string& name) {
  // shared scale convention: coefficients 1/sqrt(6) on 6 causative features
  // and unit error variance, i.e. signal variance == noise variance
  // (R^2 = 0.5); the quoted operating points 0.55/0.43/0.29 live on this
  // lambda scale
  const double b6 = 1.0 / std::sqrt(6.0);
  StudyPreset ps;
  ps.name = name;
  if (name == "lowdim-ind") {
    ps.design = {100, 60, 6, 2, 0.5, NoiseKind::independent, 0.0, b6, 1.0, 0};
    ps.lambda_grid = log_spaced_grid(1.0, 0.10, 40);
  } else if (name == "highdim-ind") {
    ps.design = {100, 600, 6, 9, 0.5, NoiseKind::independent, 0.0, b6, 1.0, 0};
    ps.lambda_grid = log_spaced_grid(1.0, 0.18, 40);
  } else if (name == "ar-corr") {
    ps.design = {100, 500, 6, 0, 0.5, NoiseKind::ar, 0.8, b6, 1.0, 0};
    ps.lambda_grid = log_spaced_grid(1.0, 0.15, 40);
  } else if (name == "exch-corr") {
    ps.design = {100, 500, 6, 0, 0.5, NoiseKind::exchangeable, 0.8, b6, 1.0, 0};
    ps.lambda_grid = log_spaced_grid(1.0, 0.15, 40);
  } else {
    throw InvalidInput("unknown preset '" + name + "'");
  }
  return ps;
}

std::vector<std::string> preset_names() {
  return {"lowdim-ind", "highdim-ind", "ar-corr", "exch-corr"};
}

}  // namespace mfdr
