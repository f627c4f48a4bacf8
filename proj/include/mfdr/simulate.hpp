#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfdr/dataset.hpp"
#include "mfdr/mfdr_table.hpp"
#include "mfdr/permutation.hpp"
#include "mfdr/solver.hpp"

namespace mfdr {

enum class NoiseKind { independent, ar, exchangeable };

std::string noise_kind_name(NoiseKind k);
NoiseKind noise_kind_from_name(const std::string& name);

// Generative design: n_causative features carry coefficient beta; each has
// m_per_causative correlated shadows (correlation rho_corr, no effect); the
// remaining p - n_causative*(1+m) features are pure noise with the given
// dependence.  y = beta * sum(causative) + sigma * eps on the raw scale.
struct SimDesign {
  int n = 100;
  int p = 60;
  int n_causative = 6;
  int m_per_causative = 0;
  double rho_corr = 0.5;
  NoiseKind noise = NoiseKind::independent;
  double rho_noise = 0.0;
  double beta = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;

  int n_correlated() const { return n_causative * m_per_causative; }
  int n_noise() const { return p - n_causative - n_correlated(); }
  void validate() const;
};

// index partition of 0..p-1 by role
struct TruthLabels {
  std::vector<int> causative;
  std::vector<int> correlated;
  std::vector<int> noise;
};

struct SimData {
  Dataset ds;
  TruthLabels labels;
};

SimData generate(const SimDesign& design);

// per-lambda selection counts split by role
struct TrueCounts {
  std::vector<int> causative;
  std::vector<int> correlated;
  std::vector<int> noise;     // the false discoveries
  std::vector<int> selected;  // total
};

TrueCounts true_counts(const PathFit& fit, const TruthLabels& labels);

enum class Method { analytic, perm_y, perm_r };
std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct StudyConfig {
  SimDesign design;  // its seed field is ignored; replicate seeds come from `seed`
  PenaltySpec spec;  // one absolute grid shared by every replicate
  SolverConfig solver;
  std::vector<Method> methods;
  int reps = 100;
  int B = 100;
  std::uint64_t seed = 0;
  int n_threads = 1;
  // when in (0,1): each replicate also applies the smallest-lambda-under-
  // target rule to its analytic table and the realized outcome is recorded
  double mfdr_target = 0.0;
};

struct MethodCurve {
  Method method = Method::analytic;
  std::vector<double> mean_expected_fd;
  std::vector<double> mean_mfdr;
  std::vector<double> se_mfdr;   // MC standard error of mean_mfdr
  // estimated discovery-error rate on the same footing as true_mfdr: the
  // ratio of means min(1, mean(est fd) / mean(true |S|)), with a
  // delta-method standard error.  This is the per-lambda average curve a
  // study plot shows; averaging per-replicate ratios instead would be
  // dominated by near-empty models at the head of the path.
  std::vector<double> rate;
  std::vector<double> se_rate;
  std::vector<int> n_defined;    // replicates contributing per lambda
};

struct StudyResult {
  std::vector<double> lambda;
  std::vector<double> mean_true_fd;
  std::vector<double> mean_corr_selected;
  std::vector<double> mean_causative_selected;
  std::vector<double> mean_selected;
  // ratio of means across replicates: mean(FD) / mean(|S|), 0 when nothing
  // was ever selected; se by the delta method
  std::vector<double> true_mfdr;
  std::vector<double> se_true_mfdr;
  std::vector<MethodCurve> curves;
  int reps = 0;
  int failures = 0;

  // chosen-lambda outcomes (populated when mfdr_target was set)
  int chosen_ok = 0;
  int chosen_empty = 0;
  int chosen_none = 0;
  double realized_true_mfdr = 0.0;  // Sum(FD at chosen) / Sum(|S| at chosen)

  const MethodCurve& curve(Method m) const;
};

// Runs `reps` independent replicates of the design (replicate r is seeded by
// derive_seed(seed, r)), fits the shared grid, and aggregates truth and the
// requested estimators per lambda.  Replicate failures are recorded and
// excluded; more than 5% of them aborts the study with NumericalError.
StudyResult replicate_study(const StudyConfig& cfg);

// linear interpolation of a per-lambda curve at lambda_star, in log-lambda;
// lambda_star must lie inside the grid range
double interp_at_lambda(const std::vector<double>& grid,
                        const std::vector<double>& values, double lambda_star);

// Two-feature selection behavior at population correlation rho (Gram matrix
// [[1, rho], [rho, 1]]) and score vector z: exact KKT solve vs. treating the
// features as orthogonal.  Used to show that ignoring correlation
// over-counts expected selections.
int bivariate_exact_count(double z1, double z2, double rho, double lambda);
int bivariate_approx_count(double z1, double z2, double lambda);
// smallest |slack| across the classification inequalities: points with a
// tiny margin sit on a selection boundary where any classifier may tip
// either way
double bivariate_boundary_margin(double z1, double z2, double rho,
                                 double lambda);

// Named experiment presets (design + shared grid).
struct StudyPreset {
  std::string name;
  SimDesign design;
  std::vector<double> lambda_grid;
};

StudyPreset preset_by_name(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace mfdr
