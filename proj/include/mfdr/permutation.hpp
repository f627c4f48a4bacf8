#pragma once

#include <cstdint>

#include "mfdr/dataset.hpp"
#include "mfdr/mfdr_table.hpp"
#include "mfdr/solver.hpp"

namespace mfdr {

// B response permutations, drawn one per permutation index from substreams
// of (seed, b) -- results do not depend on evaluation order or thread count.
struct PermutationPlan {
  int B = 100;
  std::uint64_t seed = 0;
  int n_threads = 1;

  void validate() const;
};

// Permute-the-outcome estimator: refits the whole path on B shuffled copies
// of y and averages the selection counts per lambda.  The permuted response
// keeps its mean (centering commutes with permutation), so no
// re-standardization happens.  mfdr divides by the original fit's selection
// count, capped at 1, 0 when the original selection is empty.
//
// When original_fit is supplied its grid must equal spec's grid exactly;
// otherwise the original path is fitted internally.
MfdrTable mfdr_perm_y(const Dataset& ds, const PenaltySpec& spec,
                      const SolverConfig& cfg, const PermutationPlan& plan,
                      const PathFit* original_fit = nullptr);

// Permute-the-residuals estimator: at each lambda the original fit's
// residual vector is permuted and a fresh fit is solved at that single
// lambda, warm-started from the same permutation's solution at the next
// larger lambda.  Estimates the conditional null selection count around the
// fitted model instead of the fully permuted one.
MfdrTable mfdr_perm_r(const Dataset& ds, const PenaltySpec& spec,
                      const SolverConfig& cfg, const PermutationPlan& plan,
                      const PathFit* original_fit = nullptr);

}  // namespace mfdr
