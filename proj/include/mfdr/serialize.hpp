#pragma once

#include <string>

#include "mfdr/dataset.hpp"
#include "mfdr/mfdr_table.hpp"
#include "mfdr/simulate.hpp"
#include "mfdr/solver.hpp"

namespace mfdr {

// Path files written into `dir`:
//   path.csv       sparse triplets lambda_index,feature_index,value
//   path_meta.csv  per-lambda lambda,n_selected,kkt_violation,converged
//   features.csv   feature_index,name,col_mean,col_scale
// Numbers use shortest round-trip formatting, so a reload is value-exact.
void write_path_fit(const std::string& dir, const Dataset& ds,
                    const PathFit& fit);

// Rebuilds a PathFit from the files above.  The stored grid must equal
// expected_spec's grid exactly; residuals, selected sets, and KKT numbers
// are recomputed against ds.
PathFit load_path_fit(const std::string& dir, const Dataset& ds,
                      const PenaltySpec& expected_spec);

// Reconstructs the penalty spec a stored fit was produced with: the grid
// from path_meta.csv and the family parameters from the run's manifest.
PenaltySpec load_stored_spec(const std::string& dir);

std::string mfdr_table_csv(const MfdrTable& table);
std::string mfdr_table_json(const MfdrTable& table);

// long-form per-lambda curves: lambda,statistic,method,value
std::string study_csv(const StudyResult& study);

}  // namespace mfdr
