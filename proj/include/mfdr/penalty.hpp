#pragma once

#include <string>
#include <vector>

namespace mfdr {

enum class PenaltyFamily { lasso, mcp, enet };

std::string family_name(PenaltyFamily f);
PenaltyFamily family_from_name(const std::string& name);

// Penalty family plus its solution grid.  gamma applies to mcp (must exceed
// 1), alpha to enet (l1 fraction, in (0, 1]).  lambda_grid must be strictly
// decreasing and positive; paths are solved left to right with warm starts.
struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::lasso;
  std::vector<double> lambda_grid;
  double gamma = 3.0;
  double alpha = 1.0;

  void validate() const;
  // the penalty level that acts as the selection threshold at grid index i:
  // lambda for lasso/mcp, alpha*lambda for enet
  double threshold(int i) const;
};

// One grid point of a PenaltySpec; what the single-lambda solver consumes.
struct PenaltyPoint {
  PenaltyFamily family = PenaltyFamily::lasso;
  double lambda = 0.0;
  double gamma = 3.0;
  double alpha = 1.0;

  double threshold() const {
    return family == PenaltyFamily::enet ? lambda * alpha : lambda;
  }
};

PenaltyPoint penalty_at(const PenaltySpec& spec, int i);

double soft_threshold(double z, double t);

// Exact minimizer of the one-dimensional coordinate problem
//   0.5 * (b - z)^2 + penalty(b)
// for a unit-mean-square column; z is the partial-residual inner product.
double coordinate_update(double z, const PenaltyPoint& pen);

// penalty term of the objective at beta (sum over coordinates)
double penalty_value(const std::vector<double>& beta, const PenaltyPoint& pen);
double penalty_value_one(double b, const PenaltyPoint& pen);

}  // namespace mfdr
