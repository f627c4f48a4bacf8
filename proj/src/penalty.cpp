#include "mfdr/penalty.hpp"

#include <cmath>

#include "mfdr/errors.hpp"

namespace mfdr {

std::string family_name(PenaltyFamily f) {
  switch (f) {
    case PenaltyFamily::lasso: return "lasso";
    case PenaltyFamily::mcp: return "mcp";
    case PenaltyFamily::enet: return "enet";
  }
  return "?";
}

PenaltyFamily family_from_name(const std::string& name) {
  if (name == "lasso") return PenaltyFamily::lasso;
  if (name == "mcp") return PenaltyFamily::mcp;
  if (name == "enet") return PenaltyFamily::enet;
  throw InvalidInput("unknown penalty '" + name +
                     "' (expected lasso, mcp, or enet)");
}

void PenaltySpec::validate() const {
  if (lambda_grid.empty()) throw InvalidInput("lambda grid is empty");
  double prev = 0.0;
  for (size_t i = 0; i < lambda_grid.size(); ++i) {
    const double l = lambda_grid[i];
    if (!(l > 0.0) || !std::isfinite(l))
      throw InvalidInput("lambda grid values must be positive and finite");
    if (i > 0 && !(l < prev))
      throw InvalidInput("lambda grid must be strictly decreasing");
    prev = l;
  }
  if (family == PenaltyFamily::mcp && !(gamma > 1.0))
    throw InvalidInput("mcp gamma must exceed 1");
  if (family == PenaltyFamily::enet && !(alpha > 0.0 && alpha <= 1.0))
    throw InvalidInput("enet alpha must lie in (0, 1]");
}

double PenaltySpec::threshold(int i) const {
  return penalty_at(*this, i).threshold();
}

PenaltyPoint penalty_at(const PenaltySpec& spec, int i) {
  if (i < 0 || i >= static_cast<int>(spec.lambda_grid.size()))
    throw InvalidInput("lambda grid index out of range");
  return PenaltyPoint{spec.family, spec.lambda_grid[i], spec.gamma,
                      spec.alpha};
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double coordinate_update(double z, const PenaltyPoint& pen) {
  switch (pen.family) {
    case PenaltyFamily::lasso:
      return soft_threshold(z, pen.lambda);
    case PenaltyFamily::mcp:
      // firm rule: soft-thresholded and rescaled inside the taper, untouched
      // beyond gamma*lambda where the penalty has gone flat
      if (std::abs(z) <= pen.gamma * pen.lambda)
        return soft_threshold(z, pen.lambda) / (1.0 - 1.0 / pen.gamma);
      return z;
    case PenaltyFamily::enet:
      return soft_threshold(z, pen.lambda * pen.alpha) /
             (1.0 + pen.lambda * (1.0 - pen.alpha));
  }
  return 0.0;
}

double penalty_value_one(double b, const PenaltyPoint& pen) {
  const double a = std::abs(b);
  switch (pen.family) {
    case PenaltyFamily::lasso:
      return pen.lambda * a;
    case PenaltyFamily::mcp:
      if (a <= pen.gamma * pen.lambda)
        return pen.lambda * a - b * b / (2.0 * pen.gamma);
      return 0.5 * pen.gamma * pen.lambda * pen.lambda;
    case PenaltyFamily::enet:
      return pen.lambda * (pen.alpha * a + 0.5 * (1.0 - pen.alpha) * b * b);
  }
  return 0.0;
}

double penalty_value(const std::vector<double>& beta, const PenaltyPoint& pen) {
  double s = 0.0;
  for (const double b : beta) s += penalty_value_one(b, pen);
  return s;
}

}  // namespace mfdr
