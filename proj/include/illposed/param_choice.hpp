#ifndef ILLPOSED_PARAM_CHOICE_HPP
#define ILLPOSED_PARAM_CHOICE_HPP

#include <optional>
#include <vector>

#include "illposed/linop.hpp"

namespace illposed {

/// The log-log point set (log residual, log seminorm) indexed by iteration.
struct LCurvePoints {
  std::vector<int> ks;
  std::vector<double> log_res;
  std::vector<double> log_semi;
};

/// First 1-based index k with residuals[k-1] <= tau * noise_norm, or nullopt
/// when the bound is never met. residuals are expected nonincreasing;
/// tau must exceed 1.
std::optional<int> discrepancy_pick(const std::vector<double>& residuals, double noise_norm,
                                    double tau);

/// Iteration index at the overall corner of the L-curve: the point of
/// maximal Menger curvature among the interior vertices of the lower convex
/// boundary of the point set. Ties break toward the smaller k (more
/// regularization). Throws when fewer than 3 points are given or when all
/// points are collinear to within 1e-12 (no corner).
int lcurve_corner(const LCurvePoints& points);

}  // namespace illposed

#endif
