#ifndef ILLPOSED_LSQR_HPP
#define ILLPOSED_LSQR_HPP

#include "illposed/linop.hpp"

namespace illposed {

struct LsqrOptions {
  double tol = 1e-6;
  // 0 means the default 2 (rows + cols).
  Index max_iterations = 0;
};

struct LsqrReport {
  Vector solution;
  Index iterations = 0;
  // Last value of ||A^T r|| / (||A|| ||r||), the stopping estimate.
  double relative_residual_estimate = 0.0;
  bool converged = false;
};

/// Least squares solve min ||map x - rhs|| by Golub-Kahan bidiagonalization
/// with the starting vector rhs (Paige and Saunders). Stops when the
/// normal-equations residual estimate ||A^T r|| / (||A|| ||r||) drops below
/// tol, when the residual itself is resolved to the same relative level, or
/// at max_iterations (converged = false, not an error). A zero rhs returns
/// the zero solution immediately.
LsqrReport lsqr_solve(const LinearMap& map, const Vector& rhs, const LsqrOptions& opts = {});

LsqrReport lsqr_solve(const LinearMap& map, const Vector& rhs, double tol,
                      Index max_iterations = 0);

}  // namespace illposed

#endif
