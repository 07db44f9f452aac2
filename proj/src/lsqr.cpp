#include "illposed/lsqr.hpp"

#include <cmath>
#include <stdexcept>

namespace illposed {

LsqrReport lsqr_solve(const LinearMap& map, const Vector& rhs, const LsqrOptions& opts) {
  if (rhs.size() != map.rows()) {
    throw std::invalid_argument("lsqr_solve: rhs length does not match map rows");
  }
  if (!(opts.tol > 0.0)) throw std::invalid_argument("lsqr_solve: tol must be positive");
  const Index maxit =
      opts.max_iterations > 0 ? opts.max_iterations : 2 * (map.rows() + map.cols());

  LsqrReport report;
  report.solution = Vector::Zero(map.cols());

  const double beta1 = rhs.norm();
  if (beta1 == 0.0) {
    report.converged = true;
    return report;
  }

  Vector u = rhs / beta1;
  Vector v = map.apply_t(u);
  double alpha = v.norm();
  if (alpha == 0.0) {
    // A^T b = 0: x = 0 already minimizes.
    report.converged = true;
    return report;
  }
  v /= alpha;
  Vector w = v;
  Vector& x = report.solution;

  double phibar = beta1;
  double rhobar = alpha;
  double anorm2 = alpha * alpha;

  for (Index it = 1; it <= maxit; ++it) {
    u = map.apply(v) - alpha * u;
    double beta = u.norm();
    if (beta > 0.0) u /= beta;
    anorm2 += alpha * alpha + beta * beta;

    Vector vnext = map.apply_t(u) - beta * v;
    alpha = vnext.norm();
    if (alpha > 0.0) vnext /= alpha;
    v.swap(vnext);

    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    x += (phi / rho) * w;
    w = v - (theta / rho) * w;

    report.iterations = it;
    const double anorm = std::sqrt(anorm2);
    const double rnorm = phibar;
    const double arnorm = alpha * std::abs(c) * phibar;
    report.relative_residual_estimate = rnorm > 0.0 ? arnorm / (anorm * rnorm) : 0.0;
    if (report.relative_residual_estimate <= opts.tol) {
      report.converged = true;
      break;
    }
    // Consistent-system test: residual resolved relative to data and iterate.
    if (rnorm <= opts.tol * (beta1 + anorm * x.norm())) {
      report.converged = true;
      break;
    }
  }
  return report;
}

LsqrReport lsqr_solve(const LinearMap& map, const Vector& rhs, double tol, Index max_iterations) {
  LsqrOptions opts;
  opts.tol = tol;
  opts.max_iterations = max_iterations;
  return lsqr_solve(map, rhs, opts);
}

}  // namespace illposed
