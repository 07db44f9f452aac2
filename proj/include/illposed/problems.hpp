#ifndef ILLPOSED_PROBLEMS_HPP
#define ILLPOSED_PROBLEMS_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "illposed/linop.hpp"

namespace illposed {

/// A test problem: operators, noisy data, and (when synthetic) ground truth.
///
/// For synthetic instances b = b_true + e with ||e|| / ||b_true|| = eps and
/// b_true = A x_true.
struct ProblemInstance {
  LinearMap A;
  LinearMap L;
  Vector b;
  std::optional<Vector> x_true;
  std::optional<Vector> b_true;
  std::optional<Vector> e;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::string name;

  Index m() const { return A.rows(); }
  Index n() const { return A.cols(); }
  Index p() const { return L.rows(); }
};

/// Kernel discretization pieces shared by the 1d generators.
struct GeneratedSystem {
  LinearMap A;   // dense n x n
  Vector x_true; // length n
  Vector b_true; // A x_true
};

/// One-dimensional image restoration model: midpoint quadrature of the
/// kernel ((cos s + cos t) sin(u)/u)^2 with u = pi (sin s + sin t) on
/// [-pi/2, pi/2], and a two-Gaussian exact solution. Severely ill posed.
/// n must be even and >= 2.
GeneratedSystem gen_shaw(Index n);

/// Fredholm integral equation of the first kind with the analytic kernel
/// exp(s cos t) on [0, pi/2] x [0, pi] and solution sin(t). Severely ill
/// posed. n must be even and >= 2.
GeneratedSystem gen_baart(Index n);

/// Inverse heat equation: Volterra kernel h(s - t) with
/// h(t) = t^{-3/2} / (2 kappa sqrt(pi)) exp(-1/(4 kappa^2 t)) discretized by
/// the midpoint rule, giving a lower triangular Toeplitz matrix. kappa = 1.
/// n must be even and >= 2.
GeneratedSystem gen_heat(Index n);

/// Computation of the second derivative: Galerkin discretization of the
/// Green's function kernel on [0,1]^2 with orthonormal box functions.
/// example selects the exact solution: 1 -> t, 2 -> exp(t),
/// 3 -> piecewise linear hat (requires n even).
GeneratedSystem gen_deriv2(Index n, int example = 2);

/// Gaussian blurring operator (2 pi sigma^2)^{-1} T (x) T where T is the
/// N x N symmetric banded Toeplitz matrix with entries
/// exp(-(i-j)^2 / (2 sigma^2)) inside the half-bandwidth band.
LinearMap gen_gaussian_blur(Index grid, Index band, double sigma);

/// Scaled first derivative operators used as regularization matrices.
LinearMap first_derivative_1d(Index n);
LinearMap first_derivative_2d(Index grid);

/// Deterministic N x N phantom: piecewise-constant blocks plus a Gaussian
/// bump, used as the exact image for the synthetic blur problems.
Matrix phantom_image(Index grid);

struct NoisyData {
  Vector b;
  Vector e;
};

/// Adds seeded Gaussian white noise rescaled so that ||e|| = eps ||b_true||
/// exactly. eps = 0 yields e = 0. Reproducible bit for bit per seed.
NoisyData add_noise(const Vector& b_true, double eps, std::uint64_t seed);

/// Standard normal deviates from a seeded 64-bit generator (Box-Muller over
/// mt19937_64); the sequence is platform independent.
Vector seeded_gaussians(Index n, std::uint64_t seed);

/// Assembles a full synthetic instance from a generated system plus noise.
ProblemInstance make_instance(std::string name, const GeneratedSystem& sys, LinearMap L,
                              double eps, std::uint64_t seed);

/// Synthetic 2d deblurring instance on an N x N phantom with the Kronecker
/// blur operator and the 2d first derivative regularizer.
ProblemInstance make_blur_instance(Index grid, Index band, double sigma, double eps,
                                   std::uint64_t seed);

}  // namespace illposed

#endif
