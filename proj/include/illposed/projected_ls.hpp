#ifndef ILLPOSED_PROJECTED_LS_HPP
#define ILLPOSED_PROJECTED_LS_HPP

#include <vector>

#include "illposed/linop.hpp"

namespace illposed {

/// Lower bidiagonal (k+1) x k coefficient matrix: diag alpha_1..alpha_k,
/// subdiagonal beta_2..beta_{k+1}.
struct LowerBidiag {
  std::vector<double> diag;
  std::vector<double> sub;

  Index order() const { return static_cast<Index>(diag.size()); }
  Matrix to_dense() const;
  /// y -> B y, length k+1.
  Vector apply(const Vector& y) const;
};

/// Upper bidiagonal k x k matrix with signed entries: diag d_1..d_k,
/// superdiagonal s_1..s_{k-1} placed at (j, j+1).
struct UpperBidiag {
  std::vector<double> diag;
  std::vector<double> super;

  Index order() const { return static_cast<Index>(diag.size()); }
  Matrix to_dense() const;
  /// y -> Bbar y, length k.
  Vector apply(const Vector& y) const;
};

/// Incremental QR of the growing lower bidiagonal B_k against the right-hand
/// side beta1 e_1, one Givens rotation per column. residual_norm() is the
/// least squares residual of min ||B_k y - beta1 e_1|| and costs nothing
/// beyond the push.
class QrUpdateState {
public:
  explicit QrUpdateState(double beta1);

  /// Absorbs column k with entries (alpha_k, beta_{k+1}).
  void push(double alpha_k, double beta_k1);

  Index k() const { return k_; }
  double beta1() const { return beta1_; }
  double residual_norm() const { return std::abs(phibar_); }

  /// Back substitution through the bidiagonal R factor. Throws on a zero
  /// R diagonal (rank deficiency), naming the offending index.
  Vector solve_y() const;

  const std::vector<double>& r_diag() const { return rdiag_; }
  const std::vector<double>& r_super() const { return rsuper_; }
  const std::vector<double>& rotated_rhs() const { return qtb_; }

private:
  double beta1_;
  double phibar_;    // trailing rotated rhs entry; |.| is the residual norm
  double last_c_ = 1.0;
  double last_s_ = 0.0;
  Index k_ = 0;
  std::vector<double> rdiag_;
  std::vector<double> rsuper_;
  std::vector<double> qtb_;
  std::vector<std::pair<double, double>> rotations_;
};

/// ||Bbar y|| evaluated from the bidiagonal structure in O(k).
double seminorm(const UpperBidiag& bbar, const Vector& y);

/// Solves the seminorm-constrained projected problem two ways and returns the
/// relative discrepancy between them: the substitution route minimizes
/// ||ybar|| over argmin ||(B Bbar^{-1}) ybar - beta1 e_1|| and maps back
/// through Bbar, while the direct route solves min ||B y - beta1 e_1||.
/// Test support for the equivalence of the two formulations.
double constrained_equivalence_check(const LowerBidiag& B, const UpperBidiag& Bbar, double beta1);

}  // namespace illposed

#endif
