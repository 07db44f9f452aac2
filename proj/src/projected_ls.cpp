#include "illposed/projected_ls.hpp"

#include <Eigen/QR>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace illposed {

Matrix LowerBidiag::to_dense() const {
  const Index k = order();
  Matrix B = Matrix::Zero(k + 1, k);
  for (Index j = 0; j < k; ++j) {
    B(j, j) = diag[j];
    B(j + 1, j) = sub[j];
  }
  return B;
}

Vector LowerBidiag::apply(const Vector& y) const {
  const Index k = order();
  if (y.size() != k) throw std::invalid_argument("LowerBidiag::apply: length mismatch");
  Vector out = Vector::Zero(k + 1);
  for (Index j = 0; j < k; ++j) {
    out[j] += diag[j] * y[j];
    out[j + 1] += sub[j] * y[j];
  }
  return out;
}

Matrix UpperBidiag::to_dense() const {
  const Index k = order();
  Matrix B = Matrix::Zero(k, k);
  for (Index j = 0; j < k; ++j) {
    B(j, j) = diag[j];
    if (j + 1 < k) B(j, j + 1) = super[j];
  }
  return B;
}

Vector UpperBidiag::apply(const Vector& y) const {
  const Index k = order();
  if (y.size() != k) throw std::invalid_argument("UpperBidiag::apply: length mismatch");
  Vector out(k);
  for (Index j = 0; j < k; ++j) {
    out[j] = diag[j] * y[j];
    if (j + 1 < k) out[j] += super[j] * y[j + 1];
  }
  return out;
}

QrUpdateState::QrUpdateState(double beta1) : beta1_(beta1), phibar_(beta1) {
  if (!std::isfinite(beta1)) throw std::invalid_argument("QrUpdateState: beta1 must be finite");
}

void QrUpdateState::push(double alpha_k, double beta_k1) {
  if (!std::isfinite(alpha_k) || !std::isfinite(beta_k1)) {
    throw std::invalid_argument("QrUpdateState::push: nonfinite coefficient");
  }
  if (beta_k1 < 0.0) throw std::invalid_argument("QrUpdateState::push: beta must be nonnegative");

  // The rotation from the previous column hits the incoming one first.
  double rbar = alpha_k;
  if (k_ > 0) {
    rsuper_.push_back(last_s_ * alpha_k);
    rbar = last_c_ * alpha_k;
  }

  double c = 1.0;
  double s = 0.0;
  double rho = rbar;
  if (beta_k1 != 0.0) {
    rho = std::hypot(rbar, beta_k1);
    c = rbar / rho;
    s = beta_k1 / rho;
  }
  rdiag_.push_back(rho);
  rotations_.emplace_back(c, s);
  qtb_.push_back(c * phibar_);
  phibar_ = -s * phibar_;
  last_c_ = c;
  last_s_ = s;
  ++k_;
}

Vector QrUpdateState::solve_y() const {
  Vector y = Vector::Zero(k_);
  for (Index j = k_ - 1; j >= 0; --j) {
    if (rdiag_[j] == 0.0) {
      std::ostringstream msg;
      msg << "solve_y: zero R diagonal at column " << (j + 1) << " (rank deficient)";
      throw std::runtime_error(msg.str());
    }
    double rhs = qtb_[j];
    if (j + 1 < k_) rhs -= rsuper_[j] * y[j + 1];
    y[j] = rhs / rdiag_[j];
  }
  return y;
}

double seminorm(const UpperBidiag& bbar, const Vector& y) { return bbar.apply(y).norm(); }

double constrained_equivalence_check(const LowerBidiag& B, const UpperBidiag& Bbar, double beta1) {
  const Index k = B.order();
  if (Bbar.order() != k) {
    throw std::invalid_argument("constrained_equivalence_check: order mismatch");
  }
  for (Index j = 0; j < k; ++j) {
    if (Bbar.diag[j] == 0.0) {
      throw std::runtime_error("constrained_equivalence_check: singular Bbar");
    }
  }
  const Matrix Bd = B.to_dense();
  const Matrix Bbard = Bbar.to_dense();
  Vector rhs = Vector::Zero(k + 1);
  rhs[0] = beta1;

  // Substitution route: ybar = Bbar y, minimize over the transformed variable,
  // then map back through Bbar.
  const Matrix M = Bbard.transpose().triangularView<Eigen::Lower>().solve(Bd.transpose()).transpose();
  const Vector ybar = M.colPivHouseholderQr().solve(rhs);
  const Vector y_subst = Bbard.triangularView<Eigen::Upper>().solve(ybar);

  const Vector y_direct = Bd.colPivHouseholderQr().solve(rhs);

  const double denom = y_direct.norm();
  if (denom == 0.0) return (y_subst - y_direct).norm();
  return (y_subst - y_direct).norm() / denom;
}

}  // namespace illposed
