#include "illposed/jbd.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "illposed/lsqr.hpp"

namespace illposed {

namespace {

constexpr double kBreakdownRel = 1e-13;

bool is_breakdown(double coeff, double prev_coeff) {
  return coeff < kBreakdownRel * std::max(1.0, prev_coeff);
}

// Gram-Schmidt passes against the stored columns; full reorthogonalization
// runs two passes so orthogonality holds to roundoff.
void reorthogonalize(Vector& v, const std::vector<Vector>& basis, Reorth mode) {
  if (mode == Reorth::none) return;
  const int passes = mode == Reorth::full ? 2 : 1;
  for (int pass = 0; pass < passes; ++pass) {
    for (const Vector& q : basis) {
      v -= (q.dot(v)) * q;
    }
  }
}

// Same, but mirrors every update onto the preimage so that
// stacked * pre == v stays true.
void reorthogonalize_with_preimage(Vector& v, Vector& pre, const std::vector<Vector>& basis,
                                   const std::vector<Vector>& basis_pre, Reorth mode) {
  if (mode == Reorth::none) return;
  const int passes = mode == Reorth::full ? 2 : 1;
  for (int pass = 0; pass < passes; ++pass) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double c = basis[i].dot(v);
      v -= c * basis[i];
      pre -= c * basis_pre[i];
    }
  }
}

// QQ^T (u; 0_p) realized as the stacked product of the inner least squares
// solution; also returns the preimage.
struct Projection {
  Vector image;
  Vector preimage;
};

Projection project_onto_stack(const JbdState& state, const Vector& u) {
  Vector rhs = Vector::Zero(state.m + state.p);
  rhs.head(state.m) = u;
  LsqrReport inner = lsqr_solve(state.stacked, rhs, state.inner_tol);
  return {state.stacked.apply(inner.solution), std::move(inner.solution)};
}

}  // namespace

JbdState jbd_init(const LinearMap& A, const LinearMap& L, const Vector& b, double inner_tol,
                  Reorth reorth) {
  if (A.cols() != L.cols()) throw std::invalid_argument("jbd_init: A and L column counts differ");
  if (b.size() != A.rows()) throw std::invalid_argument("jbd_init: b length does not match A rows");

  JbdState state{LinearMap::vstack(A, L)};
  state.m = A.rows();
  state.n = A.cols();
  state.p = L.rows();
  state.inner_tol = inner_tol;
  state.reorth = reorth;

  const double beta1 = b.norm();
  if (beta1 == 0.0) throw std::invalid_argument("jbd_init: zero right-hand side");
  state.beta.push_back(beta1);
  state.U.push_back(b / beta1);

  Projection proj = project_onto_stack(state, state.U[0]);
  const double alpha1 = proj.image.norm();
  state.alpha.push_back(alpha1);
  if (is_breakdown(alpha1, beta1)) {
    throw std::runtime_error("jbd_init: breakdown, alpha_1 below threshold");
  }
  state.Vtil.push_back(proj.image / alpha1);
  state.Zeta.push_back(proj.preimage / alpha1);

  Vector bottom = state.Vtil[0].tail(state.p);
  const double alphahat1 = bottom.norm();
  state.alphahat.push_back(alphahat1);
  if (is_breakdown(alphahat1, alpha1)) {
    throw std::runtime_error("jbd_init: breakdown, alphahat_1 below threshold");
  }
  state.Uhat.push_back(bottom / alphahat1);
  return state;
}

bool jbd_step(JbdState& state) {
  if (state.broke_down()) throw std::logic_error("jbd_step: process already broke down");
  const Index i = state.k + 1;  // 1-based step index, as in the recurrences
  if (i > std::min(state.n, state.p)) {
    throw std::logic_error("jbd_step: k+1 exceeds min(n, p)");
  }

  // beta_{i+1} u_{i+1} = vtil_i(1:m) - alpha_i u_i
  Vector s = state.Vtil[i - 1].head(state.m) - state.alpha[i - 1] * state.U[i - 1];
  reorthogonalize(s, state.U, state.reorth);
  const double beta_next = s.norm();
  state.beta.push_back(beta_next);
  if (is_breakdown(beta_next, state.alpha[i - 1])) {
    state.breakdown_at = i;
    return false;
  }
  state.U.push_back(s / beta_next);

  // alpha_{i+1} vtil_{i+1} = QQ^T (u_{i+1}; 0) - beta_{i+1} vtil_i
  Projection proj = project_onto_stack(state, state.U[i]);
  Vector t = proj.image - beta_next * state.Vtil[i - 1];
  Vector zt = proj.preimage - beta_next * state.Zeta[i - 1];
  reorthogonalize_with_preimage(t, zt, state.Vtil, state.Zeta, state.reorth);
  const double alpha_next = t.norm();
  state.alpha.push_back(alpha_next);
  if (is_breakdown(alpha_next, beta_next)) {
    state.breakdown_at = i;
    return false;
  }
  state.Vtil.push_back(t / alpha_next);
  state.Zeta.push_back(zt / alpha_next);

  // betahat_i = alpha_{i+1} beta_{i+1} / alphahat_i
  const double betahat_i = alpha_next * beta_next / state.alphahat[i - 1];
  state.betahat.push_back(betahat_i);

  // alphahat_{i+1} uhat_{i+1} = (-1)^i vtil_{i+1}(m+1:m+p) - betahat_i uhat_i
  const double sign = (i % 2 == 0) ? 1.0 : -1.0;
  Vector r = sign * state.Vtil[i].tail(state.p) - betahat_i * state.Uhat[i - 1];
  reorthogonalize(r, state.Uhat, state.reorth);
  const double alphahat_next = r.norm();
  state.alphahat.push_back(alphahat_next);
  if (is_breakdown(alphahat_next, state.alphahat[i - 1])) {
    state.breakdown_at = i;
    return false;
  }
  state.Uhat.push_back(r / alphahat_next);

  state.k = i;
  return true;
}

LowerBidiag bidiag_B(const JbdState& state) { return bidiag_B(state, state.k); }

LowerBidiag bidiag_B(const JbdState& state, Index k) {
  if (k < 1 || static_cast<std::size_t>(k) > state.alpha.size() ||
      static_cast<std::size_t>(k) + 1 > state.beta.size()) {
    throw std::invalid_argument("bidiag_B: k outside the recorded steps");
  }
  LowerBidiag B;
  B.diag.assign(state.alpha.begin(), state.alpha.begin() + k);
  B.sub.assign(state.beta.begin() + 1, state.beta.begin() + 1 + k);
  return B;
}

UpperBidiag bidiag_Bbar(const JbdState& state) { return bidiag_Bbar(state, state.k); }

UpperBidiag bidiag_Bbar(const JbdState& state, Index k) {
  if (k < 1 || static_cast<std::size_t>(k) > state.alphahat.size() ||
      (k > 1 && static_cast<std::size_t>(k) - 1 > state.betahat.size())) {
    throw std::invalid_argument("bidiag_Bbar: k outside the recorded steps");
  }
  UpperBidiag Bbar;
  Bbar.diag.resize(k);
  Bbar.super.resize(k - 1);
  // Bbar = Bhat D with D = diag(1, -1, 1, ...): column j picks up (-1)^{j-1}.
  for (Index j = 0; j < k; ++j) {
    const double colsign = (j % 2 == 0) ? 1.0 : -1.0;
    Bbar.diag[j] = colsign * state.alphahat[j];
    if (j > 0) Bbar.super[j - 1] = colsign * state.betahat[j - 1];
  }
  return Bbar;
}

Vector combine_preimages(const JbdState& state, const Vector& y) {
  if (y.size() > static_cast<Index>(state.Zeta.size())) {
    throw std::invalid_argument("combine_preimages: y longer than stored columns");
  }
  Vector x = Vector::Zero(state.n);
  for (Index j = 0; j < y.size(); ++j) x += y[j] * state.Zeta[j];
  return x;
}

void write_coefficients_csv(std::ostream& os, const JbdState& state) {
  os << "i,alpha,beta,alphahat,betahat\n";
  const std::size_t rows = state.alpha.size();
  for (std::size_t i = 0; i < rows; ++i) {
    os << (i + 1) << ',' << state.alpha[i] << ',' << state.beta[i] << ',';
    if (i < state.alphahat.size()) os << state.alphahat[i];
    os << ',';
    if (i < state.betahat.size()) os << state.betahat[i];
    os << '\n';
  }
}

}  // namespace illposed
