#include "illposed/gsvd.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace illposed {

namespace {

constexpr double kPairThreshold = 1e-8;
constexpr double kRankTol = 1e-12;

// BDCSVD is much faster at larger sizes; JacobiSVD is sharper for the small
// fixtures the oracle mostly sees.
void svd_full(const Matrix& M, Matrix& U, Vector& sigma, Matrix& V) {
  if (M.rows() <= 128 && M.cols() <= 128) {
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    U = svd.matrixU();
    sigma = svd.singularValues();
    V = svd.matrixV();
  } else {
    Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    U = svd.matrixU();
    sigma = svd.singularValues();
    V = svd.matrixV();
  }
}

}  // namespace

StackedQr stacked_qr(const Matrix& A, const Matrix& L) {
  if (A.cols() != L.cols()) throw std::invalid_argument("stacked_qr: column counts differ");
  const Index m = A.rows();
  const Index p = L.rows();
  const Index n = A.cols();
  Matrix stack(m + p, n);
  stack.topRows(m) = A;
  stack.bottomRows(p) = L;

  Eigen::HouseholderQR<Matrix> qr(stack);
  Matrix Q = qr.householderQ() * Matrix::Identity(m + p, n);
  Matrix R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (R(j, j) < 0.0) {
      R.row(j) *= -1.0;
      Q.col(j) *= -1.0;
    }
  }
  return {Q.topRows(m), Q.bottomRows(p), std::move(R)};
}

bool GsvdFactors::is_null_index(Index i) const {
  if (ordering == GsvdOrdering::decreasing_c) return i >= paired_count();
  return i < null_count;
}

Index GsvdFactors::pair_row(Index i) const {
  if (is_null_index(i)) throw std::invalid_argument("pair_row: index lies in the null block");
  return ordering == GsvdOrdering::decreasing_c ? i : i - null_count;
}

Matrix GsvdFactors::C_matrix() const {
  Matrix C = Matrix::Zero(m(), n());
  for (Index i = 0; i < n(); ++i) C(i, i) = c[i];
  return C;
}

Matrix GsvdFactors::S_matrix() const {
  Matrix S = Matrix::Zero(p(), n());
  for (Index i = 0; i < n(); ++i) {
    if (!is_null_index(i)) S(pair_row(i), i) = s[i];
  }
  return S;
}

GsvdFactors gsvd(const Matrix& A, const Matrix& L, GsvdOrdering ordering) {
  const Index m = A.rows();
  const Index n = A.cols();
  const Index p = L.rows();
  if (m < n) throw std::invalid_argument("gsvd: requires m >= n");
  if (L.cols() != n) throw std::invalid_argument("gsvd: A and L column counts differ");

  StackedQr qr = stacked_qr(A, L);
  {
    Eigen::JacobiSVD<Matrix> rsvd(qr.r);
    const Vector& sv = rsvd.singularValues();
    if (sv[n - 1] <= kRankTol * sv[0]) {
      throw std::runtime_error(
          "gsvd: the stacked pair (A; L) is numerically rank deficient; the "
          "factorization requires the stack to have full column rank");
    }
  }

  Matrix U, V;
  Vector sigma;
  svd_full(qr.qa, U, sigma, V);  // Q_A = U diag(sigma) V^T, sigma decreasing

  // Singular values of a matrix with orthonormal stacked columns cannot
  // exceed one; clip roundoff spill.
  Vector c_raw = sigma.head(n).cwiseMin(1.0);
  Vector s_raw(n);
  Matrix QLW = qr.ql * V;
  for (Index i = 0; i < n; ++i) s_raw[i] = QLW.col(i).norm();

  std::vector<Index> null_idx, paired_idx;
  for (Index i = 0; i < n; ++i) {
    (s_raw[i] < kPairThreshold ? null_idx : paired_idx).push_back(i);
  }
  const Index nb = static_cast<Index>(null_idx.size());
  if (static_cast<Index>(paired_idx.size()) > p) {
    throw std::runtime_error("gsvd: more paired values than rows of L");
  }

  // Natural SVD order puts the c = 1 block (largest c) first; both published
  // orderings keep the paired part in decreasing c.
  std::vector<Index> perm;
  perm.reserve(n);
  if (ordering == GsvdOrdering::decreasing_c) {
    perm.insert(perm.end(), paired_idx.begin(), paired_idx.end());
    perm.insert(perm.end(), null_idx.begin(), null_idx.end());
  } else {
    perm.insert(perm.end(), null_idx.begin(), null_idx.end());
    perm.insert(perm.end(), paired_idx.begin(), paired_idx.end());
  }

  GsvdFactors f;
  f.ordering = ordering;
  f.null_count = nb;
  f.c.resize(n);
  f.s.resize(n);
  f.W.resize(n, n);
  f.P_A = U;
  for (Index pos = 0; pos < n; ++pos) {
    const Index i = perm[pos];
    f.W.col(pos) = V.col(i);
    f.P_A.col(pos) = U.col(i);
    if (s_raw[i] < kPairThreshold) {
      f.c[pos] = 1.0;
      f.s[pos] = 0.0;
    } else {
      f.c[pos] = c_raw[i];
      f.s[pos] = s_raw[i];
    }
  }

  // P_L: paired columns from Q_L w_i / s_i, then a deterministic orthogonal
  // completion (two Gram-Schmidt passes over identity candidates).
  f.P_L = Matrix::Zero(p, p);
  Index filled = 0;
  for (Index pos = 0; pos < n; ++pos) {
    if (f.is_null_index(pos)) continue;
    const Index i = perm[pos];
    f.P_L.col(f.pair_row(pos)) = QLW.col(i) / s_raw[i];
    ++filled;
  }
  for (Index cand = 0; cand < p && filled < p; ++cand) {
    Vector v = Vector::Zero(p);
    v[cand] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < filled; ++j) v -= (f.P_L.col(j).dot(v)) * f.P_L.col(j);
    }
    const double nrm = v.norm();
    if (nrm > 0.5) {
      f.P_L.col(filled++) = v / nrm;
    }
  }
  if (filled < p) {
    // Identity candidates can all fall near the existing span only in
    // pathological roundoff cases; retry with a lower acceptance bar.
    for (Index cand = 0; cand < p && filled < p; ++cand) {
      Vector v = Vector::Zero(p);
      v[cand] = 1.0;
      for (int pass = 0; pass < 3; ++pass) {
        for (Index j = 0; j < filled; ++j) v -= (f.P_L.col(j).dot(v)) * f.P_L.col(j);
      }
      const double nrm = v.norm();
      if (nrm > 1e-8) f.P_L.col(filled++) = v / nrm;
    }
    if (filled < p) throw std::runtime_error("gsvd: could not complete P_L");
  }

  f.R = qr.r;
  f.G = qr.r.triangularView<Eigen::Upper>().solve(f.W);
  return f;
}

Vector null_space_term(const GsvdFactors& factors, const Vector& b) {
  if (b.size() != factors.m()) throw std::invalid_argument("null_space_term: b length mismatch");
  Vector g_perp = Vector::Zero(factors.n());
  for (Index i = 0; i < factors.n(); ++i) {
    if (!factors.is_null_index(i)) continue;
    g_perp += factors.P_A.col(i).dot(b) * factors.G.col(i);
  }
  return g_perp;
}

Vector tikhonov_solution(const GsvdFactors& factors, const Vector& b, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("tikhonov_solution: lambda must be >= 0");
  if (b.size() != factors.m()) throw std::invalid_argument("tikhonov_solution: b length mismatch");
  Vector x = null_space_term(factors, b);
  for (Index i = 0; i < factors.n(); ++i) {
    if (factors.is_null_index(i)) continue;
    const double ci = factors.c[i];
    const double si = factors.s[i];
    if (lambda == 0.0 && ci == 0.0) {
      throw std::runtime_error("tikhonov_solution: lambda = 0 with a zero c_i");
    }
    const double d = factors.P_A.col(i).dot(b);
    const double coeff = ci * d / (ci * ci + lambda * lambda * si * si);
    x += coeff * factors.G.col(i);
  }
  return x;
}

Vector tgsvd_solution(const GsvdFactors& factors, const Vector& b, Index k) {
  if (k < 0 || k > factors.paired_count()) {
    throw std::invalid_argument("tgsvd_solution: k out of range");
  }
  if (b.size() != factors.m()) throw std::invalid_argument("tgsvd_solution: b length mismatch");
  Vector x = null_space_term(factors, b);
  const Index offset = factors.ordering == GsvdOrdering::decreasing_c ? 0 : factors.null_count;
  for (Index j = 0; j < k; ++j) {
    const Index i = offset + j;
    const double ci = factors.c[i];
    if (ci == 0.0) throw std::runtime_error("tgsvd_solution: zero c_i inside the truncation");
    const double d = factors.P_A.col(i).dot(b);
    x += (d / ci) * factors.G.col(i);
  }
  return x;
}

std::vector<double> filter_factors(const std::vector<double>& c, const std::vector<double>& ritz) {
  for (std::size_t j = 0; j < ritz.size(); ++j) {
    if (!(ritz[j] > 0.0)) throw std::invalid_argument("filter_factors: ritz values must be positive");
    for (std::size_t l = j + 1; l < ritz.size(); ++l) {
      if (ritz[j] == ritz[l]) {
        throw std::invalid_argument("filter_factors: ritz values must be distinct");
      }
    }
  }
  std::vector<double> f(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const __float128 ci2 = static_cast<__float128>(c[i]) * static_cast<__float128>(c[i]);
    __float128 prod = 1.0;
    for (double r : ritz) {
      const __float128 r2 = static_cast<__float128>(r) * static_cast<__float128>(r);
      prod *= (r2 - ci2) / r2;
    }
    f[i] = static_cast<double>(static_cast<__float128>(1.0) - prod);
  }
  return f;
}

Vector picard_coefficients(const GsvdFactors& factors, const Vector& b) {
  if (b.size() != factors.m()) {
    throw std::invalid_argument("picard_coefficients: b length mismatch");
  }
  const Index offset = factors.ordering == GsvdOrdering::decreasing_c ? 0 : factors.null_count;
  Vector out(factors.paired_count());
  for (Index j = 0; j < factors.paired_count(); ++j) {
    out[j] = std::abs(factors.P_A.col(offset + j).dot(b));
  }
  return out;
}

}  // namespace illposed
