#ifndef ILLPOSED_GSVD_HPP
#define ILLPOSED_GSVD_HPP

#include <vector>

#include "illposed/linop.hpp"

namespace illposed {

/// Column ordering of a GSVD factorization.
///
/// decreasing_c: paired generalized values first with c nonincreasing,
/// trailing block of c = 1 / s = 0 indices (the null space of L) last.
/// null_block_first: the c = 1 block leads and the paired values follow in
/// decreasing order; this is the ordering used by the filtered expansions.
enum class GsvdOrdering { decreasing_c, null_block_first };

/// Thin QR of the stacked pair (A; L) with a positive R diagonal.
struct StackedQr {
  Matrix qa;  // m x n, top block of Q
  Matrix ql;  // p x n, bottom block of Q
  Matrix r;   // n x n upper triangular
};

StackedQr stacked_qr(const Matrix& A, const Matrix& L);

/// GSVD of a dense pair {A, L}: A = P_A C G^{-1}, L = P_L S G^{-1} with
/// orthogonal P_A, P_L, W, upper triangular R from the stacked QR,
/// G = R^{-1} W, and c_i^2 + s_i^2 = 1 per index. Indices with s below the
/// pairing threshold form the null block (c = 1, s = 0); their count is
/// null_count and their position depends on the ordering.
struct GsvdFactors {
  Matrix P_A;  // m x m orthogonal
  Matrix P_L;  // p x p orthogonal
  Matrix W;    // n x n orthogonal
  Matrix R;    // n x n upper triangular, nonsingular
  Matrix G;    // R^{-1} W
  Vector c;    // length n
  Vector s;    // length n, zero on the null block
  GsvdOrdering ordering = GsvdOrdering::decreasing_c;
  Index null_count = 0;

  Index m() const { return P_A.rows(); }
  Index n() const { return W.rows(); }
  Index p() const { return P_L.rows(); }
  Index paired_count() const { return n() - null_count; }

  bool is_null_index(Index i) const;
  /// Row of S holding s_i for a paired index i.
  Index pair_row(Index i) const;

  Matrix C_matrix() const;  // m x n diagonal of c
  Matrix S_matrix() const;  // p x n with s_i at (pair_row(i), i)
};

/// Computes the GSVD through the stacked QR and the CS decomposition: an SVD
/// of Q_A supplies P_A, C and W; the columns of P_L follow from Q_L W with
/// s_i = ||Q_L w_i||, and P_L is completed to an orthogonal matrix.
/// Throws when m < n or when the stacked pair is numerically rank deficient.
GsvdFactors gsvd(const Matrix& A, const Matrix& L,
                 GsvdOrdering ordering = GsvdOrdering::decreasing_c);

/// The component of the data lying along the null space of L:
/// sum over the null block of (p_{i,A}^T b) g_i. Zero when p >= n.
Vector null_space_term(const GsvdFactors& factors, const Vector& b);

/// Filtered expansion solving min ||A x - b||^2 + lambda^2 ||L x||^2:
/// sum of f_i (p_{i,A}^T b / c_i) g_i over paired indices plus the null-space
/// term, with f_i = c_i^2 / (c_i^2 + lambda^2 s_i^2).
Vector tikhonov_solution(const GsvdFactors& factors, const Vector& b, double lambda);

/// Truncated expansion keeping the k dominant paired components plus the
/// null-space term. Requires 0 <= k <= number of paired indices.
Vector tgsvd_solution(const GsvdFactors& factors, const Vector& b, Index k);

/// Iteration filters f_i = 1 - prod_j (ritz_j^2 - c_i^2) / ritz_j^2 for the
/// projected process after k = ritz.size() steps. The product is evaluated
/// in extended precision; ritz values must be positive and distinct.
std::vector<double> filter_factors(const std::vector<double>& c, const std::vector<double>& ritz);

/// |p_{i,A}^T b| over the paired indices in decreasing-c order, the data
/// coefficients whose decay against the c_i is the Picard diagnostic.
Vector picard_coefficients(const GsvdFactors& factors, const Vector& b);

}  // namespace illposed

#endif
