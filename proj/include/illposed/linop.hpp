#ifndef ILLPOSED_LINOP_HPP
#define ILLPOSED_LINOP_HPP

#include <Eigen/Dense>
#include <memory>

namespace illposed {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Dense operator entries are kept row major so that text fixtures and the
// on-disk format share one layout.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

struct LinOpNode;

/// Matrix-free linear operator over real vectors.
///
/// A LinearMap is an immutable handle (cheap to copy, safe to share across
/// threads) over one of a small set of structured kinds: an explicit dense
/// matrix, a scaled Kronecker product of two dense factors, a vertical stack
/// of two maps, the identity, and the one- and two-dimensional first
/// difference operators. Forward and transposed applications are exact
/// adjoints of each other.
class LinearMap {
public:
  static LinearMap dense(RowMatrix entries);
  static LinearMap dense(const Matrix& entries);
  static LinearMap kronecker(RowMatrix left, RowMatrix right, double scale = 1.0);
  static LinearMap vstack(LinearMap top, LinearMap bottom);
  static LinearMap identity(Index n);
  /// (n-1) x n rows of (1, -1) stencils.
  static LinearMap first_diff_1d(Index n);
  /// The stack (I_N (x) D ; D (x) I_N) with D the 1d stencil, 2N(N-1) x N^2.
  static LinearMap first_diff_2d(Index grid);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  /// y = M x. Throws std::invalid_argument on a length mismatch.
  Vector apply(const Vector& x) const;
  /// x = M^T y. Throws std::invalid_argument on a length mismatch.
  Vector apply_t(const Vector& y) const;

  /// Materializes the operator column by column. Intended for small sizes.
  Matrix to_dense() const;

  bool is_dense() const;
  /// Entries of a dense-kind map; throws for any other kind.
  const RowMatrix& dense_entries() const;

private:
  LinearMap(std::shared_ptr<const LinOpNode> node, Index rows, Index cols)
      : node_(std::move(node)), rows_(rows), cols_(cols) {}

  std::shared_ptr<const LinOpNode> node_;
  Index rows_ = 0;
  Index cols_ = 0;
};

}  // namespace illposed

#endif
