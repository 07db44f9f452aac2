#include "illposed/linop.hpp"

#include <sstream>
#include <stdexcept>
#include <variant>

namespace illposed {

namespace {

struct Dense {
  RowMatrix entries;
};
struct Kronecker {
  RowMatrix left;
  RowMatrix right;
  double scale;
};
struct VStack {
  LinearMap top;
  LinearMap bottom;
};
struct Identity {
  Index n;
};
struct FirstDiff1d {
  Index n;
};
struct FirstDiff2d {
  Index grid;
};

void check_length(const char* what, Index expected, Index actual) {
  if (expected != actual) {
    std::ostringstream msg;
    msg << what << ": expected vector of length " << expected << ", got " << actual;
    throw std::invalid_argument(msg.str());
  }
}

// (L (x) R) x = vec(R X L^T) with x = vec(X) stacked column major.
Vector kron_apply(const RowMatrix& left, const RowMatrix& right, double scale, const Vector& x) {
  Eigen::Map<const Matrix> X(x.data(), right.cols(), left.cols());
  Matrix Y = right * X * left.transpose();
  return scale * Eigen::Map<const Vector>(Y.data(), Y.size());
}

}  // namespace

struct LinOpNode {
  std::variant<Dense, Kronecker, VStack, Identity, FirstDiff1d, FirstDiff2d> kind;
};

LinearMap LinearMap::dense(RowMatrix entries) {
  if (entries.rows() < 1 || entries.cols() < 1) {
    throw std::invalid_argument("dense map requires a nonempty matrix");
  }
  const Index r = entries.rows();
  const Index c = entries.cols();
  return LinearMap(std::make_shared<const LinOpNode>(LinOpNode{Dense{std::move(entries)}}), r, c);
}

LinearMap LinearMap::dense(const Matrix& entries) { return dense(RowMatrix(entries)); }

LinearMap LinearMap::kronecker(RowMatrix left, RowMatrix right, double scale) {
  if (left.rows() < 1 || right.rows() < 1) {
    throw std::invalid_argument("kronecker factors must be nonempty");
  }
  const Index r = left.rows() * right.rows();
  const Index c = left.cols() * right.cols();
  return LinearMap(
      std::make_shared<const LinOpNode>(LinOpNode{Kronecker{std::move(left), std::move(right), scale}}),
      r, c);
}

LinearMap LinearMap::vstack(LinearMap top, LinearMap bottom) {
  if (top.cols() != bottom.cols()) {
    std::ostringstream msg;
    msg << "vstack: column counts differ (" << top.cols() << " vs " << bottom.cols() << ")";
    throw std::invalid_argument(msg.str());
  }
  const Index r = top.rows() + bottom.rows();
  const Index c = top.cols();
  return LinearMap(
      std::make_shared<const LinOpNode>(LinOpNode{VStack{std::move(top), std::move(bottom)}}), r, c);
}

LinearMap LinearMap::identity(Index n) {
  if (n < 1) throw std::invalid_argument("identity requires n >= 1");
  return LinearMap(std::make_shared<const LinOpNode>(LinOpNode{Identity{n}}), n, n);
}

LinearMap LinearMap::first_diff_1d(Index n) {
  if (n < 2) throw std::invalid_argument("first_diff_1d requires n >= 2");
  return LinearMap(std::make_shared<const LinOpNode>(LinOpNode{FirstDiff1d{n}}), n - 1, n);
}

LinearMap LinearMap::first_diff_2d(Index grid) {
  if (grid < 2) throw std::invalid_argument("first_diff_2d requires grid >= 2");
  return LinearMap(std::make_shared<const LinOpNode>(LinOpNode{FirstDiff2d{grid}}),
                   2 * grid * (grid - 1), grid * grid);
}

Vector LinearMap::apply(const Vector& x) const {
  check_length("apply", cols_, x.size());
  const Index out_rows = rows_;
  return std::visit(
      [&](const auto& node) -> Vector {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Dense>) {
          return node.entries * x;
        } else if constexpr (std::is_same_v<T, Kronecker>) {
          return kron_apply(node.left, node.right, node.scale, x);
        } else if constexpr (std::is_same_v<T, VStack>) {
          Vector y(out_rows);
          y.head(node.top.rows()) = node.top.apply(x);
          y.tail(node.bottom.rows()) = node.bottom.apply(x);
          return y;
        } else if constexpr (std::is_same_v<T, Identity>) {
          return x;
        } else if constexpr (std::is_same_v<T, FirstDiff1d>) {
          const Index n = node.n;
          return x.head(n - 1) - x.tail(n - 1);
        } else {
          const Index N = node.grid;
          Eigen::Map<const Matrix> X(x.data(), N, N);
          Vector y(out_rows);
          Eigen::Map<Matrix> Y1(y.data(), N - 1, N);
          Eigen::Map<Matrix> Y2(y.data() + N * (N - 1), N, N - 1);
          Y1 = X.topRows(N - 1) - X.bottomRows(N - 1);
          Y2 = X.leftCols(N - 1) - X.rightCols(N - 1);
          return y;
        }
      },
      node_->kind);
}

Vector LinearMap::apply_t(const Vector& y) const {
  check_length("apply_t", rows_, y.size());
  return std::visit(
      [&](const auto& node) -> Vector {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Dense>) {
          return node.entries.transpose() * y;
        } else if constexpr (std::is_same_v<T, Kronecker>) {
          return kron_apply(node.left.transpose(), node.right.transpose(), node.scale, y);
        } else if constexpr (std::is_same_v<T, VStack>) {
          return node.top.apply_t(y.head(node.top.rows())) +
                 node.bottom.apply_t(y.tail(node.bottom.rows()));
        } else if constexpr (std::is_same_v<T, Identity>) {
          return y;
        } else if constexpr (std::is_same_v<T, FirstDiff1d>) {
          const Index n = node.n;
          Vector x = Vector::Zero(n);
          x.head(n - 1) += y;
          x.tail(n - 1) -= y;
          return x;
        } else {
          const Index N = node.grid;
          Eigen::Map<const Matrix> Y1(y.data(), N - 1, N);
          Eigen::Map<const Matrix> Y2(y.data() + N * (N - 1), N, N - 1);
          Matrix X = Matrix::Zero(N, N);
          X.topRows(N - 1) += Y1;
          X.bottomRows(N - 1) -= Y1;
          X.leftCols(N - 1) += Y2;
          X.rightCols(N - 1) -= Y2;
          return Eigen::Map<const Vector>(X.data(), X.size());
        }
      },
      node_->kind);
}

Matrix LinearMap::to_dense() const {
  Matrix out(rows_, cols_);
  Vector e = Vector::Zero(cols_);
  for (Index j = 0; j < cols_; ++j) {
    e[j] = 1.0;
    out.col(j) = apply(e);
    e[j] = 0.0;
  }
  return out;
}

bool LinearMap::is_dense() const { return std::holds_alternative<Dense>(node_->kind); }

const RowMatrix& LinearMap::dense_entries() const {
  if (const auto* d = std::get_if<Dense>(&node_->kind)) return d->entries;
  throw std::invalid_argument("dense_entries: map is not of dense kind");
}

}  // namespace illposed
