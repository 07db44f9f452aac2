#include <doctest.h>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "illposed/gsvd.hpp"
#include "illposed/problems.hpp"
#include "test_support.hpp"

using namespace illposed;
using testing::random_matrix;
using testing::random_vector;

namespace {

void check_reconstruction(const GsvdFactors& f, const Matrix& A, const Matrix& L, double tol) {
  const Matrix Ginv = f.W.transpose() * f.R;  // G^{-1} = W^T R
  CHECK((A - f.P_A * f.C_matrix() * Ginv).norm() <= tol * A.norm());
  CHECK((L - f.P_L * f.S_matrix() * Ginv).norm() <= tol * std::max(L.norm(), 1.0));
  for (Index i = 0; i < f.n(); ++i) {
    CHECK(std::abs(f.c[i] * f.c[i] + f.s[i] * f.s[i] - 1.0) <= 1e-12);
  }
  // Orthogonality of the factor matrices.
  CHECK((f.P_A.transpose() * f.P_A - Matrix::Identity(f.m(), f.m())).norm() <= 1e-12 * f.m());
  CHECK((f.P_L.transpose() * f.P_L - Matrix::Identity(f.p(), f.p())).norm() <= 1e-12 * f.p());
  CHECK((f.W.transpose() * f.W - Matrix::Identity(f.n(), f.n())).norm() <= 1e-12 * f.n());
}

}  // namespace

TEST_SUITE_BEGIN("gsvd");

TEST_CASE("reconstruction and CS identity on a random pair with L1") {
  const Matrix A = random_matrix(12, 8, 41);
  const Matrix L = LinearMap::first_diff_1d(8).to_dense();
  const GsvdFactors f = gsvd(A, L);
  check_reconstruction(f, A, L, 1e-10);
  CHECK(f.null_count == 1);  // null space of L1 is the constants
}

TEST_CASE("identity regularizer gives s = sqrt(1 - c^2)") {
  const Matrix A = random_matrix(10, 6, 43);
  const Matrix L = Matrix::Identity(6, 6);
  const GsvdFactors f = gsvd(A, L);
  check_reconstruction(f, A, L, 1e-10);
  CHECK(f.null_count == 0);
  for (Index i = 0; i < 6; ++i) {
    CHECK(std::abs(f.s[i] - std::sqrt(1.0 - f.c[i] * f.c[i])) <= 1e-10);
  }
}

TEST_CASE("shaw with L1 reconstructs") {
  const GeneratedSystem sys = gen_shaw(32);
  const Matrix A = sys.A.to_dense();
  const Matrix L = LinearMap::first_diff_1d(32).to_dense();
  const GsvdFactors f = gsvd(A, L);
  check_reconstruction(f, A, L, 1e-10);
}

TEST_CASE("orderings") {
  const Matrix A = random_matrix(11, 7, 47);
  const Matrix L = random_matrix(4, 7, 48);  // p < n: three null directions
  const GsvdFactors fd = gsvd(A, L, GsvdOrdering::decreasing_c);
  CHECK(fd.null_count == 3);
  for (Index i = 0; i + 1 < fd.paired_count(); ++i) CHECK(fd.c[i] >= fd.c[i + 1]);
  for (Index i = 0; i + 1 < fd.paired_count(); ++i) CHECK(fd.s[i] <= fd.s[i + 1]);
  for (Index i = fd.paired_count(); i < fd.n(); ++i) CHECK(fd.c[i] == 1.0);
  check_reconstruction(fd, A, L, 1e-10);

  const GsvdFactors fr = gsvd(A, L, GsvdOrdering::null_block_first);
  for (Index i = 0; i < fr.null_count; ++i) CHECK(fr.c[i] == 1.0);
  for (Index i = fr.null_count; i + 1 < fr.n(); ++i) CHECK(fr.c[i] >= fr.c[i + 1]);
  check_reconstruction(fr, A, L, 1e-10);
}

TEST_CASE("null space term") {
  const Matrix A = random_matrix(9, 6, 51);
  SUBCASE("p >= n gives zero") {
    const GsvdFactors f = gsvd(A, Matrix(random_matrix(6, 6, 52)));
    CHECK(null_space_term(f, random_vector(9, 53)).norm() == 0.0);
  }
  SUBCASE("p = n - 2 lands in the null space of L") {
    const Matrix L = random_matrix(4, 6, 54);
    const GsvdFactors f = gsvd(A, L);
    const Vector b = random_vector(9, 55);
    const Vector g_perp = null_space_term(f, b);
    CHECK((L * g_perp).norm() <= 1e-10 * g_perp.norm() * L.norm());
  }
  SUBCASE("b orthogonal to the null-block data directions gives zero") {
    const Matrix L = random_matrix(4, 6, 56);
    const GsvdFactors f = gsvd(A, L);
    // Build b inside the span of the paired P_A columns.
    Vector b = Vector::Zero(9);
    for (Index i = 0; i < f.n(); ++i) {
      if (!f.is_null_index(i)) b += f.P_A.col(i) * static_cast<double>(i + 1);
    }
    CHECK(null_space_term(f, b).norm() <= 1e-12);
  }
}

TEST_CASE("tikhonov solution matches the dense normal equations") {
  const GeneratedSystem sys = gen_shaw(32);
  const Matrix A = sys.A.to_dense();
  const Matrix L = LinearMap::first_diff_1d(32).to_dense();
  const GsvdFactors f = gsvd(A, L);
  const Vector b = sys.b_true + 1e-2 * random_vector(32, 57);

  SUBCASE("lambda = 0 is the unfiltered expansion") {
    const Vector x0 = tikhonov_solution(f, b, 0.0);
    Vector ref = null_space_term(f, b);
    for (Index i = 0; i < f.n(); ++i) {
      if (!f.is_null_index(i)) ref += (f.P_A.col(i).dot(b) / f.c[i]) * f.G.col(i);
    }
    CHECK((x0 - ref).norm() <= 1e-12 * ref.norm());
  }
  SUBCASE("lambda = 0.1 against (A^T A + l^2 L^T L) x = A^T b") {
    const double lambda = 0.1;
    const Vector x = tikhonov_solution(f, b, lambda);
    const Matrix N = A.transpose() * A + lambda * lambda * L.transpose() * L;
    const Vector ref = N.ldlt().solve(A.transpose() * b);
    CHECK((x - ref).norm() <= 1e-8 * ref.norm());
  }
  SUBCASE("heavy damping kills the seminorm") {
    const Vector x = tikhonov_solution(f, b, 1e8);
    CHECK((L * x).norm() <= 1e-6);
  }
}

TEST_CASE("tgsvd truncation") {
  const Matrix A = random_matrix(24, 24, 61) + 2.0 * Matrix::Identity(24, 24);
  const Matrix L = LinearMap::first_diff_1d(24).to_dense();
  const GsvdFactors f = gsvd(A, L);
  const Vector b = random_vector(24, 62);

  SUBCASE("k = 0 is exactly the null-space term") {
    CHECK((tgsvd_solution(f, b, 0) - null_space_term(f, b)).norm() == 0.0);
  }
  SUBCASE("residual is nonincreasing in k") {
    double prev = std::numeric_limits<double>::infinity();
    for (Index k = 0; k <= f.paired_count(); ++k) {
      const double res = (A * tgsvd_solution(f, b, k) - b).norm();
      CHECK(res <= prev + 1e-10);
      prev = res;
    }
  }
  SUBCASE("out of range raises") {
    CHECK_THROWS_AS(tgsvd_solution(f, b, f.paired_count() + 1), std::invalid_argument);
    CHECK_THROWS_AS(tgsvd_solution(f, b, -1), std::invalid_argument);
  }
}

TEST_CASE("filter factors") {
  SUBCASE("a matching ritz value forces f = 1") {
    const auto f = filter_factors({0.9, 0.5, 0.1}, {0.9, 0.3});
    CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("c = 0 forces f = 0") {
    const auto f = filter_factors({0.0}, {0.9, 0.3});
    CHECK(f[0] == 0.0);
  }
  SUBCASE("invalid ritz values raise") {
    CHECK_THROWS_AS(filter_factors({0.5}, {0.0, 0.3}), std::invalid_argument);
    CHECK_THROWS_AS(filter_factors({0.5}, {0.3, 0.3}), std::invalid_argument);
  }
}

TEST_CASE("rank-deficient stacked pair raises") {
  // Common null vector (1, 1, 1).
  Matrix A(4, 3);
  A << 1, -1, 0, 0, 1, -1, 2, -1, -1, 0, 0, 0;
  const Matrix L = LinearMap::first_diff_1d(3).to_dense();
  CHECK_THROWS_AS(gsvd(A, L), std::runtime_error);
  CHECK_THROWS_AS(gsvd(Matrix(random_matrix(3, 5, 63)), Matrix(random_matrix(5, 5, 64))),
                  std::invalid_argument);  // m < n
}

TEST_CASE("picard coefficients expose the noise plateau") {
  const GeneratedSystem sys = gen_shaw(64);
  const auto noisy = add_noise(sys.b_true, 1e-2, 71);
  const Matrix L = LinearMap::first_diff_1d(64).to_dense();
  const GsvdFactors f = gsvd(sys.A.to_dense(), L);
  const Vector coeffs = picard_coefficients(f, noisy.b);
  REQUIRE(coeffs.size() == 63);
  // Head decays above the noise floor; the tail stagnates near it.
  const double head = coeffs.head(3).maxCoeff();
  double tail_max = coeffs.tail(20).maxCoeff();
  double tail_min = coeffs.tail(20).minCoeff();
  const double level = 1e-2 * sys.b_true.norm() / std::sqrt(64.0);
  CHECK(head > 20.0 * level);
  CHECK(tail_max <= 50.0 * level);
  CHECK(tail_min >= level / 50.0);
}

TEST_SUITE_END();
