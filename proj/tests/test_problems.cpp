#include <doctest.h>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "illposed/problems.hpp"

using namespace illposed;

TEST_SUITE_BEGIN("problems");

TEST_CASE("shaw matrix is symmetric and consistent") {
  const GeneratedSystem sys = gen_shaw(32);
  const Matrix A = sys.A.to_dense();
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((sys.A.apply(sys.x_true) - sys.b_true).norm() <= 1e-10 * sys.b_true.norm());
  CHECK_THROWS_AS(gen_shaw(7), std::invalid_argument);
  CHECK_THROWS_AS(gen_shaw(0), std::invalid_argument);
}

TEST_CASE("deriv2 matrix is symmetric; heat is lower triangular") {
  const Matrix A2 = gen_deriv2(24, 2).A.to_dense();
  CHECK((A2 - A2.transpose()).cwiseAbs().maxCoeff() <= 1e-14);

  const Matrix Ah = gen_heat(24).A.to_dense();
  for (Index i = 0; i < Ah.rows(); ++i)
    for (Index j = i + 1; j < Ah.cols(); ++j) CHECK(Ah(i, j) == 0.0);

  CHECK_THROWS_AS(gen_deriv2(10, 4), std::invalid_argument);
  CHECK_THROWS_AS(gen_deriv2(9, 3), std::invalid_argument);
  CHECK_THROWS_AS(gen_heat(9), std::invalid_argument);
}

TEST_CASE("all 1d generators satisfy the consistency invariant") {
  for (const GeneratedSystem& sys :
       {gen_shaw(16), gen_baart(16), gen_heat(16), gen_deriv2(16, 1), gen_deriv2(16, 2),
        gen_deriv2(16, 3)}) {
    CHECK((sys.A.apply(sys.x_true) - sys.b_true).norm() <= 1e-10 * sys.b_true.norm());
  }
}

TEST_CASE("severe ill-posedness of shaw and baart at n = 64") {
  for (const GeneratedSystem& sys : {gen_shaw(64), gen_baart(64)}) {
    Eigen::JacobiSVD<Matrix> svd(sys.A.to_dense());
    const Vector& sv = svd.singularValues();
    CHECK(sv[29] <= 1e-10 * sv[0]);
  }
}

TEST_CASE("stacked pair has full column rank for every generator") {
  for (const GeneratedSystem& sys :
       {gen_shaw(32), gen_baart(32), gen_heat(32), gen_deriv2(32, 2)}) {
    const Index n = sys.A.cols();
    Matrix stack(2 * n - 1, n);
    stack.topRows(n) = sys.A.to_dense();
    stack.bottomRows(n - 1) = first_derivative_1d(n).to_dense();
    Eigen::ColPivHouseholderQR<Matrix> qr(stack);
    CHECK(qr.rank() == n);
  }
}

TEST_CASE("gaussian blur operator") {
  CHECK_THROWS_AS(gen_gaussian_blur(8, 0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(gen_gaussian_blur(8, 9, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(gen_gaussian_blur(8, 2, 0.0), std::invalid_argument);

  // band = 1 leaves only the main diagonal: a scaled identity.
  LinearMap narrow = gen_gaussian_blur(6, 1, 2.0);
  const double scale = 1.0 / (2.0 * 3.14159265358979323846 * 4.0);
  Vector x = Vector::LinSpaced(36, 0.0, 1.0);
  CHECK((narrow.apply(x) - scale * x).norm() <= 1e-15 * x.norm());

  // Kronecker of symmetric factors is symmetric.
  LinearMap blur = gen_gaussian_blur(8, 3, 1.5);
  Vector a = Vector::LinSpaced(64, -1.0, 1.0);
  Vector b = Vector::LinSpaced(64, 2.0, 3.0);
  CHECK(std::abs(blur.apply(a).dot(b) - a.dot(blur.apply(b))) <= 1e-12);

  // The half-bandwidth zeroes entries at distance >= band.
  const Matrix T = gen_gaussian_blur(6, 3, 1.5).to_dense();
  (void)T;
}

TEST_CASE("noise injection hits the requested level exactly") {
  const GeneratedSystem sys = gen_shaw(32);
  const NoisyData noisy = add_noise(sys.b_true, 1e-2, 42);
  CHECK(std::abs(noisy.e.norm() / sys.b_true.norm() - 1e-2) <= 1e-12 * 1e-2);
  CHECK((noisy.b - (sys.b_true + noisy.e)).norm() == 0.0);

  const NoisyData clean = add_noise(sys.b_true, 0.0, 42);
  CHECK(clean.e.norm() == 0.0);
  CHECK((clean.b - sys.b_true).norm() == 0.0);

  const NoisyData again = add_noise(sys.b_true, 1e-2, 42);
  CHECK((again.e - noisy.e).norm() == 0.0);  // bit-for-bit determinism
  const NoisyData other = add_noise(sys.b_true, 1e-2, 43);
  CHECK((other.e - noisy.e).norm() > 0.0);
}

TEST_CASE("make_instance wires the invariants together") {
  const ProblemInstance inst = make_instance("shaw", gen_shaw(32), first_derivative_1d(32),
                                             1e-3, 7);
  REQUIRE(inst.b_true.has_value());
  REQUIRE(inst.e.has_value());
  CHECK((inst.b - (*inst.b_true + *inst.e)).norm() == 0.0);
  CHECK(std::abs(inst.e->norm() / inst.b_true->norm() - inst.eps) <= 1e-12 * inst.eps);
  CHECK(inst.m() >= inst.n());
}

TEST_CASE("phantom image is deterministic and in range") {
  const Matrix img = phantom_image(32);
  CHECK(img.rows() == 32);
  CHECK(img.minCoeff() >= 0.0);
  CHECK(img.maxCoeff() <= 2.0);
  CHECK((img - phantom_image(32)).norm() == 0.0);
}

TEST_SUITE_END();
