#include <doctest.h>

#include <Eigen/QR>
#include <sstream>

#include "illposed/jbdqr.hpp"
#include "test_support.hpp"

using namespace illposed;

namespace {

ProblemInstance shaw_instance(Index n, double eps, std::uint64_t seed) {
  return make_instance("shaw", gen_shaw(n), first_derivative_1d(n), eps, seed);
}

}  // namespace

TEST_SUITE_BEGIN("jbdqr");

TEST_CASE("relative error helpers") {
  LinearMap L = first_derivative_1d(5);
  Vector xt(5);
  xt << 1, 2, 4, 8, 16;
  SUBCASE("exact solution gives zeros") {
    const RelativeErrors err = relative_errors(L, xt, xt);
    CHECK(err.rel_err_plain == 0.0);
    CHECK(err.rel_err_L.value() == 0.0);
  }
  SUBCASE("doubling gives plain error one") {
    const RelativeErrors err = relative_errors(L, 2 * xt, xt);
    CHECK(err.rel_err_plain == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(err.rel_err_L.value() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("matches direct evaluation") {
    const Vector x = testing::random_vector(5, 3);
    const RelativeErrors err = relative_errors(L, x, xt);
    CHECK(err.rel_err_plain ==
          doctest::Approx((x - xt).norm() / xt.norm()).epsilon(1e-14));
    CHECK(err.rel_err_L.value() ==
          doctest::Approx(L.apply(x - xt).norm() / L.apply(xt).norm()).epsilon(1e-14));
  }
  SUBCASE("constant x_true flags the seminorm") {
    const RelativeErrors err = relative_errors(L, xt, Vector::Ones(5));
    CHECK_FALSE(err.rel_err_L.has_value());
  }
}

TEST_CASE("recovery against the dense least squares oracle") {
  const Index n = 64;
  const ProblemInstance inst = shaw_instance(n, 1e-2, 31);
  JbdqrOptions opts;
  opts.max_k = 6;
  opts.inner_tol = 1e-12;
  opts.rule = StopRule::oracle_best;
  const RunResult res = jbdqr_run(inst, opts);

  // y at the final logged step.
  QrUpdateState qr(res.state.beta[0]);
  for (Index j = 1; j <= 6; ++j) qr.push(res.state.alpha[j - 1], res.state.beta[j]);
  const Vector y = qr.solve_y();

  const LsqrReport rec = recover_solution(res.state, y);
  REQUIRE(rec.converged);

  Matrix stacked(2 * n - 1, n);
  stacked.topRows(n) = inst.A.to_dense();
  stacked.bottomRows(n - 1) = inst.L.to_dense();
  Vector rhs = Vector::Zero(2 * n - 1);
  for (Index j = 0; j < 6; ++j) rhs += y[j] * res.state.Vtil[j];
  const Vector ref = stacked.colPivHouseholderQr().solve(rhs);
  CHECK((rec.solution - ref).norm() <= 1e-6 * ref.norm());

  // The recovery satisfies the stated residual bound.
  CHECK((stacked * rec.solution - rhs).norm() <= 10 * opts.inner_tol * rhs.norm());

  SUBCASE("zero coordinates recover the zero vector") {
    const LsqrReport zero = recover_solution(res.state, Vector::Zero(3));
    CHECK(zero.solution.norm() == 0.0);
  }
}

TEST_CASE("run logs the projected identities") {
  const Index n = 64;
  const ProblemInstance inst = shaw_instance(n, 1e-2, 33);
  JbdqrOptions opts;
  opts.max_k = 8;
  opts.inner_tol = 1e-10;
  opts.rule = StopRule::oracle_best;
  const RunResult res = jbdqr_run(inst, opts);
  REQUIRE(res.log.entries.size() == 8);

  const Matrix Ad = inst.A.to_dense();
  // Entries are ordered with no gaps and the logged residual reproduces
  // ||A x_k - b|| through the recovered iterates.
  QrUpdateState qr(res.state.beta[0]);
  for (Index k = 1; k <= 8; ++k) {
    const SolveEntry& e = res.log.entries[k - 1];
    CHECK(e.k == static_cast<int>(k));
    qr.push(res.state.alpha[k - 1], res.state.beta[k]);
    CHECK(e.residual_norm == qr.residual_norm());
    const Vector x = combine_preimages(res.state, qr.solve_y());
    CHECK(std::abs((Ad * x - inst.b).norm() - e.residual_norm) <= 1e-5 * inst.b.norm());
  }

  // Residuals are nonincreasing.
  for (std::size_t i = 1; i < res.log.entries.size(); ++i) {
    CHECK(res.log.entries[i].residual_norm <=
          res.log.entries[i - 1].residual_norm * (1 + 1e-12));
  }

  // oracle_best picked the smallest logged error.
  REQUIRE(res.log.chosen_k.has_value());
  CHECK(res.log.chosen_k == res.log.best_k());
  CHECK(res.log.chosen_rule == StopRule::oracle_best);
}

TEST_CASE("noise-free run reaches the consistency floor") {
  const ProblemInstance inst = shaw_instance(32, 0.0, 35);
  JbdqrOptions opts;
  opts.max_k = 31;
  opts.inner_tol = 1e-12;
  opts.rule = StopRule::max_iter;
  const RunResult res = jbdqr_run(inst, opts);
  const double floor = res.log.entries.back().residual_norm;
  CHECK(floor <= 1e-8 * inst.b.norm());
  CHECK(static_cast<Index>(res.log.entries.size()) < 31);
  CHECK((res.log.residual_floor_hit || res.log.breakdown_at.has_value()));
}

TEST_CASE("discrepancy rule stops eagerly") {
  const ProblemInstance inst = shaw_instance(64, 1e-2, 37);
  JbdqrOptions opts;
  opts.max_k = 20;
  opts.rule = StopRule::discrepancy;
  opts.tau = 1.1;
  const RunResult res = jbdqr_run(inst, opts);
  REQUIRE(res.log.chosen_k.has_value());
  const int k = *res.log.chosen_k;
  CHECK(static_cast<int>(res.log.entries.size()) == k);  // stopped right there
  const double bound = 1.1 * inst.e->norm();
  CHECK(res.log.entries.back().residual_norm <= bound);
  for (int i = 0; i + 1 < k; ++i) CHECK(res.log.entries[i].residual_norm > bound);

  SUBCASE("missing noise norm is a configuration error") {
    ProblemInstance stripped = inst;
    stripped.e.reset();
    CHECK_THROWS_AS(jbdqr_run(stripped, opts), std::invalid_argument);
  }
}

TEST_CASE("lcurve rule picks an interior corner on a noisy run") {
  const ProblemInstance inst = shaw_instance(64, 1e-2, 39);
  JbdqrOptions opts;
  opts.max_k = 12;
  opts.rule = StopRule::lcurve;
  const RunResult res = jbdqr_run(inst, opts);
  REQUIRE(res.log.chosen_k.has_value());
  CHECK(*res.log.chosen_k >= 1);
  CHECK(*res.log.chosen_k <= 12);
  CHECK(res.log.corner_found);
}

TEST_CASE("csv serialization is deterministic") {
  const ProblemInstance inst = shaw_instance(32, 1e-2, 41);
  JbdqrOptions opts;
  opts.max_k = 5;
  opts.rule = StopRule::oracle_best;
  const RunResult a = jbdqr_run(inst, opts);
  const RunResult b = jbdqr_run(inst, opts);
  std::ostringstream sa, sb;
  write_solve_log_csv(sa, a.log);
  write_solve_log_csv(sb, b.log);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("k,residual_norm,seminorm,rel_err_L,rel_err_plain\n", 0) == 0);
}

TEST_SUITE_END();
