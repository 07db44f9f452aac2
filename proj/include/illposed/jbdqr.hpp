#ifndef ILLPOSED_JBDQR_HPP
#define ILLPOSED_JBDQR_HPP

#include <iosfwd>
#include <optional>
#include <vector>

#include "illposed/jbd.hpp"
#include "illposed/lsqr.hpp"
#include "illposed/problems.hpp"

namespace illposed {

enum class StopRule { lcurve, discrepancy, oracle_best, max_iter };

const char* stop_rule_name(StopRule rule);

struct SolveEntry {
  int k = 0;
  double residual_norm = 0.0;  // ||A x_k - b|| via the projected identity
  double seminorm = 0.0;       // ||L x_k|| via the projected identity
  std::optional<double> rel_err_L;
  std::optional<double> rel_err_plain;
  std::optional<double> mu;  // per-step regularization parameter (hybrid only)
};

/// Per-iteration record of a solver run plus the stopping outcome.
struct SolveLog {
  std::vector<SolveEntry> entries;
  std::optional<int> chosen_k;
  StopRule chosen_rule = StopRule::max_iter;
  std::optional<Index> breakdown_at;
  bool corner_found = true;        // false when the L-curve had no corner
  bool residual_floor_hit = false;  // residual fell to the consistency floor

  /// k attaining the smallest rel_err_L, when true errors were logged.
  std::optional<int> best_k() const;
  std::optional<double> best_rel_err_L() const;
};

/// CSV with header k,residual_norm,seminorm,rel_err_L,rel_err_plain and an
/// extra mu_k column when any entry carries one. Numbers are printed in
/// shortest round-trip form, so identical runs serialize identically.
void write_solve_log_csv(std::ostream& os, const SolveLog& log);

struct JbdqrOptions {
  Index max_k = 0;  // 0 means min(n, p, 600)
  double inner_tol = 1e-6;
  Reorth reorth = Reorth::full;
  StopRule rule = StopRule::lcurve;
  double tau = 1.1;  // discrepancy threshold factor
  // Compute x_k (hence true errors) at every step even without a rule that
  // needs them; on by default when x_true is available.
  bool track_errors = true;
};

struct RunResult {
  SolveLog log;
  Vector solution;
  JbdState state;
};

/// The iterative regularization run: advance the joint bidiagonalization,
/// solve the projected least squares problem min ||B_k y - beta_1 e_1|| by
/// the updated QR factorization, log the residual norm and seminorm from the
/// projected quantities, and stop per the configured rule. The returned
/// solution is the iterate at the chosen step (or at the last step when the
/// rule selected none). The discrepancy rule needs the instance noise norm;
/// oracle_best needs x_true.
RunResult jbdqr_run(const ProblemInstance& problem, const JbdqrOptions& opts = {});

/// Recovers x from the projected coordinates by solving the consistent
/// system (A; L) x = Vtil_k y with the inner least squares solver.
/// A non-convergence flag from the solver is passed through.
LsqrReport recover_solution(const JbdState& state, const Vector& y);

struct RelativeErrors {
  std::optional<double> rel_err_L;  // absent when ||L x_true|| = 0
  double rel_err_plain = 0.0;
};

/// ||L (x - x_true)|| / ||L x_true|| and ||x - x_true|| / ||x_true||.
RelativeErrors relative_errors(const LinearMap& L, const Vector& x, const Vector& x_true);

}  // namespace illposed

#endif
