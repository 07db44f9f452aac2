#include "illposed/jbdqr.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "illposed/io.hpp"
#include "illposed/param_choice.hpp"
#include "illposed/projected_ls.hpp"

namespace illposed {

namespace {

constexpr double kResidualFloor = 1e-10;  // relative to ||b||

}  // namespace

const char* stop_rule_name(StopRule rule) {
  switch (rule) {
    case StopRule::lcurve: return "lcurve";
    case StopRule::discrepancy: return "discrepancy";
    case StopRule::oracle_best: return "oracle_best";
    case StopRule::max_iter: return "max_iter";
  }
  return "unknown";
}

std::optional<int> SolveLog::best_k() const {
  std::optional<int> best;
  double best_err = 0.0;
  for (const SolveEntry& e : entries) {
    if (!e.rel_err_L) continue;
    if (!best || *e.rel_err_L < best_err) {
      best = e.k;
      best_err = *e.rel_err_L;
    }
  }
  return best;
}

std::optional<double> SolveLog::best_rel_err_L() const {
  std::optional<double> best;
  for (const SolveEntry& e : entries) {
    if (!e.rel_err_L) continue;
    if (!best || *e.rel_err_L < *best) best = *e.rel_err_L;
  }
  return best;
}

void write_solve_log_csv(std::ostream& os, const SolveLog& log) {
  const bool with_mu =
      std::any_of(log.entries.begin(), log.entries.end(),
                  [](const SolveEntry& e) { return e.mu.has_value(); });
  os << "k,residual_norm,seminorm,rel_err_L,rel_err_plain";
  if (with_mu) os << ",mu_k";
  os << '\n';
  for (const SolveEntry& e : log.entries) {
    os << e.k << ',' << format_double(e.residual_norm) << ',' << format_double(e.seminorm) << ',';
    if (e.rel_err_L) os << format_double(*e.rel_err_L);
    os << ',';
    if (e.rel_err_plain) os << format_double(*e.rel_err_plain);
    if (with_mu) {
      os << ',';
      if (e.mu) os << format_double(*e.mu);
    }
    os << '\n';
  }
}

RelativeErrors relative_errors(const LinearMap& L, const Vector& x, const Vector& x_true) {
  if (x.size() != x_true.size() || x.size() != L.cols()) {
    throw std::invalid_argument("relative_errors: dimension mismatch");
  }
  RelativeErrors out;
  const double denom_plain = x_true.norm();
  out.rel_err_plain = denom_plain > 0.0 ? (x - x_true).norm() / denom_plain : (x - x_true).norm();
  const double denom_L = L.apply(x_true).norm();
  if (denom_L > 0.0) {
    out.rel_err_L = L.apply(x - x_true).norm() / denom_L;
  }
  return out;
}

LsqrReport recover_solution(const JbdState& state, const Vector& y) {
  if (y.size() < 1 || y.size() > static_cast<Index>(state.Vtil.size())) {
    throw std::invalid_argument("recover_solution: y length out of range");
  }
  Vector rhs = Vector::Zero(state.m + state.p);
  for (Index j = 0; j < y.size(); ++j) rhs += y[j] * state.Vtil[j];
  if (rhs.norm() == 0.0) {
    LsqrReport report;
    report.solution = Vector::Zero(state.n);
    report.converged = true;
    return report;
  }
  return lsqr_solve(state.stacked, rhs, state.inner_tol);
}

RunResult jbdqr_run(const ProblemInstance& problem, const JbdqrOptions& opts) {
  const Index n = problem.n();
  const Index p = problem.p();
  const Index limit = std::min(n, p);
  const Index max_k = opts.max_k > 0 ? std::min(opts.max_k, limit) : std::min<Index>(limit, 600);

  if (opts.rule == StopRule::discrepancy && !problem.e) {
    throw std::invalid_argument("jbdqr_run: the discrepancy rule needs the instance noise norm");
  }
  if (opts.rule == StopRule::oracle_best && !problem.x_true) {
    throw std::invalid_argument("jbdqr_run: oracle_best needs x_true");
  }
  const double noise_norm = problem.e ? problem.e->norm() : 0.0;
  const bool track = opts.track_errors && problem.x_true.has_value();

  RunResult result{SolveLog{}, Vector::Zero(n),
                   jbd_init(problem.A, problem.L, problem.b, opts.inner_tol, opts.reorth)};
  JbdState& state = result.state;
  SolveLog& log = result.log;

  const double beta1 = state.beta[0];
  QrUpdateState qr(beta1);
  std::vector<Vector> ys;
  ys.reserve(max_k);

  for (Index k = 1; k <= max_k; ++k) {
    const bool ok = jbd_step(state);
    if (!ok) log.breakdown_at = state.breakdown_at;
    // After a breakdown the current column may still be completable from the
    // recorded coefficients (lucky termination).
    if (static_cast<Index>(state.alpha.size()) < k ||
        static_cast<Index>(state.beta.size()) < k + 1 ||
        static_cast<Index>(state.alphahat.size()) < k ||
        static_cast<Index>(state.Zeta.size()) < k) {
      break;
    }

    qr.push(state.alpha[k - 1], state.beta[k]);
    Vector y = qr.solve_y();
    SolveEntry entry;
    entry.k = static_cast<int>(k);
    entry.residual_norm = qr.residual_norm();
    entry.seminorm = seminorm(bidiag_Bbar(state, k), y);
    if (track) {
      const Vector x = combine_preimages(state, y);
      const RelativeErrors err = relative_errors(problem.L, x, *problem.x_true);
      entry.rel_err_L = err.rel_err_L;
      entry.rel_err_plain = err.rel_err_plain;
    }
    log.entries.push_back(entry);
    ys.push_back(std::move(y));

    if (!ok) break;
    if (opts.rule == StopRule::discrepancy && entry.residual_norm <= opts.tau * noise_norm) {
      log.chosen_k = entry.k;
      log.chosen_rule = StopRule::discrepancy;
      break;
    }
    if (entry.residual_norm <= kResidualFloor * beta1) {
      log.residual_floor_hit = true;
      break;
    }
  }

  if (log.entries.empty()) {
    throw std::runtime_error("jbdqr_run: no completed steps (breakdown at the first step)");
  }

  if (!log.chosen_k) {
    switch (opts.rule) {
      case StopRule::oracle_best:
        log.chosen_k = log.best_k();
        if (log.chosen_k) log.chosen_rule = StopRule::oracle_best;
        break;
      case StopRule::lcurve: {
        LCurvePoints points;
        for (const SolveEntry& e : log.entries) {
          points.ks.push_back(e.k);
          points.log_res.push_back(std::log(std::max(e.residual_norm, 1e-300)));
          points.log_semi.push_back(std::log(std::max(e.seminorm, 1e-300)));
        }
        if (points.ks.size() >= 3) {
          try {
            log.chosen_k = lcurve_corner(points);
            log.chosen_rule = StopRule::lcurve;
          } catch (const std::runtime_error&) {
            log.corner_found = false;
          }
        } else {
          log.corner_found = false;
        }
        break;
      }
      case StopRule::discrepancy:
      case StopRule::max_iter:
        break;
    }
  }

  const Index final_k = log.chosen_k ? static_cast<Index>(*log.chosen_k)
                                     : static_cast<Index>(log.entries.back().k);
  result.solution = combine_preimages(state, ys[final_k - 1]);
  return result;
}

}  // namespace illposed
