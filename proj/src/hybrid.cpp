#include "illposed/hybrid.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "illposed/gsvd.hpp"

namespace illposed {

namespace {

Vector rhs_e1(Index k, double beta1) {
  Vector rhs = Vector::Zero(k + 1);
  rhs[0] = beta1;
  return rhs;
}

struct GcvObjective {
  const ProjectedGsvd& g;
  Index k;
  double omega;

  double operator()(double mu) const {
    const double mu2 = mu * mu;
    double num = g.d[k] * g.d[k];
    double trace = 0.0;
    for (Index i = 0; i < k; ++i) {
      const double c2 = g.c[i] * g.c[i];
      const double s2 = g.s[i] * g.s[i];
      const double t = c2 + mu2 * s2;
      const double phi = t > 0.0 ? c2 / t : 1.0;
      trace += phi;
      const double miss = (1.0 - phi) * g.d[i];
      num += miss * miss;
    }
    const double den = static_cast<double>(k + 1) - omega * trace;
    return num / (den * den);
  }
};

GcvChoice choose_by_gcv(const ProjectedPair& pair, double omega) {
  if (!(omega > 0.0) || omega > 1.0) {
    throw std::invalid_argument("wgcv weight must lie in (0, 1]");
  }
  const ProjectedGsvd g = projected_gsvd(pair);
  const Index k = pair.k();

  double gamma_max = 0.0;
  for (double v : g.gamma) gamma_max = std::max(gamma_max, v);
  GcvChoice choice;
  if (gamma_max == 0.0) {
    choice.mu = 1.0;
    choice.flat = true;
    return choice;
  }
  const double lo = 1e-10 * gamma_max;
  const double hi = 1e4 * gamma_max;
  const GcvObjective f{g, k, omega};

  // Coarse scan to bracket the global basin, golden section inside it.
  constexpr int kScan = 512;
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  int best = 0;
  double best_val = f(lo);
  double min_val = best_val;
  double max_val = best_val;
  for (int i = 1; i < kScan; ++i) {
    const double mu = std::exp(log_lo + (log_hi - log_lo) * i / (kScan - 1));
    const double val = f(mu);
    min_val = std::min(min_val, val);
    max_val = std::max(max_val, val);
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }
  if (max_val - min_val <= 1e-14 * std::max(max_val, 1e-300)) {
    choice.mu = hi;
    choice.flat = true;
    return choice;
  }

  const double step = (log_hi - log_lo) / (kScan - 1);
  double a = log_lo + step * std::max(0, best - 1);
  double b = log_lo + step * std::min(kScan - 1, best + 1);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(std::exp(x1));
  double f2 = f(std::exp(x2));
  while (b - a > 1e-4) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(std::exp(x2));
    }
  }
  choice.mu = std::exp((a + b) / 2.0);
  return choice;
}

}  // namespace

Vector projected_tikhonov(const ProjectedPair& pair, double mu) {
  if (mu < 0.0) throw std::invalid_argument("projected_tikhonov: mu must be nonnegative");
  const Index k = pair.k();
  if (pair.Bbar.order() != k) throw std::invalid_argument("projected_tikhonov: order mismatch");
  Matrix stacked = Matrix::Zero(2 * k + 1, k);
  stacked.topRows(k + 1) = pair.B.to_dense();
  stacked.bottomRows(k) = mu * pair.Bbar.to_dense();
  Vector rhs = Vector::Zero(2 * k + 1);
  rhs[0] = pair.beta1;
  Eigen::ColPivHouseholderQR<Matrix> qr(stacked);
  if (qr.rank() < k) {
    throw std::runtime_error("projected_tikhonov: stacked system is rank deficient");
  }
  return qr.solve(rhs);
}

ProjectedPair make_projected_pair(const JbdState& state, Index k) {
  ProjectedPair pair;
  pair.beta1 = state.beta[0];
  pair.B = bidiag_B(state, k);
  pair.Bbar = bidiag_Bbar(state, k);
  return pair;
}

ProjectedGsvd projected_gsvd(const ProjectedPair& pair) {
  const Index k = pair.k();
  if (k < 1) throw std::invalid_argument("projected_gsvd: k must be >= 1");
  const GsvdFactors f = gsvd(pair.B.to_dense(), pair.Bbar.to_dense(), GsvdOrdering::decreasing_c);
  ProjectedGsvd out;
  out.c.resize(k);
  out.s.resize(k);
  out.d = f.P_A.transpose() * rhs_e1(k, pair.beta1);
  for (Index i = 0; i < k; ++i) {
    out.c[i] = f.c[i];
    out.s[i] = f.s[i];
    if (f.s[i] > 0.0) out.gamma.push_back(f.c[i] / f.s[i]);
  }
  return out;
}

GcvChoice gcv_choose(const ProjectedPair& pair) { return choose_by_gcv(pair, 1.0); }

GcvChoice wgcv_choose(const ProjectedPair& pair, double omega) {
  return choose_by_gcv(pair, omega);
}

double estimate_wgcv_weight(const ProjectedPair& pair) {
  const ProjectedGsvd g = projected_gsvd(pair);
  const Index k = pair.k();
  double gamma_min = 0.0;
  for (double v : g.gamma) gamma_min = gamma_min == 0.0 ? v : std::min(gamma_min, v);
  if (gamma_min == 0.0) return 1.0;
  const double mu = gamma_min;
  const double mu2 = mu * mu;

  // Stationarity of the weighted objective at mu = gamma_min:
  // omega = N'(k+1) / (N'T - 2NT') with N the residual term, T the filter
  // trace and ' the mu derivative.
  double N = g.d[k] * g.d[k];
  double Np = 0.0;
  double T = 0.0;
  double Tp = 0.0;
  for (Index i = 0; i < k; ++i) {
    const double c2 = g.c[i] * g.c[i];
    const double s2 = g.s[i] * g.s[i];
    const double t = c2 + mu2 * s2;
    if (t <= 0.0) continue;
    const double phi = c2 / t;
    const double one_minus = mu2 * s2 / t;
    const double d2 = g.d[i] * g.d[i];
    N += d2 * one_minus * one_minus;
    Np += d2 * 2.0 * one_minus * (2.0 * mu * s2 * c2 / (t * t));
    T += phi;
    Tp += -2.0 * mu * s2 * c2 / (t * t);
  }
  const double denom = Np * T - 2.0 * N * Tp;
  if (denom <= 0.0 || Np <= 0.0) return 1.0;
  const double omega = Np * static_cast<double>(k + 1) / denom;
  return std::clamp(omega, 1e-3, 1.0);
}

RunResult hybrid_run(const ProblemInstance& problem, const HybridOptions& opts) {
  const Index n = problem.n();
  const Index p = problem.p();
  const Index limit = std::min(n, p);
  const Index max_k = opts.max_k > 0 ? std::min(opts.max_k, limit) : std::min<Index>(limit, 600);
  const bool track = opts.track_errors && problem.x_true.has_value();

  RunResult result{SolveLog{}, Vector::Zero(n),
                   jbd_init(problem.A, problem.L, problem.b, opts.inner_tol, opts.reorth)};
  JbdState& state = result.state;
  SolveLog& log = result.log;
  const double beta1 = state.beta[0];

  std::vector<Vector> ys;
  ys.reserve(max_k);
  double omega_sum = 0.0;

  for (Index k = 1; k <= max_k; ++k) {
    const bool ok = jbd_step(state);
    if (!ok) log.breakdown_at = state.breakdown_at;
    if (static_cast<Index>(state.alpha.size()) < k ||
        static_cast<Index>(state.beta.size()) < k + 1 ||
        static_cast<Index>(state.alphahat.size()) < k ||
        static_cast<Index>(state.Zeta.size()) < k) {
      break;
    }

    const ProjectedPair pair = make_projected_pair(state, k);

    double mu = 0.0;
    if (opts.fixed_mu) {
      mu = *opts.fixed_mu;
    } else if (opts.choice == HybridChoice::gcv) {
      mu = gcv_choose(pair).mu;
    } else if (opts.omega) {
      mu = wgcv_choose(pair, *opts.omega).mu;
    } else {
      omega_sum += estimate_wgcv_weight(pair);
      mu = wgcv_choose(pair, omega_sum / static_cast<double>(k)).mu;
    }

    Vector y = projected_tikhonov(pair, mu);
    SolveEntry entry;
    entry.k = static_cast<int>(k);
    entry.mu = mu;
    entry.residual_norm = (pair.B.apply(y) - rhs_e1(k, beta1)).norm();
    entry.seminorm = seminorm(pair.Bbar, y);
    if (track) {
      const Vector x = combine_preimages(state, y);
      const RelativeErrors err = relative_errors(problem.L, x, *problem.x_true);
      entry.rel_err_L = err.rel_err_L;
      entry.rel_err_plain = err.rel_err_plain;
    }
    log.entries.push_back(entry);
    ys.push_back(std::move(y));
    if (!ok) break;
  }

  if (log.entries.empty()) {
    throw std::runtime_error("hybrid_run: no completed steps (breakdown at the first step)");
  }

  log.chosen_k = log.best_k();
  log.chosen_rule = log.chosen_k ? StopRule::oracle_best : StopRule::max_iter;
  const Index final_k = log.chosen_k ? static_cast<Index>(*log.chosen_k)
                                     : static_cast<Index>(log.entries.back().k);
  result.solution = combine_preimages(state, ys[final_k - 1]);
  return result;
}

}  // namespace illposed
