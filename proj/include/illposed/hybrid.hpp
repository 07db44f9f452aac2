#ifndef ILLPOSED_HYBRID_HPP
#define ILLPOSED_HYBRID_HPP

#include <optional>
#include <vector>

#include "illposed/jbdqr.hpp"
#include "illposed/projected_ls.hpp"

namespace illposed {

/// The small projected pair {B_k, Bbar_k} with the data scale beta1.
struct ProjectedPair {
  LowerBidiag B;
  UpperBidiag Bbar;
  double beta1 = 0.0;

  Index k() const { return B.order(); }
};

/// Solves the projected Tikhonov problem
/// min ||B y - beta1 e_1||^2 + mu^2 ||Bbar y||^2 through a dense QR of the
/// stacked matrix (B; mu Bbar). mu = 0 requires B of full column rank.
Vector projected_tikhonov(const ProjectedPair& pair, double mu);

/// Generalized singular pairs of the projected matrices and the rotated data
/// coefficients, the ingredients of the GCV objective. Entry i of (c, s)
/// pairs with data coefficient d_i; d has one extra trailing entry for the
/// left direction outside the range of B.
struct ProjectedGsvd {
  std::vector<double> c;
  std::vector<double> s;
  std::vector<double> gamma;  // c_i / s_i for the paired entries
  Vector d;                   // length k+1
};

ProjectedGsvd projected_gsvd(const ProjectedPair& pair);

/// Pair view over the leading k steps of a bidiagonalization state.
ProjectedPair make_projected_pair(const JbdState& state, Index k);

struct GcvChoice {
  double mu = 0.0;
  bool flat = false;  // objective was flat; mu is the upper bracket
};

/// Minimizes GCV(mu) = ||B y_mu - beta1 e_1||^2 / ((k+1) - sum_i phi_i)^2
/// with Tikhonov filters phi_i = gamma_i^2 / (gamma_i^2 + mu^2), evaluated
/// through the projected GSVD. The bracket is [1e-10, 1e4] times the largest
/// generalized value; a coarse scan locates the global basin and golden
/// section refines it to a relative 1e-4 in mu.
GcvChoice gcv_choose(const ProjectedPair& pair);

/// Weighted GCV: the trace term becomes ((k+1) - omega * sum_i phi_i)^2,
/// 0 < omega <= 1.
GcvChoice wgcv_choose(const ProjectedPair& pair, double omega);

/// Stationarity-based per-step weight estimate at the smallest generalized
/// value, clamped to (0, 1]; the adaptive WGCV variant feeds the running
/// mean of these into wgcv_choose.
double estimate_wgcv_weight(const ProjectedPair& pair);

enum class HybridChoice { gcv, wgcv };

struct HybridOptions {
  Index max_k = 0;  // 0 means min(n, p, 600)
  double inner_tol = 1e-6;
  Reorth reorth = Reorth::full;
  HybridChoice choice = HybridChoice::gcv;
  // WGCV weight; unset selects the adaptive running-mean variant.
  std::optional<double> omega = 0.8;
  // Overrides the parameter choice entirely (diagnostics).
  std::optional<double> fixed_mu;
  bool track_errors = true;
};

/// The projected-Tikhonov baseline: same bidiagonalization, but each outer
/// step solves the projected Tikhonov problem with a GCV- or WGCV-chosen
/// mu_k. Runs to max_k and reports the best-error iterate when x_true is
/// known, otherwise the final one. The log carries mu_k per entry.
RunResult hybrid_run(const ProblemInstance& problem, const HybridOptions& opts = {});

}  // namespace illposed

#endif
