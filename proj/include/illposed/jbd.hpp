#ifndef ILLPOSED_JBD_HPP
#define ILLPOSED_JBD_HPP

#include <iosfwd>
#include <optional>
#include <vector>

#include "illposed/linop.hpp"
#include "illposed/projected_ls.hpp"

namespace illposed {

enum class Reorth { none, one_step, full };

/// State of the joint bidiagonalization of {A, L} driven by b.
///
/// After k completed steps the state holds the orthonormal columns
/// u_1..u_{k+1} (length m), uhat_1..uhat_{k+1} (length p) and
/// vtil_1..vtil_{k+1} (length m+p), together with the recurrence
/// coefficients alpha_1..alpha_{k+1}, beta_1..beta_{k+1},
/// alphahat_1..alphahat_{k+1} and betahat_1..betahat_k. Each projection onto
/// the column space of the stacked pair is realized by an inner least
/// squares solve; zeta_1..zeta_{k+1} are the preimages of the vtil columns
/// under the stacked operator, so that solution recovery needs no further
/// inner solves.
///
/// A state is single owner: only jbd_step mutates it. Independent states
/// over shared operators are safe to advance concurrently.
struct JbdState {
  LinearMap stacked;  // (A; L)
  Index m = 0;
  Index n = 0;
  Index p = 0;
  double inner_tol = 1e-6;
  Reorth reorth = Reorth::full;

  std::vector<Vector> U;     // k+1 columns, length m
  std::vector<Vector> Uhat;  // k+1 columns, length p
  std::vector<Vector> Vtil;  // k+1 columns, length m+p
  std::vector<Vector> Zeta;  // k+1 columns, length n; stacked * zeta_i == vtil_i

  std::vector<double> alpha;     // alpha_1..alpha_{k+1}
  std::vector<double> beta;      // beta_1..beta_{k+1}
  std::vector<double> alphahat;  // alphahat_1..alphahat_{k+1}
  std::vector<double> betahat;   // betahat_1..betahat_k

  Index k = 0;
  std::optional<Index> breakdown_at;  // step index of a detected breakdown

  bool broke_down() const { return breakdown_at.has_value(); }
};

/// Initializes the process: beta_1 u_1 = b, then one projection gives
/// vtil_1, alpha_1 and the first hat quantities. Throws on b = 0; a
/// vanishing alpha_1 or alphahat_1 marks a breakdown at step 0.
JbdState jbd_init(const LinearMap& A, const LinearMap& L, const Vector& b,
                  double inner_tol = 1e-6, Reorth reorth = Reorth::full);

/// Advances the factorization by one step (k -> k+1). Returns false and
/// records breakdown_at when a normalization coefficient falls below the
/// scale-aware threshold; the caller may treat that as lucky termination.
/// Requires no prior breakdown and k+1 <= min(n, p).
bool jbd_step(JbdState& state);

/// Leading (k+1) x k lower bidiagonal coefficient view (alpha_i, beta_{i+1}).
/// The explicit-k overloads read the raw coefficient arrays, which stay
/// usable for the final column after a breakdown.
LowerBidiag bidiag_B(const JbdState& state);
LowerBidiag bidiag_B(const JbdState& state, Index k);

/// Leading k x k upper bidiagonal view of Bbar = Bhat D with
/// D = diag(1, -1, 1, ...), the matrix satisfying L Z_k = Uhat_k Bbar_k.
/// Diagonal magnitudes are alphahat_1..alphahat_k.
UpperBidiag bidiag_Bbar(const JbdState& state);
UpperBidiag bidiag_Bbar(const JbdState& state, Index k);

/// x = Z_k y via the maintained preimages; (A; L) x = Vtil_k y holds by
/// construction.
Vector combine_preimages(const JbdState& state, const Vector& y);

/// Per-step coefficient dump, one CSV row per index (debugging aid).
void write_coefficients_csv(std::ostream& os, const JbdState& state);

}  // namespace illposed

#endif
