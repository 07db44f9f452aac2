#ifndef ILLPOSED_RUNNER_HPP
#define ILLPOSED_RUNNER_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "illposed/jbdqr.hpp"
#include "illposed/problems.hpp"

namespace illposed {

/// One experiment: a problem, a solver, a stopping rule and output location.
struct RunConfig {
  std::string problem = "shaw";  // shaw | baart | heat | deriv2 | blur
  Index n = 0;                   // 1d size; 0 selects the problem default
  int example = 2;               // deriv2 right-hand side family
  Index grid = 128;              // blur image side
  Index band = 16;               // blur half-bandwidth
  double sigma = 2.0;            // blur PSF width
  double eps = 1e-2;
  std::uint64_t seed = 0;
  std::string regularizer = "first-diff";  // first-diff | identity
  std::string solver = "jbdqr";  // jbdqr | hybrid_gcv | hybrid_wgcv | tgsvd | tikhonov
  std::string rule = "lcurve";   // lcurve | discrepancy | oracle-best
  double tau = 1.1;
  Index max_k = 0;  // 0 selects min(n, p, 600)
  double inner_tol = 1e-6;
  std::string reorth = "full";  // full | one | none
  std::optional<double> wgcv_omega = 0.8;  // unset selects the adaptive weight
  std::string output_dir;       // empty: no artifacts written
};

/// Flat result record; serialized as summary.json.
struct RunSummary {
  std::string problem;
  std::string solver;
  std::string rule;
  double eps = 0.0;
  std::uint64_t seed = 0;
  Index n = 0;
  std::optional<int> chosen_k;
  std::optional<double> chosen_rel_err_L;
  std::optional<double> residual_at_chosen;
  std::optional<int> best_k;
  std::optional<double> best_rel_err_L;
  std::optional<Index> breakdown_at;
  std::optional<double> chosen_lambda;  // tikhonov solver only
  bool corner_found = true;
  bool noise_free_convergence = false;
  double wall_time_s = 0.0;

  std::string to_json() const;
};

/// Loads config fields from a JSON file over the given defaults; fields the
/// file does not mention keep their current values. Flags parsed afterwards
/// override file entries.
RunConfig config_from_json_file(const std::string& path, RunConfig base = {});

/// Applies a stopping rule to a finished log (corner search, discrepancy
/// scan, or best true error). Used by the solvers that run to max_k first.
void apply_rule_post(SolveLog& log, StopRule rule, double tau, std::optional<double> noise_norm);

/// Builds the problem instance a config describes.
ProblemInstance build_problem(const RunConfig& config);

/// Executes one configuration; writes log.csv, summary.json, solution.txt
/// (and PGM images for 2d problems) under output_dir when set.
RunSummary run(const RunConfig& config);

/// Aggregates summary.json files from run directories into one CSV keyed and
/// ordered by (problem, eps, solver, seed). Malformed summaries are skipped
/// with a warning on the provided stream.
void report(const std::vector<std::string>& dirs, std::ostream& out, std::ostream& warnings);

/// Runs the cartesian product problems x solvers x seeds at one noise level,
/// writing per-run directories under output_root, and emits a comparison
/// table (CSV) on out. jobs > 1 runs configurations concurrently.
void compare(const std::vector<std::string>& problems, const std::vector<std::string>& solvers,
             double eps, int seeds, const RunConfig& base, const std::string& output_root,
             std::ostream& out, int jobs = 1);

/// Problem directory exchange format: plain-text matrices/sequences plus
/// meta.json.
void export_problem(const std::string& dir, const ProblemInstance& instance);
ProblemInstance import_problem(const std::string& dir);

}  // namespace illposed

#endif
