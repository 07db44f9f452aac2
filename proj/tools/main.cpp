#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "illposed/runner.hpp"

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("ILLPOSED_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

// Binds the shared problem/solver flags of a subcommand onto a RunConfig.
void add_config_options(CLI::App* cmd, illposed::RunConfig& config, std::string& omega_spec) {
  cmd->add_option("--problem", config.problem, "shaw | baart | heat | deriv2 | blur");
  cmd->add_option("--n", config.n, "1d problem size (0 = problem default)");
  cmd->add_option("--example", config.example, "deriv2 right-hand side family (1|2|3)");
  cmd->add_option("--grid", config.grid, "blur image side N");
  cmd->add_option("--band", config.band, "blur half-bandwidth");
  cmd->add_option("--sigma", config.sigma, "blur PSF width");
  cmd->add_option("--eps", config.eps, "relative noise level");
  cmd->add_option("--seed", config.seed, "noise seed (default from ILLPOSED_SEED)");
  cmd->add_option("--L", config.regularizer, "regularizer: first-diff | identity");
  cmd->add_option("--solver", config.solver,
                  "jbdqr | hybrid_gcv | hybrid_wgcv | tgsvd | tikhonov");
  cmd->add_option("--rule", config.rule, "lcurve | discrepancy | oracle-best");
  cmd->add_option("--tau", config.tau, "discrepancy threshold factor");
  cmd->add_option("--max-k", config.max_k, "outer iteration cap (0 = min(n,p,600))");
  cmd->add_option("--inner-tol", config.inner_tol, "inner least squares tolerance");
  cmd->add_option("--reorth", config.reorth, "full | one | none");
  cmd->add_option("--wgcv-omega", omega_spec, "WGCV weight in (0,1] or 'adaptive'");
  cmd->add_option("--out", config.output_dir, "output directory for run artifacts");
}

void finish_config(illposed::RunConfig& config, const std::string& omega_spec) {
  if (omega_spec.empty()) return;
  if (omega_spec == "adaptive") {
    config.wgcv_omega.reset();
  } else {
    config.wgcv_omega = std::stod(omega_spec);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative solvers for discrete ill-posed problems in general-form regularization"};
  app.require_subcommand(1);

  illposed::RunConfig config;
  config.seed = default_seed();
  std::string config_file;
  std::string omega_spec;

  // Load a config file before flag parsing so explicit flags override it.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        config = illposed::config_from_json_file(argv[i + 1], config);
      } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
      }
      break;
    }
  }

  // solve: one run, artifacts on disk.
  CLI::App* solve = app.add_subcommand("solve", "Generate a problem, run a solver, write logs");
  solve->add_option("--config", config_file, "JSON config file; explicit flags override it");
  add_config_options(solve, config, omega_spec);

  // gen: emit a problem as a directory of plain-text files.
  CLI::App* gen = app.add_subcommand("gen", "Write a generated problem to disk");
  std::string gen_out;
  gen->add_option("--config", config_file, "JSON config file; explicit flags override it");
  add_config_options(gen, config, omega_spec);
  gen->add_option("--gen-out", gen_out, "problem directory to create")->required();

  // compare: cartesian sweep with a summary table.
  CLI::App* cmp = app.add_subcommand("compare", "Run several solvers across problems and seeds");
  std::string cmp_problems = "shaw,deriv2";
  std::string cmp_solvers = "jbdqr,hybrid_gcv";
  int cmp_seeds = 3;
  int cmp_jobs = 1;
  std::string cmp_out;
  cmp->add_option("--problems", cmp_problems, "comma-separated problem list");
  cmp->add_option("--solvers", cmp_solvers, "comma-separated solver list");
  cmp->add_option("--seeds", cmp_seeds, "number of seeds (0, 1, ...)");
  cmp->add_option("--jobs", cmp_jobs, "concurrent runs");
  cmp->add_option("--run-root", cmp_out, "root directory for per-run artifacts");
  add_config_options(cmp, config, omega_spec);

  // report: aggregate run directories.
  CLI::App* rep = app.add_subcommand("report", "Aggregate summary.json files into one CSV");
  std::vector<std::string> rep_dirs;
  rep->add_option("dirs", rep_dirs, "run directories")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    finish_config(config, omega_spec);

    if (solve->parsed()) {
      const illposed::RunSummary summary = illposed::run(config);
      std::cout << summary.to_json();
      return 0;
    }
    if (gen->parsed()) {
      illposed::export_problem(gen_out, illposed::build_problem(config));
      std::cout << "wrote problem to " << gen_out << "\n";
      return 0;
    }
    if (cmp->parsed()) {
      auto split = [](const std::string& csv) {
        std::vector<std::string> out;
        std::stringstream ss(csv);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (!item.empty()) out.push_back(item);
        }
        return out;
      };
      illposed::compare(split(cmp_problems), split(cmp_solvers), config.eps, cmp_seeds, config,
                        cmp_out, std::cout, cmp_jobs);
      return 0;
    }
    if (rep->parsed()) {
      illposed::report(rep_dirs, std::cout, std::cerr);
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
