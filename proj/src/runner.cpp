#include "illposed/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "illposed/gsvd.hpp"
#include "illposed/hybrid.hpp"
#include "illposed/io.hpp"
#include "illposed/param_choice.hpp"

namespace illposed {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

StopRule rule_from_string(const std::string& rule) {
  if (rule == "lcurve") return StopRule::lcurve;
  if (rule == "discrepancy") return StopRule::discrepancy;
  if (rule == "oracle-best" || rule == "oracle_best") return StopRule::oracle_best;
  throw std::invalid_argument("unknown rule: " + rule);
}

Reorth reorth_from_string(const std::string& reorth) {
  if (reorth == "full") return Reorth::full;
  if (reorth == "one" || reorth == "one_step") return Reorth::one_step;
  if (reorth == "none") return Reorth::none;
  throw std::invalid_argument("unknown reorthogonalization mode: " + reorth);
}

Index default_size(const std::string& problem) {
  if (problem == "shaw" || problem == "baart") return 1024;
  return 3000;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json optional_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
void load_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

double entry_residual_at(const SolveLog& log, int k) {
  for (const SolveEntry& e : log.entries) {
    if (e.k == k) return e.residual_norm;
  }
  throw std::logic_error("entry_residual_at: no such step");
}

std::optional<double> entry_rel_err_at(const SolveLog& log, int k) {
  for (const SolveEntry& e : log.entries) {
    if (e.k == k) return e.rel_err_L;
  }
  return std::nullopt;
}

Matrix vector_as_image(const Vector& x, Index grid) {
  return Eigen::Map<const Matrix>(x.data(), grid, grid);
}

}  // namespace

RunConfig config_from_json_file(const std::string& path, RunConfig base) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file: " + path);
  json j = json::parse(is);
  load_field(j, "problem", base.problem);
  if (j.contains("n")) base.n = j.at("n").get<long>();
  load_field(j, "example", base.example);
  if (j.contains("grid")) base.grid = j.at("grid").get<long>();
  if (j.contains("band")) base.band = j.at("band").get<long>();
  load_field(j, "sigma", base.sigma);
  load_field(j, "eps", base.eps);
  load_field(j, "seed", base.seed);
  load_field(j, "regularizer", base.regularizer);
  load_field(j, "solver", base.solver);
  load_field(j, "rule", base.rule);
  load_field(j, "tau", base.tau);
  if (j.contains("max_k")) base.max_k = j.at("max_k").get<long>();
  load_field(j, "inner_tol", base.inner_tol);
  load_field(j, "reorth", base.reorth);
  if (j.contains("wgcv_omega")) {
    if (j.at("wgcv_omega").is_null() || j.at("wgcv_omega") == "adaptive") {
      base.wgcv_omega.reset();
    } else {
      base.wgcv_omega = j.at("wgcv_omega").get<double>();
    }
  }
  load_field(j, "output_dir", base.output_dir);
  return base;
}

ProblemInstance build_problem(const RunConfig& config) {
  if (config.problem == "blur") {
    ProblemInstance inst =
        make_blur_instance(config.grid, config.band, config.sigma, config.eps, config.seed);
    if (config.regularizer == "identity") inst.L = LinearMap::identity(inst.n());
    return inst;
  }
  const Index n = config.n > 0 ? config.n : default_size(config.problem);
  const GeneratedSystem sys = [&] {
    if (config.problem == "shaw") return gen_shaw(n);
    if (config.problem == "baart") return gen_baart(n);
    if (config.problem == "heat") return gen_heat(n);
    if (config.problem == "deriv2") return gen_deriv2(n, config.example);
    throw std::invalid_argument("unknown problem: " + config.problem);
  }();
  LinearMap L = config.regularizer == "identity" ? LinearMap::identity(n)
                                                 : first_derivative_1d(n);
  if (config.regularizer != "identity" && config.regularizer != "first-diff") {
    throw std::invalid_argument("unknown regularizer: " + config.regularizer);
  }
  return make_instance(config.problem, sys, std::move(L), config.eps, config.seed);
}

void apply_rule_post(SolveLog& log, StopRule rule, double tau, std::optional<double> noise_norm) {
  log.chosen_k.reset();
  log.chosen_rule = StopRule::max_iter;
  switch (rule) {
    case StopRule::oracle_best:
      log.chosen_k = log.best_k();
      if (log.chosen_k) log.chosen_rule = StopRule::oracle_best;
      break;
    case StopRule::discrepancy: {
      if (!noise_norm) {
        throw std::invalid_argument("discrepancy rule needs the noise norm");
      }
      std::vector<double> residuals;
      residuals.reserve(log.entries.size());
      for (const SolveEntry& e : log.entries) residuals.push_back(e.residual_norm);
      if (auto pick = discrepancy_pick(residuals, *noise_norm, tau)) {
        log.chosen_k = log.entries[static_cast<std::size_t>(*pick) - 1].k;
        log.chosen_rule = StopRule::discrepancy;
      }
      break;
    }
    case StopRule::lcurve: {
      LCurvePoints points;
      for (const SolveEntry& e : log.entries) {
        points.ks.push_back(e.k);
        points.log_res.push_back(std::log(std::max(e.residual_norm, 1e-300)));
        points.log_semi.push_back(std::log(std::max(e.seminorm, 1e-300)));
      }
      log.corner_found = false;
      if (points.ks.size() >= 3) {
        try {
          log.chosen_k = lcurve_corner(points);
          log.chosen_rule = StopRule::lcurve;
          log.corner_found = true;
        } catch (const std::runtime_error&) {
        }
      }
      break;
    }
    case StopRule::max_iter:
      break;
  }
}

namespace {

struct SweepResult {
  SolveLog log;
  Vector solution;
  std::optional<double> chosen_lambda;
};

// Reference method sweeps over the dense factorization. Entries are logged
// via the expansion identities A g_i = c_i p_{i,A} and L g_i = s_i p_{i,L}.
SweepResult tgsvd_sweep(const ProblemInstance& problem, const GsvdFactors& f, Index max_k,
                        StopRule rule, double tau) {
  SweepResult out;
  const Index kmax = std::min<Index>(f.paired_count(), max_k);
  const Index offset = f.ordering == GsvdOrdering::decreasing_c ? 0 : f.null_count;

  Vector x = null_space_term(f, problem.b);
  Vector r = problem.b;
  for (Index i = 0; i < f.n(); ++i) {
    if (f.is_null_index(i)) r -= f.P_A.col(i).dot(problem.b) * f.P_A.col(i);
  }
  Vector Lx = problem.L.apply(x);

  std::vector<Vector> xs;
  xs.reserve(kmax);
  for (Index k = 1; k <= kmax; ++k) {
    const Index i = offset + k - 1;
    const double d = f.P_A.col(i).dot(problem.b);
    const double ci = f.c[i];
    x += (d / ci) * f.G.col(i);
    r -= d * f.P_A.col(i);
    Lx += (d / ci) * f.s[i] * f.P_L.col(f.pair_row(i));

    SolveEntry entry;
    entry.k = static_cast<int>(k);
    entry.residual_norm = r.norm();
    entry.seminorm = Lx.norm();
    if (problem.x_true) {
      const RelativeErrors err = relative_errors(problem.L, x, *problem.x_true);
      entry.rel_err_L = err.rel_err_L;
      entry.rel_err_plain = err.rel_err_plain;
    }
    out.log.entries.push_back(entry);
    xs.push_back(x);
  }
  if (out.log.entries.empty()) throw std::runtime_error("tgsvd: empty sweep");
  std::optional<double> noise_norm;
  if (problem.e) noise_norm = problem.e->norm();
  apply_rule_post(out.log, rule, tau, noise_norm);
  const Index final_k = out.log.chosen_k ? static_cast<Index>(*out.log.chosen_k)
                                         : static_cast<Index>(out.log.entries.back().k);
  out.solution = xs[final_k - 1];
  return out;
}

SweepResult tikhonov_sweep(const ProblemInstance& problem, const GsvdFactors& f, StopRule rule,
                           double tau) {
  SweepResult out;
  double gamma_max = 0.0;
  for (Index i = 0; i < f.n(); ++i) {
    if (!f.is_null_index(i) && f.s[i] > 0.0) {
      gamma_max = std::max(gamma_max, f.c[i] / f.s[i]);
    }
  }
  if (gamma_max == 0.0) gamma_max = 1.0;

  constexpr int kGrid = 200;
  const double log_hi = std::log(1e2 * gamma_max);
  const double log_lo = std::log(1e-8 * gamma_max);
  std::vector<Vector> xs;
  std::vector<double> lambdas;
  xs.reserve(kGrid);
  for (int g = 0; g < kGrid; ++g) {
    // Descending lambda: residuals decrease along the sweep.
    const double lam = std::exp(log_hi + (log_lo - log_hi) * g / (kGrid - 1));
    const Vector x = tikhonov_solution(f, problem.b, lam);
    SolveEntry entry;
    entry.k = g + 1;
    entry.mu = lam;
    entry.residual_norm = (problem.A.apply(x) - problem.b).norm();
    entry.seminorm = problem.L.apply(x).norm();
    if (problem.x_true) {
      const RelativeErrors err = relative_errors(problem.L, x, *problem.x_true);
      entry.rel_err_L = err.rel_err_L;
      entry.rel_err_plain = err.rel_err_plain;
    }
    out.log.entries.push_back(entry);
    xs.push_back(x);
    lambdas.push_back(lam);
  }
  std::optional<double> noise_norm;
  if (problem.e) noise_norm = problem.e->norm();
  apply_rule_post(out.log, rule, tau, noise_norm);
  const Index final_idx = out.log.chosen_k ? static_cast<Index>(*out.log.chosen_k)
                                           : static_cast<Index>(out.log.entries.back().k);
  out.solution = xs[final_idx - 1];
  out.chosen_lambda = lambdas[final_idx - 1];
  return out;
}

}  // namespace

std::string RunSummary::to_json() const {
  json j;
  j["problem"] = problem;
  j["solver"] = solver;
  j["rule"] = rule;
  j["eps"] = eps;
  j["seed"] = seed;
  j["n"] = static_cast<long>(n);
  j["chosen_k"] = optional_json(chosen_k);
  j["chosen_rel_err_L"] = optional_json(chosen_rel_err_L);
  j["residual_at_chosen"] = optional_json(residual_at_chosen);
  j["best_k"] = optional_json(best_k);
  j["best_rel_err_L"] = optional_json(best_rel_err_L);
  j["breakdown_at"] = breakdown_at ? json(static_cast<long>(*breakdown_at)) : json(nullptr);
  j["chosen_lambda"] = optional_json(chosen_lambda);
  j["corner_found"] = corner_found;
  j["noise_free_convergence"] = noise_free_convergence;
  j["wall_time_s"] = wall_time_s;
  return j.dump(2) + "\n";
}

RunSummary run(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemInstance problem = build_problem(config);
  const StopRule rule = rule_from_string(config.rule);
  const Index limit = std::min(problem.n(), problem.p());
  const Index max_k = config.max_k > 0 ? std::min(config.max_k, limit)
                                       : std::min<Index>(limit, 600);

  SolveLog log;
  Vector solution;
  std::optional<double> chosen_lambda;

  if (config.solver == "jbdqr") {
    JbdqrOptions opts;
    opts.max_k = max_k;
    opts.inner_tol = config.inner_tol;
    opts.reorth = reorth_from_string(config.reorth);
    opts.rule = rule;
    opts.tau = config.tau;
    RunResult res = jbdqr_run(problem, opts);
    log = std::move(res.log);
    solution = std::move(res.solution);
  } else if (config.solver == "hybrid_gcv" || config.solver == "hybrid_wgcv") {
    HybridOptions opts;
    opts.max_k = max_k;
    opts.inner_tol = config.inner_tol;
    opts.reorth = reorth_from_string(config.reorth);
    opts.choice = config.solver == "hybrid_gcv" ? HybridChoice::gcv : HybridChoice::wgcv;
    opts.omega = config.wgcv_omega;
    RunResult res = hybrid_run(problem, opts);
    log = std::move(res.log);
    solution = std::move(res.solution);
    if (rule != StopRule::oracle_best || !problem.x_true) {
      std::optional<double> noise_norm;
      if (problem.e) noise_norm = problem.e->norm();
      apply_rule_post(log, rule, config.tau, noise_norm);
      if (log.chosen_k) {
        // Rebuild the chosen iterate from the stored factorization.
        const Index k = static_cast<Index>(*log.chosen_k);
        const ProjectedPair pair = make_projected_pair(res.state, k);
        const double mu = log.entries[static_cast<std::size_t>(k) - 1].mu.value_or(0.0);
        solution = combine_preimages(res.state, projected_tikhonov(pair, mu));
      }
    }
  } else if (config.solver == "tgsvd" || config.solver == "tikhonov") {
    if (!problem.A.is_dense()) {
      throw std::invalid_argument(config.solver + " solver needs a dense operator (1d problems)");
    }
    const GsvdFactors f = gsvd(problem.A.to_dense(), problem.L.to_dense());
    SweepResult sweep = config.solver == "tgsvd"
                            ? tgsvd_sweep(problem, f, max_k, rule, config.tau)
                            : tikhonov_sweep(problem, f, rule, config.tau);
    log = std::move(sweep.log);
    solution = std::move(sweep.solution);
    chosen_lambda = sweep.chosen_lambda;
  } else {
    throw std::invalid_argument("unknown solver: " + config.solver);
  }

  RunSummary summary;
  summary.problem = config.problem;
  summary.solver = config.solver;
  summary.rule = config.rule;
  summary.eps = config.eps;
  summary.seed = config.seed;
  summary.n = problem.n();
  summary.chosen_k = log.chosen_k;
  if (log.chosen_k) {
    summary.residual_at_chosen = entry_residual_at(log, *log.chosen_k);
    summary.chosen_rel_err_L = entry_rel_err_at(log, *log.chosen_k);
  }
  summary.best_k = log.best_k();
  summary.best_rel_err_L = log.best_rel_err_L();
  summary.breakdown_at = log.breakdown_at;
  summary.chosen_lambda = chosen_lambda;
  summary.corner_found = log.corner_found;
  summary.noise_free_convergence = log.residual_floor_hit;
  summary.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!config.output_dir.empty()) {
    fs::create_directories(config.output_dir);
    {
      std::ofstream os(fs::path(config.output_dir) / "log.csv");
      write_solve_log_csv(os, log);
    }
    {
      std::ofstream os(fs::path(config.output_dir) / "summary.json");
      os << summary.to_json();
    }
    write_sequence_file((fs::path(config.output_dir) / "solution.txt").string(), solution);
    if (config.problem == "blur") {
      write_pgm_file((fs::path(config.output_dir) / "solution.pgm").string(),
                     vector_as_image(solution, config.grid));
      if (problem.x_true) {
        write_pgm_file((fs::path(config.output_dir) / "x_true.pgm").string(),
                       vector_as_image(*problem.x_true, config.grid));
      }
    }
  }
  return summary;
}

void report(const std::vector<std::string>& dirs, std::ostream& out, std::ostream& warnings) {
  struct Row {
    std::string problem;
    double eps;
    std::string solver;
    std::uint64_t seed;
    std::string rest;
  };
  std::vector<Row> rows;
  for (const std::string& dir : dirs) {
    const fs::path path = fs::path(dir) / "summary.json";
    try {
      std::ifstream is(path);
      if (!is) throw std::runtime_error("missing summary.json");
      json j = json::parse(is);
      Row row;
      row.problem = j.at("problem").get<std::string>();
      row.eps = j.at("eps").get<double>();
      row.solver = j.at("solver").get<std::string>();
      row.seed = j.at("seed").get<std::uint64_t>();
      std::ostringstream rest;
      auto put = [&rest, &j](const char* key) {
        rest << ',';
        const json& v = j.at(key);
        if (v.is_null()) return;
        if (v.is_number_float()) {
          rest << format_double(v.get<double>());
        } else {
          rest << v.dump();
        }
      };
      rest << j.at("rule").get<std::string>();
      put("chosen_k");
      put("chosen_rel_err_L");
      put("best_k");
      put("best_rel_err_L");
      put("residual_at_chosen");
      put("wall_time_s");
      row.rest = rest.str();
      rows.push_back(std::move(row));
    } catch (const std::exception& ex) {
      warnings << "report: skipping " << dir << ": " << ex.what() << "\n";
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.problem, a.eps, a.solver, a.seed) <
           std::tie(b.problem, b.eps, b.solver, b.seed);
  });
  out << "problem,eps,solver,seed,rule,chosen_k,chosen_rel_err_L,best_k,best_rel_err_L,"
         "residual_at_chosen,wall_time_s\n";
  for (const Row& row : rows) {
    out << row.problem << ',' << format_double(row.eps) << ',' << row.solver << ',' << row.seed
        << ',' << row.rest << '\n';
  }
}

void compare(const std::vector<std::string>& problems, const std::vector<std::string>& solvers,
             double eps, int seeds, const RunConfig& base, const std::string& output_root,
             std::ostream& out, int jobs) {
  struct Job {
    RunConfig config;
    RunSummary summary;
  };
  std::vector<Job> todo;
  for (const std::string& problem : problems) {
    for (const std::string& solver : solvers) {
      for (int seed = 0; seed < seeds; ++seed) {
        RunConfig config = base;
        config.problem = problem;
        config.solver = solver;
        config.eps = eps;
        config.seed = static_cast<std::uint64_t>(seed) + base.seed;
        if (!output_root.empty()) {
          std::ostringstream dir;
          dir << output_root << '/' << problem << '_' << solver << "_s" << config.seed;
          config.output_dir = dir.str();
        }
        todo.push_back({std::move(config), {}});
      }
    }
  }

  if (jobs <= 1) {
    for (Job& job : todo) job.summary = run(job.config);
  } else {
    std::vector<std::future<RunSummary>> futures(todo.size());
    std::size_t next = 0;
    while (next < todo.size()) {
      const std::size_t batch = std::min<std::size_t>(jobs, todo.size() - next);
      for (std::size_t i = 0; i < batch; ++i) {
        const RunConfig& config = todo[next + i].config;
        futures[next + i] = std::async(std::launch::async, [config] { return run(config); });
      }
      for (std::size_t i = 0; i < batch; ++i) {
        todo[next + i].summary = futures[next + i].get();
      }
      next += batch;
    }
  }

  out << "problem,eps,solver,seed,best_k,best_rel_err_L,chosen_k,chosen_rel_err_L\n";
  for (const Job& job : todo) {
    const RunSummary& s = job.summary;
    out << s.problem << ',' << format_double(s.eps) << ',' << s.solver << ',' << s.seed << ',';
    if (s.best_k) out << *s.best_k;
    out << ',';
    if (s.best_rel_err_L) out << format_double(*s.best_rel_err_L);
    out << ',';
    if (s.chosen_k) out << *s.chosen_k;
    out << ',';
    if (s.chosen_rel_err_L) out << format_double(*s.chosen_rel_err_L);
    out << '\n';
  }
}

void export_problem(const std::string& dir, const ProblemInstance& instance) {
  fs::create_directories(dir);
  const fs::path root(dir);
  json meta;
  meta["name"] = instance.name;
  meta["m"] = static_cast<long>(instance.m());
  meta["n"] = static_cast<long>(instance.n());
  meta["p"] = static_cast<long>(instance.p());
  meta["eps"] = instance.eps;
  meta["seed"] = instance.seed;
  meta["files"] = json::object();

  if (!instance.A.is_dense()) {
    throw std::invalid_argument("export_problem: only dense operators serialize");
  }
  write_matrix_file((root / "A.txt").string(), instance.A.to_dense());
  meta["files"]["A"] = "A.txt";
  write_matrix_file((root / "L.txt").string(), instance.L.to_dense());
  meta["files"]["L"] = "L.txt";
  write_sequence_file((root / "b.txt").string(), instance.b);
  meta["files"]["b"] = "b.txt";
  auto maybe = [&](const char* key, const std::optional<Vector>& v, const char* file) {
    if (v) {
      write_sequence_file((root / file).string(), *v);
      meta["files"][key] = file;
    }
  };
  maybe("x_true", instance.x_true, "x_true.txt");
  maybe("b_true", instance.b_true, "b_true.txt");
  maybe("e", instance.e, "e.txt");
  std::ofstream os(root / "meta.json");
  os << meta.dump(2) << "\n";
}

ProblemInstance import_problem(const std::string& dir) {
  const fs::path root(dir);
  std::ifstream is(root / "meta.json");
  if (!is) throw std::invalid_argument("import_problem: missing meta.json in " + dir);
  json meta = json::parse(is);
  const json& files = meta.at("files");

  LinearMap A = LinearMap::dense(read_matrix_file((root / files.at("A").get<std::string>()).string()));
  LinearMap L = LinearMap::dense(read_matrix_file((root / files.at("L").get<std::string>()).string()));
  Vector b = read_sequence_file((root / files.at("b").get<std::string>()).string());

  ProblemInstance inst{std::move(A), std::move(L), std::move(b)};
  inst.eps = meta.value("eps", 0.0);
  inst.seed = meta.value("seed", std::uint64_t{0});
  inst.name = meta.value("name", std::string{});
  auto maybe = [&](const char* key) -> std::optional<Vector> {
    if (!files.contains(key)) return std::nullopt;
    return read_sequence_file((root / files.at(key).get<std::string>()).string());
  };
  inst.x_true = maybe("x_true");
  inst.b_true = maybe("b_true");
  inst.e = maybe("e");
  return inst;
}

}  // namespace illposed
