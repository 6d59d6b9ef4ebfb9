// glkit: exploration-allocation solver and semi-bandit simulation harness.
//
// Subcommands: solve, lowerbound, simulate, validate. Exit codes: 0 success,
// 2 bad input, 3 solver failure, 4 validation failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glkit/glpg.hpp"
#include "glkit/io.hpp"
#include "glkit/reference.hpp"
#include "glkit/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitSolverFailure = 3;
constexpr int kExitValidationFailure = 4;

struct SolveFlags {
  std::string instance;
  std::string out;
  double delta = 0.1;
  double eps = 1.0;
  long max_iters = 200000;
  bool theoretical = false;
  bool confirm = false;
};

std::string file_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

// Solves the instance; real-valued instances are discretized first and the
// allocation is mapped back to the real problem (weights / eps^2, then the
// feasibility inflation when the minimal gap is computable).
glkit::GLOutput solve_instance(const glkit::InstanceFile& inst, double delta,
                               double eps, const glkit::GLPGOptions& opts) {
  using namespace glkit;
  if (inst.theta) {
    Theta th = Theta::from_integers(*inst.theta);
    return solve(inst.set, th, delta, eps, opts);
  }
  double e = *inst.epsilon;
  Theta th = discretize(inst.set, *inst.theta_real, e, opts.cap);
  if (th.discretization_warning)
    std::cerr << "warning: discretization step not certified against "
                 "delta_min/(2m); the feasibility transfer may be weaker\n";
  GLOutput out = solve(inst.set, th, delta, eps, opts);
  for (double& w : out.weights) w /= e * e;

  const std::vector<double>& theta_real = *inst.theta_real;
  Decision x_star = linear_max(inst.set, theta_real);
  double opt = dot(theta_real, x_star);
  int m = max_decision_size(inst.set);
  std::optional<double> dmin;
  try {
    for (const auto& x : enumerate_decisions(inst.set, opts.cap)) {
      double g = opt - dot(theta_real, x);
      if (g > 1e-12 && (!dmin || g < *dmin)) dmin = g;
    }
  } catch (const TooLarge&) {
  }
  if (dmin) {
    double f = discretization_inflation(m, e, *dmin);
    for (double& w : out.weights) w *= f;
  } else {
    std::cerr << "warning: minimal gap not computable at this size; "
                 "skipping the feasibility inflation\n";
  }
  out.objective = 0.0;
  std::vector<double> w_orig(inst.set.dimension(), 0.0);
  for (std::size_t k = 0; k < out.atoms.size(); ++k) {
    out.objective += out.weights[k] * (opt - dot(theta_real, out.atoms[k]));
    for (int i = 0; i < inst.set.dimension(); ++i)
      if (out.atoms[k][i]) w_orig[i] += out.weights[k];
  }
  try {
    out.certified_max_violation =
        check_feasible(inst.set, theta_real, w_orig, opts.cap);
    out.certified_by_enumeration = true;
  } catch (const TooLarge&) {
    std::cerr << "warning: real-problem feasibility kept from the discretized "
                 "certificate\n";
  }
  return out;
}

int cmd_solve(const SolveFlags& f) {
  using namespace glkit;
  InstanceFile inst = load_instance(f.instance, file_stem(f.instance));
  if (f.theoretical && !f.confirm) {
    std::cerr << "the printed iteration schedule can run for days; pass "
                 "--confirm to accept\n";
    return kExitBadInput;
  }
  GLPGOptions opts;
  opts.max_iters = f.max_iters;
  opts.theoretical = f.theoretical;
  GLOutput out = solve_instance(inst, f.delta, f.eps, opts);
  std::printf("objective=%.6f certified_max_violation=%.3e iterations=%ld\n",
              out.objective, out.certified_max_violation, out.iterations);
  if (!f.out.empty()) {
    std::ofstream os(f.out);
    if (!os) {
      std::cerr << "cannot write " << f.out << "\n";
      return kExitBadInput;
    }
    os << solution_to_json(out).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_lowerbound(const std::string& instance, double delta, double eps) {
  using namespace glkit;
  InstanceFile inst = load_instance(instance, file_stem(instance));
  GLPGOptions opts;
  GLOutput out = solve_instance(inst, delta, eps, opts);
  std::vector<double> theta =
      inst.theta ? std::vector<double>(inst.theta->begin(), inst.theta->end())
                 : *inst.theta_real;
  std::string brute;
  try {
    BruteForceResult r = brute_force_gl(inst.set, theta);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", r.C);
    brute = buf;
  } catch (const TooLarge&) {
    brute = "n/a (|X| cap)";
  }
  std::printf("glpg=%.4f brute=%s\n", out.objective, brute.c_str());
  return kExitOk;
}

int cmd_simulate(const std::string& instance, const std::string& algo_str,
                 long horizon, int reps, long seed, const std::string& out,
                 int threads) {
  using namespace glkit;
  auto algo = algo_from_string(algo_str);
  if (!algo) {
    std::cerr << "unknown algorithm '" << algo_str
              << "' (use cucb, ts, escb, ossb, oracle)\n";
    return kExitBadInput;
  }
  InstanceFile inst = load_instance(instance, file_stem(instance));
  std::vector<double> theta =
      inst.theta ? std::vector<double>(inst.theta->begin(), inst.theta->end())
                 : *inst.theta_real;
  SimOptions opts;
  opts.threads = threads;
  auto traces = run_experiment(inst.set, theta, *algo, horizon, reps, seed,
                               inst.instance_id, opts);
  std::string csv;
  write_traces_csv(csv, traces);
  std::ofstream os(out, std::ios::binary);
  if (!os) {
    std::cerr << "cannot write " << out << "\n";
    return kExitBadInput;
  }
  os << csv;
  double mean_final = 0.0;
  long fallbacks = 0;
  for (const auto& tr : traces) {
    mean_final += tr.points.back().second;
    fallbacks += tr.ossb_fallbacks;
  }
  mean_final /= std::max<std::size_t>(1, traces.size());
  std::printf("algo=%s reps=%zu horizon=%ld mean_final_regret=%.4f\n",
              algo_str.c_str(), traces.size(), horizon, mean_final);
  if (fallbacks)
    std::cerr << "note: " << fallbacks
              << " per-epoch solver fallbacks to the index rule\n";
  return kExitOk;
}

int cmd_validate(const std::string& instance, double delta,
                 const std::string& solution) {
  using namespace glkit;
  InstanceFile inst = load_instance(instance, file_stem(instance));
  std::vector<double> theta =
      inst.theta ? std::vector<double>(inst.theta->begin(), inst.theta->end())
                 : *inst.theta_real;

  if (!solution.empty()) {
    SolutionFile sol = load_solution(solution);
    if (sol.atoms.size() != sol.weights.size()) {
      std::printf("solution invalid: atom/weight count mismatch\n");
      return kExitValidationFailure;
    }
    Decision x_star = linear_max(inst.set, theta);
    double opt = dot(theta, x_star);
    double objective = 0.0;
    std::vector<double> w(inst.set.dimension(), 0.0);
    for (std::size_t k = 0; k < sol.atoms.size(); ++k) {
      if (!inst.set.contains(sol.atoms[k])) {
        std::printf("solution invalid: atom %zu is not a decision\n", k);
        return kExitValidationFailure;
      }
      if (!(sol.weights[k] > 0.0)) {
        std::printf("solution invalid: weight %zu is not positive\n", k);
        return kExitValidationFailure;
      }
      objective += sol.weights[k] * (opt - dot(theta, sol.atoms[k]));
      for (int i = 0; i < inst.set.dimension(); ++i)
        if (sol.atoms[k][i]) w[i] += sol.weights[k];
    }
    if (objective != sol.objective) {
      std::printf("solution invalid: objective %.17g, recomputed %.17g\n",
                  sol.objective, objective);
      return kExitValidationFailure;
    }
    double viol = check_feasible(inst.set, theta, w);
    if (!(viol <= 1e-9)) {
      std::printf("solution invalid: max constraint violation %.3e\n", viol);
      return kExitValidationFailure;
    }
    std::printf("solution ok: objective=%.6f max_violation=%.3e\n", objective,
                viol);
    return kExitOk;
  }

  GLPGOptions opts;
  GLOutput out = solve_instance(inst, delta, 1.0, opts);
  BruteForceResult r = brute_force_gl(inst.set, theta);
  double gap_obj = out.objective - r.C;
  bool ok = std::abs(gap_obj) <= delta && out.certified_max_violation <= 1e-9;
  std::printf("glpg=%.6f brute=%.6f gap=%.6f violation=%.3e -> %s\n",
              out.objective, r.C, gap_obj, out.certified_max_violation,
              ok ? "ok" : "FAIL");
  return ok ? kExitOk : kExitValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* cap = std::getenv("GLKIT_ENUM_CAP")) {
    char* end = nullptr;
    long v = std::strtol(cap, &end, 10);
    if (end && *end == '\0' && v > 0) glkit::enumeration_cap() = v;
  }

  CLI::App app{"Exploration-allocation solver for combinatorial semi-bandits"};
  app.require_subcommand(1);

  SolveFlags sf;
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance");
  solve_cmd->add_option("--instance", sf.instance, "instance JSON")->required();
  solve_cmd->add_option("--delta", sf.delta, "target accuracy");
  solve_cmd->add_option("--eps", sf.eps, "oracle approximation ratio");
  solve_cmd->add_option("--out", sf.out, "solution JSON path");
  solve_cmd->add_option("--max-iters", sf.max_iters, "iteration budget");
  solve_cmd->add_flag("--theoretical-schedule", sf.theoretical,
                      "run the printed iteration count");
  solve_cmd->add_flag("--confirm", sf.confirm,
                      "accept the theoretical schedule runtime");

  std::string lb_instance;
  double lb_delta = 0.1, lb_eps = 1.0;
  auto* lb_cmd = app.add_subcommand("lowerbound", "print C(theta) estimates");
  lb_cmd->add_option("--instance", lb_instance, "instance JSON")->required();
  lb_cmd->add_option("--delta", lb_delta, "target accuracy");
  lb_cmd->add_option("--eps", lb_eps, "oracle approximation ratio");

  std::string sim_instance, sim_algo, sim_out = "traces.csv";
  long sim_horizon = 10000, sim_seed = 0;
  int sim_reps = 10, sim_threads = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "run regret simulations");
  sim_cmd->add_option("--instance", sim_instance, "instance JSON")->required();
  sim_cmd->add_option("--algo", sim_algo, "cucb|ts|escb|ossb|oracle")->required();
  sim_cmd->add_option("--horizon", sim_horizon, "time horizon");
  sim_cmd->add_option("--reps", sim_reps, "replications");
  sim_cmd->add_option("--seed", sim_seed, "base seed");
  sim_cmd->add_option("--out", sim_out, "CSV path");
  sim_cmd->add_option("--threads", sim_threads, "parallel replications");

  std::string val_instance, val_solution;
  double val_delta = 0.1;
  auto* val_cmd = app.add_subcommand("validate", "cross-check against brute force");
  val_cmd->add_option("--instance", val_instance, "instance JSON")->required();
  val_cmd->add_option("--delta", val_delta, "objective gap allowance");
  val_cmd->add_option("--check-solution", val_solution,
                      "verify a solution file instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(sf);
    if (lb_cmd->parsed()) return cmd_lowerbound(lb_instance, lb_delta, lb_eps);
    if (sim_cmd->parsed())
      return cmd_simulate(sim_instance, sim_algo, sim_horizon, sim_reps,
                          sim_seed, sim_out, sim_threads);
    if (val_cmd->parsed()) return cmd_validate(val_instance, val_delta, val_solution);
  } catch (const glkit::InvalidInstance& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const glkit::TooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const glkit::UncoveredCoordinate& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const glkit::NonPositiveEntry& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const glkit::Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  return kExitBadInput;
}
