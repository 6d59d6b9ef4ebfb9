#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "glkit/errors.hpp"
#include "glkit/glpg.hpp"
#include "glkit/instance.hpp"
#include "glkit/structures.hpp"

namespace glkit {

enum class Algo { Cucb, Ts, Escb, OssbCe, Oracle };

inline std::optional<Algo> algo_from_string(const std::string& s) {
  if (s == "cucb") return Algo::Cucb;
  if (s == "ts") return Algo::Ts;
  if (s == "escb") return Algo::Escb;
  if (s == "ossb") return Algo::OssbCe;
  if (s == "oracle") return Algo::Oracle;
  return std::nullopt;
}

inline const char* algo_name(Algo a) {
  switch (a) {
    case Algo::Cucb: return "cucb";
    case Algo::Ts: return "ts";
    case Algo::Escb: return "escb";
    case Algo::OssbCe: return "ossb";
    case Algo::Oracle: return "oracle";
  }
  return "?";
}

// Semi-bandit feedback: rewards are N(theta, I/2), the learner sees the
// coordinates its decision selected.
struct Environment {
  std::vector<double> theta;
  std::normal_distribution<double> noise{0.0, std::sqrt(0.5)};

  std::vector<double> draw(std::mt19937_64& rng) {
    std::vector<double> y(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) y[i] = theta[i] + noise(rng);
    return y;
  }
};

struct LearnerState {
  std::vector<long> counts;
  std::vector<double> sums;
  long t = 0;

  explicit LearnerState(int d) : counts(d, 0), sums(d, 0.0) {}

  std::vector<double> means() const {
    std::vector<double> m(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
      m[i] = sums[i] / std::max<long>(1, counts[i]);
    return m;
  }
  void update(const Decision& x, const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i]) {
        counts[i] += 1;
        sums[i] += y[i];
      }
    ++t;
  }
  bool initialized() const {
    return std::all_of(counts.begin(), counts.end(),
                       [](long n) { return n >= 1; });
  }
};

// ---------------------------------------------------------------------------
// Selection rules

// Index rule theta_hat_i + ln T / n_i as printed; the sqrt variant switches to
// the conventional sqrt(1.5 ln t / n_i) bonus.
inline Decision cucb_select(const LearnerState& state, const DecisionSet& set,
                            long horizon, bool sqrt_bonus = false) {
  std::vector<double> idx = state.means();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (sqrt_bonus)
      idx[i] += std::sqrt(1.5 * std::log(std::max<long>(2, state.t)) /
                          state.counts[i]);
    else
      idx[i] += std::log(static_cast<double>(horizon)) / state.counts[i];
  }
  return linear_max(set, idx);
}

inline Decision ts_select_from_sample(const DecisionSet& set,
                                      const std::vector<double>& v) {
  return linear_max(set, v);
}

inline Decision ts_select(const LearnerState& state, const DecisionSet& set,
                          std::mt19937_64& rng) {
  std::vector<double> v = state.means();
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::normal_distribution<double> n(0.0, std::sqrt(1.0 / state.counts[i]));
    v[i] += n(rng);
  }
  return ts_select_from_sample(set, v);
}

// Exact index maximization by enumeration (the index is not linear).
inline Decision escb_select(const LearnerState& state, const DecisionSet& set,
                            long horizon, long cap = enumeration_cap()) {
  auto all = enumerate_decisions(set, cap);
  std::vector<double> mean = state.means();
  double lt = std::log(static_cast<double>(horizon));
  const Decision* best = nullptr;
  double best_v = 0.0;
  for (const auto& x : all) {
    double bonus = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i]) bonus += lt / state.counts[i];
    double v = dot(mean, x) + std::sqrt(bonus);
    if (!best || v > best_v) {
      best = &x;
      best_v = v;
    }
  }
  if (!best) throw EmptySet("escb_select: empty decision set");
  return *best;
}

// ---------------------------------------------------------------------------
// Certainty-equivalence policy driven by the exploration allocation

struct OssbCeConfig {
  double delta = 0.1;          // accuracy handed to the solver per epoch
  double eps_floor = 0.05;     // lower cap on the discretization step
  GLPGOptions solver;          // per-epoch solver budget
  long cap = enumeration_cap();

  OssbCeConfig() {
    solver.max_iters = 1500;
    solver.certify_every = 250;
    solver.plateau_window = 300;
  }
};

// Epoch scheme: at t = 2^j re-solve the exploration program on the
// discretized empirical means; between epochs play the empirical best unless
// some cached atom is behind its ceil(alpha ln t) quota.
class OssbCePolicy {
 public:
  explicit OssbCePolicy(OssbCeConfig cfg = {}) : cfg_(std::move(cfg)) {}

  static long target(double alloc, long t) {
    return static_cast<long>(
        std::ceil(alloc * std::log(static_cast<double>(t))));
  }

  Decision select(const LearnerState& state, const DecisionSet& set, long t) {
    int j = epoch_index(t);
    if (j > epoch_) {
      epoch_ = j;
      resolve(state, set, j);
    }
    long worst_deficit = 0;
    int pick = -1;
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
      long deficit = target(alloc_[k], t) - plays_[atoms_[k]];
      if (deficit > worst_deficit) {
        worst_deficit = deficit;
        pick = static_cast<int>(k);
      }
    }
    Decision x;
    if (pick >= 0) {
      x = atoms_[pick];
      ++forced_[x];
    } else {
      x = linear_max(set, state.means());
    }
    ++plays_[x];
    return x;
  }

  // Installs an allocation directly (epoch solves are skipped until the next
  // boundary); used to pin the policy against hand-computed quotas.
  void install_allocation(std::vector<Decision> atoms, std::vector<double> alloc,
                          int epoch) {
    atoms_ = std::move(atoms);
    alloc_ = std::move(alloc);
    epoch_ = epoch;
  }

  long solver_fallbacks() const { return fallbacks_; }
  long forced_plays(const Decision& x) const {
    auto it = forced_.find(x);
    return it == forced_.end() ? 0 : it->second;
  }
  const std::vector<Decision>& atoms() const { return atoms_; }
  const std::vector<double>& allocation() const { return alloc_; }

 private:
  static int epoch_index(long t) {
    int j = 0;
    while ((1L << (j + 1)) <= t) ++j;
    return j;
  }

  void resolve(const LearnerState& state, const DecisionSet& set, int j) {
    double eps_j = std::max(std::pow(2.0, -0.5 * j), cfg_.eps_floor);
    std::vector<double> mean = state.means();
    for (double& v : mean) v = std::max(v, eps_j);
    try {
      Theta th = discretize(mean, eps_j);
      GLOutput out = solve(set, th, cfg_.delta, 1.0, cfg_.solver);
      atoms_ = out.atoms;
      alloc_ = out.weights;
      for (double& a : alloc_) a /= eps_j * eps_j;
    } catch (const Error&) {
      ++fallbacks_;  // keep the previous allocation for this epoch
    }
  }

  OssbCeConfig cfg_;
  std::vector<Decision> atoms_;
  std::vector<double> alloc_;
  std::map<Decision, long> plays_;
  std::map<Decision, long> forced_;
  int epoch_ = 0;
  long fallbacks_ = 0;
};

// ---------------------------------------------------------------------------
// Experiment driver

struct RegretTrace {
  std::string instance_id;
  std::string algo;
  long seed = 0;
  std::vector<std::pair<long, double>> points;  // (t, cumulative pseudo-regret)
  long ossb_fallbacks = 0;
};

struct SimOptions {
  bool cucb_sqrt_bonus = false;
  OssbCeConfig ossb;
  long escb_cap = enumeration_cap();
  int threads = 1;
};

inline std::vector<long> default_checkpoints(long horizon) {
  std::vector<long> cps;
  for (long base = 1; base <= horizon; base *= 10)
    for (long mult : {1, 2, 5}) {
      long t = base * mult;
      if (t <= horizon) cps.push_back(t);
    }
  if (cps.empty() || cps.back() != horizon) cps.push_back(horizon);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

namespace detail {

inline RegretTrace run_one(const DecisionSet& set,
                           const std::vector<double>& theta, Algo algo,
                           long horizon, long seed,
                           const std::string& instance_id,
                           const SimOptions& opts,
                           const std::vector<Decision>& init_plays,
                           const Decision& x_star, double opt_value,
                           const std::vector<long>& checkpoints) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  Environment env{theta};
  LearnerState state(set.dimension());
  OssbCePolicy ossb(opts.ossb);

  RegretTrace trace;
  trace.instance_id = instance_id;
  trace.algo = algo_name(algo);
  trace.seed = seed;

  double cum = 0.0;
  std::size_t cp = 0;
  std::size_t init_at = 0;
  bool needs_init = algo != Algo::Oracle;
  for (long t = 1; t <= horizon; ++t) {
    Decision x;
    if (needs_init && !state.initialized() && init_at < init_plays.size()) {
      x = init_plays[init_at++];
    } else {
      switch (algo) {
        case Algo::Cucb:
          x = cucb_select(state, set, horizon, opts.cucb_sqrt_bonus);
          break;
        case Algo::Ts:
          x = ts_select(state, set, rng);
          break;
        case Algo::Escb:
          x = escb_select(state, set, horizon, opts.escb_cap);
          break;
        case Algo::OssbCe:
          x = ossb.select(state, set, t);
          break;
        case Algo::Oracle:
          x = x_star;
          break;
      }
    }
    std::vector<double> y = env.draw(rng);
    state.update(x, y);
    cum += opt_value - dot(theta, x);
    if (cp < checkpoints.size() && t == checkpoints[cp]) {
      trace.points.emplace_back(t, cum);
      ++cp;
    }
  }
  trace.ossb_fallbacks = ossb.solver_fallbacks();
  return trace;
}

}  // namespace detail

// R independent replications with seeds base+1..base+R. The first steps play
// (deduplicated) covering witnesses so every coordinate gets one sample
// before any index rule runs.
inline std::vector<RegretTrace> run_experiment(
    const DecisionSet& set, const std::vector<double>& theta, Algo algo,
    long horizon, int reps, long base_seed, const std::string& instance_id,
    const SimOptions& opts = {}) {
  if (static_cast<int>(theta.size()) != set.dimension())
    throw InvalidInstance("run_experiment: theta length mismatch");
  Covering cov = check_covering(set);
  if (!cov.uncovered.empty())
    throw UncoveredCoordinate("run_experiment: instance has uncovered coordinates");
  std::vector<Decision> init_plays;
  for (const auto& w : cov.witness)
    if (w && std::find(init_plays.begin(), init_plays.end(), *w) ==
                 init_plays.end())
      init_plays.push_back(*w);
  if (horizon < static_cast<long>(init_plays.size()))
    throw InvalidInstance("run_experiment: horizon too short for initialization");

  Decision x_star = linear_max(set, theta);
  double opt_value = dot(theta, x_star);
  std::vector<long> checkpoints = default_checkpoints(horizon);

  std::vector<RegretTrace> traces(reps);
  int workers = std::max(1, opts.threads);
  if (workers == 1) {
    for (int r = 0; r < reps; ++r)
      traces[r] = detail::run_one(set, theta, algo, horizon, base_seed + 1 + r,
                                  instance_id, opts, init_plays, x_star,
                                  opt_value, checkpoints);
  } else {
    std::vector<std::future<void>> futs;
    std::atomic<int> next{0};
    for (int wkr = 0; wkr < workers; ++wkr)
      futs.push_back(std::async(std::launch::async, [&] {
        for (int r = next.fetch_add(1); r < reps; r = next.fetch_add(1))
          traces[r] = detail::run_one(set, theta, algo, horizon,
                                      base_seed + 1 + r, instance_id, opts,
                                      init_plays, x_star, opt_value,
                                      checkpoints);
      }));
    for (auto& f : futs) f.get();
  }
  return traces;
}

inline void write_traces_csv(std::string& out,
                             const std::vector<RegretTrace>& traces) {
  out += "instance_id,algo,seed,t,cum_regret\n";
  char buf[64];
  for (const auto& tr : traces)
    for (const auto& [t, r] : tr.points) {
      out += tr.instance_id;
      out += ',';
      out += tr.algo;
      out += ',';
      out += std::to_string(tr.seed);
      out += ',';
      out += std::to_string(t);
      out += ',';
      std::snprintf(buf, sizeof(buf), "%.12g", r);
      out += buf;
      out += '\n';
    }
}

}  // namespace glkit
