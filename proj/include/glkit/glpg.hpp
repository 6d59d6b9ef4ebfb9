#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "glkit/errors.hpp"
#include "glkit/hull.hpp"
#include "glkit/instance.hpp"
#include "glkit/polytope.hpp"
#include "glkit/structures.hpp"

namespace glkit {

// Parameter schedule. The printed iteration count is astronomically
// conservative, so default runs cap it and stop on a plateau; the printed
// schedule stays available behind the `theoretical` switch.
struct GLPGParams {
  double delta = 0.1;
  double eps = 1.0;
  double delta2 = 0.0;
  double delta1 = 0.0;
  double lambda = 0.0;
  double iterations = 0.0;  // the printed T
  double eta = 0.0;         // the printed step size

  bool theoretical = false;
  long max_iters = 200000;
  bool plateau_stop = true;
  long plateau_window = 1000;
  double plateau_tol = 1e-7;
  long certify_every = 500;
  double eta0 = 2.0;  // practical-mode step scale (normalized directions)
};

inline GLPGParams schedule(double delta, double eps, int m, int d,
                           long theta_inf, double q_norm) {
  if (!(delta > 0.0) || !(eps > 0.0) || eps > 1.0)
    throw InvalidInstance("schedule: need delta > 0 and 0 < eps <= 1");
  GLPGParams p;
  p.delta = delta;
  p.eps = eps;
  double th = static_cast<double>(theta_inf);
  double md = static_cast<double>(m) * m * d * th;
  p.delta2 = delta * eps / md;
  p.delta1 = delta / (2.0 * (1.0 + p.delta2));
  p.lambda = (p.delta1 + md) / p.delta2;
  double grad_bound = std::pow(eps, -2.0) * d * std::pow(m, 8.0) * std::pow(th, 8.0);
  double num = std::pow(eps, -2.0) * std::pow(m, 5.0) * d * d * th * th;
  double denom_core = q_norm * q_norm + p.lambda * p.lambda * grad_bound;
  p.iterations = num * denom_core / (p.delta1 * p.delta1);
  p.eta = std::sqrt(num / (p.iterations * denom_core));
  return p;
}

// ---------------------------------------------------------------------------
// Most-violated-constraint oracle (BLM sweep over gap budgets)

struct MostViolated {
  Decision x;
  double score = 0.0;  // certified upper bound on max_x h_x(w); exact at eps=1
  long s = 0;
};

// Pluggable approximate BLM oracle (Assumption-4 style contract).
using ApproxBlm = std::function<std::optional<Decision>(
    const std::vector<double>& a, const std::vector<long>& u, long budget)>;

// Runs the sweep; structures without a budget DP reuse one cached
// enumeration across calls, which matters inside the solver loop.
class SweepOracle {
 public:
  SweepOracle(const DecisionSet& set, const Theta& theta,
              const GapProfile& gaps, long cap = enumeration_cap())
      : set_(&set), theta_(&theta), gaps_(&gaps) {
    if (!set.is<MSet>() && !set.is<StPathDag>()) {
      try {
        cache_ = enumerate_decisions(set, cap);
      } catch (const TooLarge&) {
        throw OracleUnavailable(
            "most_violated: structure needs enumeration beyond the cap");
      }
    }
  }

  MostViolated operator()(const std::vector<double>& w,
                          const ApproxBlm* oracle = nullptr) const {
    const GapProfile& gaps = *gaps_;
    int d = set_->dimension();
    std::vector<double> a(d, 0.0);
    for (int i : gaps.items) {
      if (!(w[i] > 0.0))
        throw DivisionGuard("most_violated: nonpositive rate on an I coordinate");
      a[i] = 1.0 / w[i];
    }
    long opt = gaps.opt_value;
    long best_s = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    Decision best_x;
    if (oracle) {
      for (long s = 0; s <= opt; ++s) {
        auto x = (*oracle)(a, theta_->values, opt - s);
        if (!x) continue;
        double score = dot(a, *x) - static_cast<double>(s) * s;
        if (score > best_score) {
          best_score = score;
          best_s = s;
          best_x = std::move(*x);
        }
      }
      if (best_x.empty())
        throw OracleUnavailable("most_violated: oracle returned nothing");
      return {std::move(best_x), best_score, best_s};
    }
    std::vector<double> profile;
    if (cache_.empty()) {
      profile = budget_value_profile(*set_, a, theta_->values, opt);
    } else {
      profile.assign(opt + 1, -std::numeric_limits<double>::infinity());
      for (const auto& x : cache_) {
        long b = std::min<long>(opt, dot(theta_->values, x));
        profile[b] = std::max(profile[b], dot(a, x));
      }
      for (long b = opt - 1; b >= 0; --b)
        profile[b] = std::max(profile[b], profile[b + 1]);
    }
    for (long s = 0; s <= opt; ++s) {
      double v = profile[opt - s];
      if (v == -std::numeric_limits<double>::infinity()) continue;
      double score = v - static_cast<double>(s) * s;
      if (score > best_score) {
        best_score = score;
        best_s = s;
      }
    }
    if (cache_.empty()) {
      auto x = budgeted_linear_max(*set_, a, theta_->values, opt - best_s);
      if (!x)
        throw OracleUnavailable("most_violated: sweep reconstruction failed");
      best_x = std::move(*x);
    } else {
      auto x = detail::scan_blm(cache_, a, theta_->values, opt - best_s);
      if (!x)
        throw OracleUnavailable("most_violated: sweep reconstruction failed");
      best_x = std::move(*x);
    }
    return {std::move(best_x), best_score, best_s};
  }

 private:
  const DecisionSet* set_;
  const Theta* theta_;
  const GapProfile* gaps_;
  std::vector<Decision> cache_;
};

inline MostViolated most_violated(const DecisionSet& set,
                                  const std::vector<double>& w,
                                  const Theta& theta, const GapProfile& gaps,
                                  double eps = 1.0,
                                  const ApproxBlm* oracle = nullptr) {
  (void)eps;
  return SweepOracle(set, theta, gaps)(w, oracle);
}

// ---------------------------------------------------------------------------
// Sparse decomposition (iterated min-support completion in the lifted space)

namespace detail {

// Lawson-Hanson nonnegative least squares; columns of V, target w.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& V, const Eigen::VectorXd& w) {
  int n = static_cast<int>(V.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<char> passive(n, 0);
  Eigen::VectorXd resid = w;
  double tol = 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff());
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    Eigen::VectorXd grad = V.transpose() * resid;
    int best = -1;
    double bestv = tol;
    for (int j = 0; j < n; ++j)
      if (!passive[j] && grad[j] > bestv) {
        bestv = grad[j];
        best = j;
      }
    if (best < 0) break;
    passive[best] = 1;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      std::vector<int> P;
      for (int j = 0; j < n; ++j)
        if (passive[j]) P.push_back(j);
      Eigen::MatrixXd VP(V.rows(), P.size());
      for (std::size_t k = 0; k < P.size(); ++k) VP.col(k) = V.col(P[k]);
      Eigen::VectorXd z =
          VP.completeOrthogonalDecomposition().solve(w);
      bool all_pos = true;
      for (std::size_t k = 0; k < P.size(); ++k)
        if (z[k] <= 0.0) all_pos = false;
      if (all_pos) {
        x.setZero();
        for (std::size_t k = 0; k < P.size(); ++k) x[P[k]] = z[k];
        break;
      }
      double step = 1.0;
      for (std::size_t k = 0; k < P.size(); ++k)
        if (z[k] <= 0.0)
          step = std::min(step, x[P[k]] / (x[P[k]] - z[k]));
      for (std::size_t k = 0; k < P.size(); ++k) {
        x[P[k]] += step * (z[k] - x[P[k]]);
        if (x[P[k]] <= tol) {
          x[P[k]] = 0.0;
          passive[P[k]] = 0;
        }
      }
    }
    resid = w - V * x;
  }
  return x;
}

}  // namespace detail

// Writes w as a nonnegative combination of at most lifted_dim decisions.
// Greedy support-shrinking pass first, exact NNLS over the enumerated set as
// a fallback.
inline std::pair<std::vector<Decision>, std::vector<double>> decompose(
    const DecisionSet& set, const HullRep& hull, const Eigen::VectorXd& w,
    long cap = enumeration_cap()) {
  int n = hull.lifted_dim;
  double scale = w.size() ? w.cwiseAbs().maxCoeff() : 0.0;
  std::vector<Decision> atoms;
  std::vector<double> weights;
  if (scale <= 0.0) return {atoms, weights};
  double tol_zero = 1e-9 * scale;

  // M annihilates the cone; used for the per-step sanity check.
  Eigen::MatrixXd M;
  double b2 = hull.b.squaredNorm();
  if (b2 > 0.0)
    M = hull.A - (hull.b * (hull.b.transpose() * hull.A)) / b2;
  else
    M = hull.A;

  Eigen::VectorXd r = w;
  bool ok = true;
  for (int step = 0; step < n + 1; ++step) {
    if (r.cwiseAbs().maxCoeff() <= tol_zero) break;
    std::vector<char> zero(n, 0);
    for (int j = 0; j < n; ++j)
      if (r[j] <= tol_zero) zero[j] = 1;
    Decision x;
    if (hull.affine) {
      const auto& L = hull.affine->first;
      std::vector<double> a(hull.orig_dim, 0.0);
      for (int j = 0; j < n; ++j)
        if (zero[j])
          for (int i = 0; i < hull.orig_dim; ++i) a[i] -= L(j, i);
      x = linear_max(set, a);
    } else {
      const Decision* best = nullptr;
      int best_cost = std::numeric_limits<int>::max();
      for (std::size_t k = 0; k < hull.vertices.size(); ++k) {
        int cost = zero[hull.orig_dim + static_cast<int>(k)] ? 1 : 0;
        for (int i = 0; i < hull.orig_dim; ++i)
          if (zero[i] && hull.vertices[k][i]) ++cost;
        if (cost < best_cost) {
          best_cost = cost;
          best = &hull.vertices[k];
        }
      }
      if (!best) {
        ok = false;
        break;
      }
      x = *best;
    }
    Eigen::VectorXd z = hull.lift(x);
    double alpha = std::numeric_limits<double>::infinity();
    bool uses_zero = false;
    for (int j = 0; j < n; ++j)
      if (z[j] > 0.5) {
        if (zero[j]) uses_zero = true;
        alpha = std::min(alpha, r[j]);
      }
    if (uses_zero || !(alpha > tol_zero)) {
      ok = false;
      break;
    }
    r -= alpha * z;
    if (r.minCoeff() < -1e-9 * scale ||
        (M.rows() && (M * r).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, scale))) {
      ok = false;
      break;
    }
    atoms.push_back(std::move(x));
    weights.push_back(alpha);
  }
  if (ok && r.cwiseAbs().maxCoeff() > tol_zero) ok = false;

  if (!ok) {
    atoms.clear();
    weights.clear();
    std::vector<Decision> all;
    try {
      all = enumerate_decisions(set, cap);
    } catch (const TooLarge&) {
      throw DecompositionFailure(
          "decompose: greedy failed and the set is too large to enumerate");
    }
    Eigen::MatrixXd V(n, all.size());
    for (std::size_t k = 0; k < all.size(); ++k) V.col(k) = hull.lift(all[k]);
    Eigen::VectorXd beta = detail::nnls(V, w);
    Eigen::VectorXd resid = w - V * beta;
    if (resid.cwiseAbs().maxCoeff() > 1e-6 * scale)
      throw DecompositionFailure("decompose: point is outside the decision cone");
    for (std::size_t k = 0; k < all.size(); ++k)
      if (beta[k] > 0.0) {
        atoms.push_back(all[k]);
        weights.push_back(beta[k]);
      }
  }

  // Reconstruction identity.
  Eigen::VectorXd recon = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < atoms.size(); ++k)
    recon += weights[k] * hull.lift(atoms[k]);
  if ((recon - w).cwiseAbs().maxCoeff() > 1e-6 * scale)
    throw DecompositionFailure("decompose: reconstruction drifted");
  return {atoms, weights};
}

// ---------------------------------------------------------------------------
// The solver loop

struct GLPGOptions {
  long max_iters = 200000;
  bool theoretical = false;
  bool plateau_stop = true;
  long plateau_window = 1000;
  double plateau_tol = 1e-7;
  long certify_every = 500;
  double eta0 = 2.0;
  long cap = enumeration_cap();
  std::optional<ApproxBlm> approx_blm;  // required when eps < 1
};

struct SolveStats {
  long iterations = 0;
  double final_violation = 0.0;
};

namespace detail {

// Certify max_x h_x(w) through the sweep and inflate until feasible. One pass
// suffices for integer gaps; the loop only mops up floating-point residue.
inline double certify_and_inflate(const SweepOracle& sweep, Eigen::VectorXd& w,
                                  const Theta& theta, const GapProfile& gaps,
                                  double eps, const ApproxBlm* oracle,
                                  int orig_dim) {
  double v = 0.0;
  for (int pass = 0; pass < 60; ++pass) {
    std::vector<double> head(w.data(), w.data() + orig_dim);
    MostViolated mv = sweep(head, oracle);
    double bound;
    if (eps == 1.0 && !oracle) {
      bound = mv.score;
    } else {
      Eigen::VectorXd scaled = eps * w;
      bound = violation(scaled, mv.x, gaps.items, gap(gaps, theta, mv.x));
    }
    v = bound;
    if (v <= 0.0) return v;
    w *= (1.0 + v);
  }
  throw NumericFailure("certify_and_inflate: violation did not clear");
}

}  // namespace detail

// Runs the penalized projected-subgradient loop and returns the inflated
// averaged iterate (lifted coordinates).
inline Eigen::VectorXd solve_reduced(const ReducedProblem& rp,
                                     const GLPGParams& params,
                                     const DecisionSet& set, const Theta& theta,
                                     const GLPGOptions& opts = {},
                                     SolveStats* stats = nullptr) {
  int n = rp.hull.lifted_dim;
  if (rp.floor_coords.empty()) return Eigen::VectorXd::Zero(n);
  const ApproxBlm* oracle = opts.approx_blm ? &*opts.approx_blm : nullptr;
  if (params.eps < 1.0 && !oracle)
    throw OracleUnavailable("solve_reduced: eps < 1 needs an approximate BLM oracle");

  FeasibleRegion region(set, rp);
  Projector proj(region);
  SweepOracle sweep(set, theta, rp.gaps, opts.cap);
  Eigen::VectorXd w =
      proj.project(Eigen::VectorXd::Constant(n, rp.w_floor), true);

  Eigen::VectorXd avg_sum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd best_candidate;
  double best_obj = std::numeric_limits<double>::infinity();
  std::deque<std::pair<double, double>> window;  // (running obj, last score)

  long budget = params.theoretical
                    ? static_cast<long>(std::min(params.iterations, 4.6e18))
                    : params.max_iters;
  long t_used = 0;
  for (long t = 1; t <= budget; ++t) {
    std::vector<double> head(w.data(), w.data() + rp.hull.orig_dim);
    MostViolated mv = sweep(head, oracle);
    double gap_xt = gap(rp.gaps, theta, mv.x);
    Eigen::VectorXd scaled = params.eps * w;
    double hval = violation(scaled, mv.x, rp.gaps.items, gap_xt);
    Eigen::VectorXd g = rp.q;
    if (hval > 0.0)
      g += params.lambda * params.eps *
           violation_gradient(scaled, mv.x, rp.gaps.items);
    if (params.theoretical) {
      w = proj.project(w - params.eta * g, false);
    } else {
      double gn = g.norm();
      if (gn > 0.0)
        w = proj.project(
            w - (opts.eta0 / std::sqrt(static_cast<double>(t)) / gn) * g, false);
    }
    avg_sum += w;
    t_used = t;

    if (!params.theoretical) {
      double obj_run = rp.q.dot(avg_sum) / static_cast<double>(t);
      window.emplace_back(obj_run, mv.score);
      if (static_cast<long>(window.size()) > params.plateau_window + 1)
        window.pop_front();
      if (opts.certify_every > 0 && t % opts.certify_every == 0) {
        Eigen::VectorXd cand = avg_sum / static_cast<double>(t);
        cand *= (1.0 + params.delta2);
        detail::certify_and_inflate(sweep, cand, theta, rp.gaps, params.eps,
                                    oracle, rp.hull.orig_dim);
        double obj = rp.q.dot(cand);
        if (obj < best_obj) {
          best_obj = obj;
          best_candidate = std::move(cand);
        }
      }
      if (params.plateau_stop &&
          static_cast<long>(window.size()) > params.plateau_window) {
        auto [o0, s0] = window.front();
        auto [o1, s1] = window.back();
        if (std::abs(o1 - o0) < params.plateau_tol &&
            std::abs(s1 - s0) < params.plateau_tol)
          break;
      }
    }
  }

  Eigen::VectorXd wbar = avg_sum / static_cast<double>(std::max<long>(t_used, 1));
  Eigen::VectorXd out = (1.0 + params.delta2) * wbar;
  double v = detail::certify_and_inflate(sweep, out, theta, rp.gaps, params.eps,
                                         oracle, rp.hull.orig_dim);
  if (!params.theoretical && best_candidate.size() &&
      best_obj < rp.q.dot(out))
    out = best_candidate;
  if (stats) {
    stats->iterations = t_used;
    stats->final_violation = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full pipeline

struct GLOutput {
  std::vector<Decision> atoms;
  std::vector<double> weights;
  Eigen::VectorXd w_bar_prime;  // lifted
  double objective = 0.0;       // sum of alpha_x * gap_x == q' w_bar_prime
  double certified_max_violation = 0.0;
  bool certified_by_enumeration = false;
  long iterations = 0;
  double wallclock_seconds = 0.0;
};

inline GLOutput solve(const DecisionSet& set, const Theta& theta, double delta,
                      double eps = 1.0, const GLPGOptions& opts = {}) {
  auto t0 = std::chrono::steady_clock::now();
  if (set.dimension() != theta.dimension())
    throw InvalidInstance("solve: theta length does not match the structure");
  Covering cov = check_covering(set);
  if (!cov.uncovered.empty()) {
    std::string msg = "solve: uncovered coordinates (drop them first):";
    for (int i : cov.uncovered) msg += " " + std::to_string(i);
    throw UncoveredCoordinate(msg);
  }

  GLOutput out;
  GapProfile gaps = analyze(set, theta, opts.cap);
  HullRep h = hull(set, opts.cap);
  out.w_bar_prime = Eigen::VectorXd::Zero(h.lifted_dim);
  if (gaps.items.empty()) {
    auto t1 = std::chrono::steady_clock::now();
    out.wallclock_seconds = std::chrono::duration<double>(t1 - t0).count();
    return out;
  }

  std::vector<Decision> sample;
  for (const auto& wtn : cov.witness)
    if (wtn) sample.push_back(*wtn);
  ReducedProblem rp = reduce(std::move(h), theta, gaps, sample);

  GLPGParams params = schedule(delta, eps, gaps.m, set.dimension(),
                               theta.max_abs(), rp.q.norm());
  params.theoretical = opts.theoretical;
  params.max_iters = opts.max_iters;
  params.plateau_stop = opts.plateau_stop;
  params.plateau_window = opts.plateau_window;
  params.plateau_tol = opts.plateau_tol;
  params.certify_every = opts.certify_every;
  params.eta0 = opts.eta0;

  SolveStats stats;
  out.w_bar_prime = solve_reduced(rp, params, set, theta, opts, &stats);
  out.iterations = stats.iterations;

  auto [atoms, weights] = decompose(set, rp.hull, out.w_bar_prime, opts.cap);
  out.atoms = std::move(atoms);
  out.weights = std::move(weights);

  double obj_atoms = 0.0;
  for (std::size_t k = 0; k < out.atoms.size(); ++k)
    obj_atoms += out.weights[k] * gap(gaps, theta, out.atoms[k]);
  double obj_q = rp.q.dot(out.w_bar_prime);
  if (std::abs(obj_atoms - obj_q) > 1e-6 * std::max(1.0, std::abs(obj_q)))
    throw IdentityViolation("solve: atom objective disagrees with q'w");
  out.objective = obj_atoms;

  // Certify the final point over the suboptimal decisions when enumerable
  // (optimal ones satisfy their constraint identically), else through the
  // sweep bound.
  try {
    auto all = enumerate_decisions(set, opts.cap);
    double worst = 0.0;
    bool any = false;
    for (const auto& x : all) {
      double g = gap(gaps, theta, x);
      if (g <= 0.0) continue;
      double h = violation(out.w_bar_prime, x, gaps.items, g);
      worst = any ? std::max(worst, h) : h;
      any = true;
    }
    out.certified_max_violation = worst;
    out.certified_by_enumeration = true;
  } catch (const TooLarge&) {
    std::vector<double> head(out.w_bar_prime.data(),
                             out.w_bar_prime.data() + rp.hull.orig_dim);
    out.certified_max_violation =
        most_violated(set, head, theta, gaps, params.eps,
                      opts.approx_blm ? &*opts.approx_blm : nullptr)
            .score;
    out.certified_by_enumeration = false;
  }
  auto t1 = std::chrono::steady_clock::now();
  out.wallclock_seconds = std::chrono::duration<double>(t1 - t0).count();
  return out;
}

}  // namespace glkit
