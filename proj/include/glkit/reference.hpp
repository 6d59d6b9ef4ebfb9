#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "glkit/errors.hpp"
#include "glkit/structures.hpp"

namespace glkit {

// Certified solution of the exploration program over an enumerated decision
// set. Deliberately shares no code with the polynomial-time solver: it works
// in allocation space with the full constraint list.
struct BruteForceResult {
  double C = 0.0;                     // optimal objective
  std::vector<double> w;              // induced rates, original coordinates
  std::vector<double> slacks;         // gap^2 - sum_i x_i/w_i per constraint
  std::vector<Decision> support;      // decisions with positive allocation
  std::vector<double> alpha;          // matching allocations
  double kkt_residual = 0.0;
  std::string method;                 // "closed-form" or "dense-descent"
};

namespace detail {

struct EnumeratedInstance {
  std::vector<Decision> all;
  std::vector<int> items;        // I, 0-based
  double opt = 0.0;
  std::vector<double> gaps;      // per decision in `all`
  double delta_min = std::numeric_limits<double>::infinity();
  // decisions that are suboptimal and touch I: both the variables and the
  // binding constraints of the reduced program
  std::vector<int> explorers;
};

inline EnumeratedInstance enumerate_instance(const DecisionSet& set,
                                             const std::vector<double>& theta,
                                             long cap) {
  EnumeratedInstance inst;
  inst.all = enumerate_decisions(set, cap);
  if (inst.all.empty()) throw EmptySet("brute force: empty decision set");
  double opt = -std::numeric_limits<double>::infinity();
  for (const auto& x : inst.all) opt = std::max(opt, dot(theta, x));
  inst.opt = opt;
  double tol = 1e-9 * std::max(1.0, std::abs(opt));
  int d = set.dimension();
  std::vector<char> in_some_optimal(d, 0);
  for (const auto& x : inst.all) {
    inst.gaps.push_back(opt - dot(theta, x));
    if (inst.gaps.back() <= tol)
      for (int i = 0; i < d; ++i)
        if (x[i]) in_some_optimal[i] = 1;
  }
  for (int i = 0; i < d; ++i) {
    bool covered = false;
    for (const auto& x : inst.all)
      if (x[i]) covered = true;
    if (covered && !in_some_optimal[i]) inst.items.push_back(i);
  }
  for (std::size_t k = 0; k < inst.all.size(); ++k) {
    if (inst.gaps[k] <= tol) continue;
    inst.delta_min = std::min(inst.delta_min, inst.gaps[k]);
    bool touches = false;
    for (int i : inst.items)
      if (inst.all[k][i]) touches = true;
    if (touches) inst.explorers.push_back(static_cast<int>(k));
  }
  return inst;
}

}  // namespace detail

// Max violation h_x(w) over the suboptimal decisions by enumeration (the
// constraints of optimal decisions are vacuously 0 <= 0); +inf when a
// required rate is zero, 0 when every decision is optimal.
inline double check_feasible(const DecisionSet& set,
                             const std::vector<double>& theta,
                             const std::vector<double>& w,
                             long cap = enumeration_cap()) {
  auto inst = detail::enumerate_instance(set, theta, cap);
  double gap_tol = 1e-9 * std::max(1.0, std::abs(inst.opt));
  double worst = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < inst.all.size(); ++k) {
    if (inst.gaps[k] <= gap_tol) continue;
    double s = 0.0;
    for (int i : inst.items) {
      if (!inst.all[k][i]) continue;
      if (!(w[i] > 0.0)) {
        s = std::numeric_limits<double>::infinity();
        break;
      }
      s += 1.0 / w[i];
    }
    double h = s - inst.gaps[k] * inst.gaps[k];
    worst = any ? std::max(worst, h) : h;
    any = true;
  }
  return worst;
}

// One-sets collapse to independent constraints 1/alpha_i <= gap_i^2.
inline BruteForceResult closed_form_1set(const std::vector<double>& theta) {
  int d = static_cast<int>(theta.size());
  double opt = *std::max_element(theta.begin(), theta.end());
  BruteForceResult r;
  r.method = "closed-form";
  r.w.assign(d, 0.0);
  for (int i = 0; i < d; ++i) {
    double g = opt - theta[i];
    if (g <= 0.0) continue;
    double a = 1.0 / (g * g);
    r.w[i] = a;
    r.C += 1.0 / g;
    Decision x(d, 0);
    x[i] = 1;
    r.support.push_back(std::move(x));
    r.alpha.push_back(a);
    r.slacks.push_back(0.0);  // the closed form is tight
  }
  return r;
}

namespace detail {

// Shared state for the allocation-space program restricted to explorers.
struct AllocProgram {
  const EnumeratedInstance* inst;
  int K;                       // number of explorer decisions
  int nI;                      // |I|
  Eigen::MatrixXd Y;           // K x nI incidence on I
  Eigen::VectorXd cost;        // gaps of explorers

  explicit AllocProgram(const EnumeratedInstance& e) : inst(&e) {
    K = static_cast<int>(e.explorers.size());
    nI = static_cast<int>(e.items.size());
    Y.resize(K, nI);
    cost.resize(K);
    for (int k = 0; k < K; ++k) {
      const Decision& x = e.all[e.explorers[k]];
      for (int j = 0; j < nI; ++j) Y(k, j) = x[e.items[j]];
      cost[k] = e.gaps[e.explorers[k]];
    }
  }

  Eigen::VectorXd rates(const Eigen::VectorXd& alpha) const {
    return Y.transpose() * alpha;  // w restricted to I
  }
  // h for every explorer constraint
  Eigen::VectorXd constraint_values(const Eigen::VectorXd& wI) const {
    Eigen::VectorXd h(K);
    for (int k = 0; k < K; ++k) {
      double s = 0.0;
      for (int j = 0; j < nI; ++j)
        if (Y(k, j) > 0.0) s += 1.0 / wI[j];
      h[k] = s - cost[k] * cost[k];
    }
    return h;
  }
  Eigen::VectorXd constraint_grad(const Eigen::VectorXd& wI, int k) const {
    Eigen::VectorXd dk(nI);
    for (int j = 0; j < nI; ++j) dk[j] = Y(k, j) / (wI[j] * wI[j]);
    return -Y * dk;
  }
};

inline double barrier_obj(const AllocProgram& prog, const Eigen::VectorXd& alpha,
                          double t) {
  for (int k = 0; k < prog.K; ++k)
    if (!(alpha[k] > 0.0)) return std::numeric_limits<double>::infinity();
  Eigen::VectorXd wI = prog.rates(alpha);
  for (int j = 0; j < prog.nI; ++j)
    if (!(wI[j] > 0.0)) return std::numeric_limits<double>::infinity();
  Eigen::VectorXd h = prog.constraint_values(wI);
  double f = t * prog.cost.dot(alpha);
  for (int k = 0; k < prog.K; ++k) {
    if (!(h[k] < 0.0)) return std::numeric_limits<double>::infinity();
    f -= std::log(-h[k]);
    f -= std::log(alpha[k]);
  }
  return f;
}

inline double grad_entry(const AllocProgram& prog, const Eigen::VectorXd& wI,
                         int constraint, int var) {
  double s = 0.0;
  for (int j = 0; j < prog.nI; ++j)
    if (prog.Y(constraint, j) > 0.0 && prog.Y(var, j) > 0.0)
      s += 1.0 / (wI[j] * wI[j]);
  return -s;
}

// Damped Newton on stationarity over the support plus activity of the chosen
// constraints. Updates (as, nu) in place; returns whether it converged.
inline bool newton_kkt(const AllocProgram& prog, const std::vector<int>& sup,
                       const std::vector<int>& act, Eigen::VectorXd& as,
                       Eigen::VectorXd& nu) {
  int ns = static_cast<int>(sup.size()), na = static_cast<int>(act.size());
  auto assemble = [&](const Eigen::VectorXd& as_cur, const Eigen::VectorXd& nu_cur,
                      Eigen::VectorXd& G) -> bool {
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(prog.K);
    for (int i = 0; i < ns; ++i) alpha[sup[i]] = as_cur[i];
    Eigen::VectorXd wI = prog.rates(alpha);
    for (int j = 0; j < prog.nI; ++j)
      if (!(wI[j] > 0.0)) return false;
    Eigen::VectorXd h = prog.constraint_values(wI);
    G.resize(ns + na);
    for (int i = 0; i < ns; ++i) {
      double v = prog.cost[sup[i]];
      for (int j = 0; j < na; ++j)
        v += nu_cur[j] * grad_entry(prog, wI, act[j], sup[i]);
      G[i] = v;
    }
    for (int j = 0; j < na; ++j) G[ns + j] = h[act[j]];
    return true;
  };

  Eigen::VectorXd G;
  if (!assemble(as, nu, G)) return false;
  double scale = std::max(1.0, prog.cost.maxCoeff());
  for (int iter = 0; iter < 60; ++iter) {
    if (G.cwiseAbs().maxCoeff() <= 1e-12 * scale) return true;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(prog.K);
    for (int i = 0; i < ns; ++i) alpha[sup[i]] = as[i];
    Eigen::VectorXd wI = prog.rates(alpha);
    // kappa' for the curvature block
    Eigen::VectorXd kp = Eigen::VectorXd::Zero(prog.nI);
    for (int j = 0; j < prog.nI; ++j) {
      double nusum = 0.0;
      for (int k = 0; k < na; ++k) nusum += nu[k] * prog.Y(act[k], j);
      kp[j] = 2.0 * nusum / std::pow(wI[j], 3);
    }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(ns + na, ns + na);
    for (int i = 0; i < ns; ++i)
      for (int i2 = 0; i2 < ns; ++i2) {
        double v = 0.0;
        for (int j = 0; j < prog.nI; ++j)
          if (prog.Y(sup[i], j) > 0.0 && prog.Y(sup[i2], j) > 0.0) v += kp[j];
        J(i, i2) = v;
      }
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j < na; ++j) {
        double v = grad_entry(prog, wI, act[j], sup[i]);
        J(i, ns + j) = v;
        J(ns + j, i) = v;
      }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(J);
    Eigen::VectorXd step = cod.solve(-G);
    double a = 1.0;
    double g0 = G.norm();
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      Eigen::VectorXd as_n = as + a * step.head(ns);
      Eigen::VectorXd nu_n = nu + a * step.tail(na);
      Eigen::VectorXd Gn;
      if (assemble(as_n, nu_n, Gn) && Gn.norm() < (1.0 - 1e-4 * a) * g0) {
        as = as_n;
        nu = nu_n;
        G = Gn;
        moved = true;
        break;
      }
      a *= 0.5;
    }
    if (!moved) return G.cwiseAbs().maxCoeff() <= 1e-9 * scale;
  }
  return G.cwiseAbs().maxCoeff() <= 1e-9 * scale;
}

inline double kkt_residual(const AllocProgram& prog, const Eigen::VectorXd& alpha,
                           const std::vector<int>& act,
                           const Eigen::VectorXd& nu) {
  Eigen::VectorXd wI = prog.rates(alpha);
  Eigen::VectorXd h = prog.constraint_values(wI);
  double r = 0.0;
  for (int k = 0; k < prog.K; ++k) r = std::max(r, h[k]);  // feasibility
  for (int j = 0; j < static_cast<int>(act.size()); ++j) {
    r = std::max(r, -nu[j]);                            // dual sign
    r = std::max(r, std::abs(nu[j] * h[act[j]]));       // complementarity
  }
  for (int k = 0; k < prog.K; ++k) {
    double rc = prog.cost[k];
    for (int j = 0; j < static_cast<int>(act.size()); ++j)
      rc += nu[j] * grad_entry(prog, wI, act[j], k);
    if (alpha[k] > 0.0)
      r = std::max(r, std::abs(rc));  // stationarity on the support
    else
      r = std::max(r, -rc);           // reduced cost off the support
  }
  return r;
}

}  // namespace detail

// Solves the exploration program exactly on an enumerable instance.
// Projected subgradient on the unpenalized max-violation function provides a
// warm start; a log-barrier pass and an exact KKT polish certify the result.
inline BruteForceResult brute_force_gl(const DecisionSet& set,
                                       const std::vector<double>& theta,
                                       double tol = 1e-8, long cap = 500) {
  auto inst = detail::enumerate_instance(set, theta, cap);
  int d = set.dimension();
  BruteForceResult res;
  res.method = "dense-descent";
  res.w.assign(d, 0.0);
  if (inst.items.empty()) return res;  // nothing requires exploration

  detail::AllocProgram prog(inst);
  int K = prog.K, nI = prog.nI;
  double dmin2 = inst.delta_min * inst.delta_min;

  // Strictly feasible uniform start.
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(K, 2.0 * d / dmin2);

  // Phase 1: alternating projected subgradient, diminishing steps.
  {
    double radius = alpha.lpNorm<Eigen::Infinity>() + 1.0;
    Eigen::VectorXd best = alpha;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int t = 1; t <= 20000; ++t) {
      Eigen::VectorXd wI = prog.rates(alpha);
      Eigen::VectorXd h = prog.constraint_values(wI);
      int worst;
      double hmax = h.maxCoeff(&worst);
      Eigen::VectorXd g =
          hmax > 0.0 ? prog.constraint_grad(wI, worst) : prog.cost;
      double gn = g.norm();
      if (gn > 0.0) alpha -= (radius / std::sqrt(double(t)) / gn) * g;
      alpha = alpha.cwiseMax(0.0);
      if (hmax <= 0.0) {
        double obj = prog.cost.dot(alpha);
        if (obj < best_obj) {
          best_obj = obj;
          best = alpha;
        }
      }
    }
    if (best_obj < std::numeric_limits<double>::infinity()) alpha = best;
  }

  // Feasibility polish: scaling up can only relax the reciprocal constraints.
  {
    Eigen::VectorXd wI = prog.rates(alpha);
    double f = 1.0;
    for (int k = 0; k < K; ++k) {
      double s = 0.0;
      bool dead = false;
      for (int j = 0; j < nI; ++j)
        if (prog.Y(k, j) > 0.0) {
          if (!(wI[j] > 0.0)) dead = true;
          else s += 1.0 / wI[j];
        }
      if (dead) {
        f = -1.0;
        break;
      }
      f = std::max(f, s / (prog.cost[k] * prog.cost[k]));
    }
    if (f < 0.0)
      alpha = Eigen::VectorXd::Constant(K, 2.0 * d / dmin2);
    else
      alpha *= f * (1.0 + 1e-9);
    alpha = alpha.cwiseMax(1e-10 * alpha.maxCoeff());
  }

  // Phase 2: log-barrier path following in allocation space.
  {
    double t = 1.0;
    const double mu = 30.0;
    double c_scale = std::max(1.0, prog.cost.dot(alpha));
    double t_final = (2.0 * K) / std::max(tol * 1e-2 * c_scale, 1e-13);
    while (true) {
      for (int it = 0; it < 80; ++it) {
        Eigen::VectorXd wI = prog.rates(alpha);
        Eigen::VectorXd h = prog.constraint_values(wI);
        // gradient and factored Hessian
        Eigen::VectorXd grad = t * prog.cost - alpha.cwiseInverse();
        Eigen::VectorXd kappa = Eigen::VectorXd::Zero(nI);
        Eigen::MatrixXd S1 = Eigen::MatrixXd::Zero(nI, nI);
        for (int k = 0; k < K; ++k) {
          Eigen::VectorXd dk(nI);
          for (int j = 0; j < nI; ++j) dk[j] = prog.Y(k, j) / (wI[j] * wI[j]);
          grad += (prog.Y * dk) / h[k];  // = grad h_k / (-h_k)
          S1 += dk * dk.transpose() / (h[k] * h[k]);
          for (int j = 0; j < nI; ++j)
            kappa[j] += prog.Y(k, j) * (2.0 / std::pow(wI[j], 3)) / (-h[k]);
        }
        Eigen::MatrixXd H =
            prog.Y * (S1 + Eigen::MatrixXd(kappa.asDiagonal())) *
            prog.Y.transpose();
        H.diagonal() += alpha.cwiseInverse().cwiseAbs2();
        H.diagonal().array() += 1e-13 * (H.trace() / K + 1.0);
        Eigen::VectorXd step = H.ldlt().solve(-grad);
        double decr = -grad.dot(step);
        if (!(decr > 1e-13 * c_scale * std::max(1.0, t))) break;
        // keep alpha > 0 and h < 0 strictly
        double amax = 1.0;
        for (int k = 0; k < K; ++k)
          if (step[k] < 0.0) amax = std::min(amax, -0.99 * alpha[k] / step[k]);
        double a = amax;
        double f0 = barrier_obj(prog, alpha, t);
        for (int ls = 0; ls < 50; ++ls) {
          Eigen::VectorXd an = alpha + a * step;
          double f1 = barrier_obj(prog, an, t);
          if (f1 < f0) {
            alpha = an;
            break;
          }
          a *= 0.5;
        }
      }
      if (t >= t_final) break;
      t = std::min(t * mu, t_final);
    }
  }

  // Exact KKT polish: equalities on near-active constraints, then verify.
  double residual = std::numeric_limits<double>::infinity();
  {
    Eigen::VectorXd wI = prog.rates(alpha);
    Eigen::VectorXd h = prog.constraint_values(wI);
    double hscale = std::max(1.0, h.cwiseAbs().maxCoeff());
    std::vector<int> act, sup;
    for (int k = 0; k < K; ++k) {
      if (h[k] > -1e-5 * hscale) act.push_back(k);
      if (alpha[k] > 1e-7 * alpha.maxCoeff()) sup.push_back(k);
    }
    for (int round = 0; round < 25 && !act.empty() && !sup.empty(); ++round) {
      int ns = static_cast<int>(sup.size()), na = static_cast<int>(act.size());
      Eigen::VectorXd nu = Eigen::VectorXd::Constant(na, 1.0);
      Eigen::VectorXd as(ns);
      for (int i = 0; i < ns; ++i) as[i] = alpha[sup[i]];
      bool ok = newton_kkt(prog, sup, act, as, nu);
      if (!ok) break;
      Eigen::VectorXd cand = Eigen::VectorXd::Zero(K);
      for (int i = 0; i < ns; ++i) cand[sup[i]] = as[i];
      // set adjustments
      bool changed = false;
      for (int i = ns - 1; i >= 0; --i)
        if (as[i] < 0.0) {
          sup.erase(sup.begin() + i);
          changed = true;
        }
      for (int j = na - 1; j >= 0; --j)
        if (nu[j] < -1e-10) {
          act.erase(act.begin() + j);
          changed = true;
        }
      if (!changed) {
        Eigen::VectorXd wc = prog.rates(cand);
        Eigen::VectorXd hc = prog.constraint_values(wc);
        for (int k = 0; k < K; ++k)
          if (hc[k] > 1e-11 * hscale &&
              std::find(act.begin(), act.end(), k) == act.end()) {
            act.push_back(k);
            changed = true;
          }
        // reduced costs of zero allocations
        if (!changed) {
          for (int k = 0; k < K; ++k) {
            if (std::find(sup.begin(), sup.end(), k) != sup.end()) continue;
            double rc = prog.cost[k];
            for (int j = 0; j < na; ++j)
              rc += nu[j] * grad_entry(prog, wc, act[j], k);
            if (rc < -1e-9 * std::max(1.0, prog.cost[k])) {
              sup.push_back(k);
              changed = true;
            }
          }
        }
        if (!changed) {
          alpha = cand;
          residual = kkt_residual(prog, alpha, act, nu);
          break;
        }
      }
      std::sort(act.begin(), act.end());
      std::sort(sup.begin(), sup.end());
    }
    if (!std::isfinite(residual)) {
      // fall back to the barrier point, measured honestly
      Eigen::VectorXd wf = prog.rates(alpha);
      Eigen::VectorXd hf = prog.constraint_values(wf);
      residual = std::max(0.0, hf.maxCoeff());
    }
  }
  if (residual > tol)
    throw NumericFailure("brute_force_gl: could not certify to tolerance");

  res.kkt_residual = residual;
  res.C = prog.cost.dot(alpha);
  for (int k = 0; k < K; ++k) {
    const Decision& x = inst.all[inst.explorers[k]];
    if (alpha[k] > 0.0) {
      res.support.push_back(x);
      res.alpha.push_back(alpha[k]);
      for (int i = 0; i < d; ++i)
        if (x[i]) res.w[i] += alpha[k];
    }
  }
  for (std::size_t k = 0; k < inst.all.size(); ++k) {
    double s = 0.0;
    for (int i : inst.items)
      if (inst.all[k][i]) s += res.w[i] > 0.0
                                   ? 1.0 / res.w[i]
                                   : std::numeric_limits<double>::infinity();
    res.slacks.push_back(inst.gaps[k] * inst.gaps[k] - s);
  }
  return res;
}

}  // namespace glkit
