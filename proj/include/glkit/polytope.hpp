#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "glkit/errors.hpp"
#include "glkit/hull.hpp"
#include "glkit/instance.hpp"
#include "glkit/structures.hpp"

namespace glkit {

struct PolytopeTolerances {
  double feasibility = 1e-9;   // |Mw| and bound violations of projections
  double kkt_rel = 1e-6;       // relative KKT residual of projections
  double identity = 1e-9;      // sampled q'lift(x) = gap identity
};

inline PolytopeTolerances& polytope_tolerances() {
  static PolytopeTolerances tol;
  return tol;
}

// The reduced problem of the dimensionality reduction: M annihilates lifted
// decisions and q'lift(x) equals the reward gap of x.
struct ReducedProblem {
  Eigen::MatrixXd M;             // rows x lifted_dim
  Eigen::VectorXd q;             // lifted_dim
  double w_floor = 0.0;          // (m ||theta||_inf)^-2
  std::vector<int> floor_coords; // the set I (original coordinates)
  HullRep hull;
  GapProfile gaps;
};

inline ReducedProblem reduce(HullRep hull, const Theta& theta,
                             GapProfile gaps,
                             const std::vector<Decision>& sample = {}) {
  ReducedProblem rp;
  int n = hull.lifted_dim;
  double b2 = hull.b.squaredNorm();
  Eigen::VectorXd theta_lifted = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < hull.orig_dim; ++i)
    theta_lifted[i] = static_cast<double>(theta.values[i]);
  if (b2 > 0.0) {
    Eigen::RowVectorXd btA = hull.b.transpose() * hull.A;
    rp.M = hull.A - (hull.b * btA) / b2;
    rp.q = (static_cast<double>(gaps.opt_value) / b2) * btA.transpose() -
           theta_lifted;
  } else {
    rp.M = hull.A;
    rp.q = -theta_lifted;
  }
  rp.w_floor = 1.0 / std::pow(static_cast<double>(gaps.m) *
                                  static_cast<double>(theta.max_abs()),
                              2.0);
  rp.floor_coords = gaps.items;
  rp.gaps = std::move(gaps);

  // Sampled identity check: a failure here means the hull is not the hull.
  auto check = [&](const Decision& x) {
    Eigen::VectorXd z = hull.lift(x);
    double lhs = rp.q.dot(z);
    double g = static_cast<double>(rp.gaps.opt_value - dot(theta.values, x));
    if (std::abs(lhs - g) > polytope_tolerances().identity * std::max(1.0, std::abs(g)))
      throw IdentityViolation("reduce: q'lift(x) != gap(x) on a sampled decision");
  };
  check(rp.gaps.x_star);
  for (const auto& x : sample) check(x);
  rp.hull = std::move(hull);
  return rp;
}

// Constraint value h_x(w) = sum_{i in I} x_i / w_i - gap^2. Takes the lifted
// (or original) point; only the first orig_dim coordinates participate.
inline double violation(const Eigen::VectorXd& w, const Decision& x,
                        const std::vector<int>& items, double gap_x) {
  double s = 0.0;
  for (int i : items) {
    if (!x[i]) continue;
    if (!(w[i] > 0.0))
      throw DivisionGuard("violation: nonpositive w on a required coordinate");
    s += 1.0 / w[i];
  }
  return s - gap_x * gap_x;
}

// grad h_x(w) restricted to I, as a lifted-size vector.
inline Eigen::VectorXd violation_gradient(const Eigen::VectorXd& w,
                                          const Decision& x,
                                          const std::vector<int>& items) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(w.size());
  for (int i : items)
    if (x[i]) g[i] = -1.0 / (w[i] * w[i]);
  return g;
}

// ---------------------------------------------------------------------------
// Feasible region { w : M w = 0, w >= 0, w_i >= w_floor on I } and the
// orthogonal projection onto it.

class FeasibleRegion {
 public:
  FeasibleRegion(const DecisionSet& set, const ReducedProblem& rp) {
    n_ = rp.hull.lifted_dim;
    lower_ = Eigen::VectorXd::Zero(n_);
    for (int i : rp.floor_coords) lower_[i] = rp.w_floor;

    // Generators: one decision with lift_j = 1 per lifted coordinate, when
    // one exists. Coordinates no decision touches are pinned to zero.
    std::vector<Decision> gens = collect_generators(set, rp.hull);
    pinned_.assign(n_, 0);
    Eigen::VectorXd hits = Eigen::VectorXd::Zero(n_);
    interior_ = Eigen::VectorXd::Zero(n_);
    for (const auto& x : gens) interior_ += rp.hull.lift(x);
    for (int j = 0; j < n_; ++j)
      if (interior_[j] <= 0.0) pinned_[j] = 1;
    for (int i : rp.floor_coords)
      if (pinned_[i])
        throw UncoveredCoordinate(
            "region: a floor coordinate is identically zero over X");
    interior_ *= 2.0 * std::max(rp.w_floor, 1e-12);

    int extra = static_cast<int>(std::count(pinned_.begin(), pinned_.end(), 1));
    meq_.resize(rp.M.rows() + extra, n_);
    meq_.topRows(rp.M.rows()) = rp.M;
    int r = static_cast<int>(rp.M.rows());
    for (int j = 0; j < n_; ++j)
      if (pinned_[j]) {
        meq_.row(r).setZero();
        meq_(r, j) = 1.0;
        ++r;
      }
    zero_m_ = (rp.M.cwiseAbs().maxCoeff() == 0.0) && extra == 0;
  }

  int dim() const { return n_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& interior() const { return interior_; }
  const Eigen::MatrixXd& equalities() const { return meq_; }
  bool trivial_equalities() const { return zero_m_; }
  bool pinned(int j) const { return pinned_[j] != 0; }

 private:
  static std::vector<Decision> collect_generators(const DecisionSet& set,
                                                  const HullRep& hull) {
    std::vector<Decision> gens;
    if (!hull.vertices.empty()) {
      gens = hull.vertices;  // explicit sets are desk scale by construction
    } else {
      Covering cov = check_covering(set);
      for (const auto& w : cov.witness)
        if (w) gens.push_back(*w);
      // Slack coordinates: maximize each affine slack row over X.
      const auto& [L, c] = *hull.affine;
      for (int j = set.dimension(); j < hull.lifted_dim; ++j) {
        std::vector<double> a(set.dimension());
        for (int i = 0; i < set.dimension(); ++i) a[i] = L(j, i);
        Decision x = linear_max(set, a);
        Eigen::VectorXd z = hull.lift(x);
        if (z[j] > 0.0) gens.push_back(std::move(x));
      }
    }
    std::sort(gens.begin(), gens.end());
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
    if (gens.empty()) throw EmptySet("region: decision set is empty");
    return gens;
  }

  int n_ = 0;
  Eigen::VectorXd lower_;
  Eigen::VectorXd interior_;
  Eigen::MatrixXd meq_;
  std::vector<char> pinned_;
  bool zero_m_ = false;
};

// Projection via a log-barrier interior path with Newton steps on the
// equality-constrained subproblem, then an active-set polish that solves the
// exact KKT system. Holds a warm start; one projector per solver run.
class Projector {
 public:
  explicit Projector(const FeasibleRegion& region) : region_(&region) {}

  Eigen::VectorXd project(const Eigen::VectorXd& y, bool polish = true) {
    const FeasibleRegion& R = *region_;
    if (R.trivial_equalities()) return y.cwiseMax(R.lower());

    Eigen::VectorXd w = start_point();
    const Eigen::MatrixXd& Meq = R.equalities();
    int n = R.dim();

    double t = warm_.size() ? 100.0 : 1.0;
    const double mu = 30.0;
    const double t_final = polish ? 1e9 : 1e6;
    while (true) {
      newton_center(w, y, t);
      if (t >= t_final) break;
      t = std::min(t * mu, t_final);
    }
    if (polish) {
      auto exact = active_set_polish(w, y);
      if (exact) w = *exact;
      // else: keep the barrier point; tolerances are checked by callers
    }
    // Warm start stays strictly inside the bounds.
    warm_ = 0.999 * w + 0.001 * R.interior();
    (void)Meq;
    (void)n;
    return w;
  }

  void reset_warm() { warm_.resize(0); }

 private:
  Eigen::VectorXd start_point() const {
    const FeasibleRegion& R = *region_;
    if (!warm_.size()) return R.interior();
    // The stored warm point is strictly feasible by construction.
    return warm_;
  }

  // Minimize (t/2)||w - y||^2 - sum log(w_j - l_j) over {Meq w = 0}.
  void newton_center(Eigen::VectorXd& w, const Eigen::VectorXd& y, double t) {
    const FeasibleRegion& R = *region_;
    const Eigen::MatrixXd& Meq = R.equalities();
    const Eigen::VectorXd& l = R.lower();
    int n = R.dim();
    int rows = static_cast<int>(Meq.rows());
    for (int iter = 0; iter < 60; ++iter) {
      Eigen::VectorXd dinv(n), g(n);
      for (int j = 0; j < n; ++j) {
        if (R.pinned(j)) {
          dinv[j] = 1.0 / t;
          g[j] = t * (w[j] - y[j]);
        } else {
          double m = w[j] - l[j];
          dinv[j] = 1.0 / (t + 1.0 / (m * m));
          g[j] = t * (w[j] - y[j]) - 1.0 / m;
        }
      }
      Eigen::MatrixXd S(rows, rows);
      S.noalias() = Meq * dinv.asDiagonal() * Meq.transpose();
      double ridge = 1e-13 * (S.trace() / rows + 1.0);
      S.diagonal().array() += ridge;
      // min 1/2 d'Dd + g'd  s.t.  Meq d = -resid, solved via the diagonal
      // Schur complement: S nu = resid - Meq D^-1 g, d = -D^-1(g + Meq' nu).
      Eigen::VectorXd resid = Meq * w;
      Eigen::VectorXd rhs = resid - Meq * dinv.cwiseProduct(g);
      Eigen::VectorXd nu = S.ldlt().solve(rhs);
      Eigen::VectorXd d = -dinv.cwiseProduct(g + Meq.transpose() * nu);

      double decrement = -g.dot(d);
      if (!(decrement > 1e-12 * (1.0 + std::abs(g.dot(w))))) break;

      // Longest step keeping strict interior.
      double amax = 1.0;
      for (int j = 0; j < n; ++j) {
        if (R.pinned(j)) continue;
        if (d[j] < 0.0) amax = std::min(amax, -0.99 * (w[j] - l[j]) / d[j]);
      }
      double a = amax;
      double f0 = barrier_value(w, y, t);
      for (int ls = 0; ls < 40; ++ls) {
        Eigen::VectorXd wn = w + a * d;
        double f1 = barrier_value(wn, y, t);
        if (f1 <= f0 - 1e-4 * a * decrement) {
          w = wn;
          break;
        }
        a *= 0.5;
        if (ls == 39) return;  // no progress possible
      }
    }
  }

  double barrier_value(const Eigen::VectorXd& w, const Eigen::VectorXd& y,
                       double t) const {
    const FeasibleRegion& R = *region_;
    double f = 0.5 * t * (w - y).squaredNorm();
    for (int j = 0; j < R.dim(); ++j) {
      if (R.pinned(j)) continue;
      double m = w[j] - R.lower()[j];
      if (!(m > 0.0)) return std::numeric_limits<double>::infinity();
      f -= std::log(m);
    }
    return f;
  }

  // Exact equality-constrained solve with the active bound set guessed from
  // the barrier point, then primal/dual updates until the KKT signs hold.
  std::optional<Eigen::VectorXd> active_set_polish(const Eigen::VectorXd& w0,
                                                   const Eigen::VectorXd& y) {
    const FeasibleRegion& R = *region_;
    const Eigen::MatrixXd& Meq = R.equalities();
    const Eigen::VectorXd& l = R.lower();
    int n = R.dim();
    int rows = static_cast<int>(Meq.rows());
    double scale = std::max(1.0, w0.cwiseAbs().maxCoeff());

    std::vector<int> active;
    for (int j = 0; j < n; ++j)
      if (!R.pinned(j) && w0[j] - l[j] < 1e-6 * scale) active.push_back(j);

    for (int round = 0; round < 200; ++round) {
      int na = static_cast<int>(active.size());
      Eigen::MatrixXd G(rows + na, rows + na);
      Eigen::VectorXd rhs(rows + na);
      G.topLeftCorner(rows, rows).noalias() = Meq * Meq.transpose();
      for (int k = 0; k < na; ++k) {
        G.block(0, rows + k, rows, 1) = Meq.col(active[k]);
        G.block(rows + k, 0, 1, rows) = Meq.col(active[k]).transpose();
        for (int k2 = 0; k2 < na; ++k2)
          G(rows + k, rows + k2) = (active[k] == active[k2]) ? 1.0 : 0.0;
      }
      rhs.head(rows) = Meq * y;
      for (int k = 0; k < na; ++k) rhs[rows + k] = y[active[k]] - l[active[k]];
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(G);
      Eigen::VectorXd z = cod.solve(rhs);
      Eigen::VectorXd w = y - Meq.transpose() * z.head(rows);
      for (int k = 0; k < na; ++k) w[active[k]] -= z[rows + k];

      // Most violated inactive bound, most wrong-signed multiplier.
      int worst_primal = -1, worst_dual = -1;
      double pv = 1e-11 * scale, dv = 1e-11 * scale;
      for (int j = 0; j < n; ++j) {
        if (R.pinned(j)) continue;
        if (std::find(active.begin(), active.end(), j) != active.end()) continue;
        double viol = l[j] - w[j];
        if (viol > pv) {
          pv = viol;
          worst_primal = j;
        }
      }
      for (int k = 0; k < na; ++k) {
        // mu_k = z[rows + k] must be <= 0 for w_j >= l_j active constraints
        if (z[rows + k] > dv) {
          dv = z[rows + k];
          worst_dual = k;
        }
      }
      if (worst_primal < 0 && worst_dual < 0) return w;
      if (worst_primal >= 0) {
        active.push_back(worst_primal);
        std::sort(active.begin(), active.end());
      } else {
        active.erase(active.begin() + worst_dual);
      }
    }
    return std::nullopt;
  }

  const FeasibleRegion* region_;
  Eigen::VectorXd warm_;
};

}  // namespace glkit
