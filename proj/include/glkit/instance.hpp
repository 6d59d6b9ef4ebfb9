#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "glkit/errors.hpp"
#include "glkit/structures.hpp"

namespace glkit {

// Mean-reward vector in the positive-integer form the solver works with,
// optionally remembering the real-valued origin it was discretized from.
struct Theta {
  std::vector<long> values;
  std::optional<std::vector<double>> real_origin;
  std::optional<double> epsilon;
  // Set when epsilon could not be certified against delta_min/(2m).
  bool discretization_warning = false;

  long max_abs() const {
    long v = 0;
    for (long t : values) v = std::max(v, std::abs(t));
    return v;
  }
  std::vector<double> as_doubles() const {
    return std::vector<double>(values.begin(), values.end());
  }
  int dimension() const { return static_cast<int>(values.size()); }

  static Theta from_integers(std::vector<long> v) {
    for (long t : v)
      if (t < 1) throw InvalidInstance("theta entries must be >= 1");
    Theta th;
    th.values = std::move(v);
    return th;
  }
};

struct GapProfile {
  Decision x_star;
  long opt_value = 0;
  int m = 0;                              // max decision size
  std::vector<int> items;                 // the set I, sorted, 0-based
  std::optional<double> delta_min;        // enumeration-based, desk scale only
  std::optional<double> delta_max;

  bool in_I(int i) const {
    return std::binary_search(items.begin(), items.end(), i);
  }
};

inline double gap(const GapProfile& profile, const Theta& theta,
                  const Decision& x) {
  return static_cast<double>(profile.opt_value - dot(theta.values, x));
}

// Penalty method: boost coordinate i by 2 d ||theta||_inf and test whether the
// best decision through i is still optimal.
inline std::vector<int> suboptimal_items(const DecisionSet& set,
                                         const Theta& theta) {
  int d = set.dimension();
  std::vector<double> base = theta.as_doubles();
  Decision x_star = linear_max(set, base);
  double opt = dot(base, x_star);
  double boost = 2.0 * d * static_cast<double>(theta.max_abs());
  std::vector<int> items;
  for (int i = 0; i < d; ++i) {
    std::vector<double> boosted = base;
    boosted[i] += boost;
    Decision yi = linear_max(set, boosted);
    if (dot(base, yi) < opt) items.push_back(i);
  }
  return items;
}

// Gap profile: optimal decision, value, m, the set I, and (when X is small
// enough to enumerate) the extreme gaps.
inline GapProfile analyze(const DecisionSet& set, const Theta& theta,
                          long cap = enumeration_cap()) {
  GapProfile p;
  p.x_star = linear_max(set, theta.as_doubles());
  p.opt_value = dot(theta.values, p.x_star);
  p.m = max_decision_size(set);
  p.items = suboptimal_items(set, theta);
  try {
    auto all = enumerate_decisions(set, cap);
    for (const auto& x : all) {
      double g = static_cast<double>(p.opt_value - dot(theta.values, x));
      if (g > 0.0) {
        if (!p.delta_min || g < *p.delta_min) p.delta_min = g;
        if (!p.delta_max || g > *p.delta_max) p.delta_max = g;
      }
    }
    if (!p.delta_max) p.delta_max = 0.0;  // every decision optimal
  } catch (const TooLarge&) {
    // gaps stay unknown at this scale
  }
  return p;
}

// Componentwise ceil(theta_i / eps); the integer form solved downstream is
// theta^eps / eps.
inline Theta discretize(const std::vector<double>& theta_real, double eps) {
  if (!(eps > 0.0)) throw InvalidInstance("discretize: eps must be positive");
  Theta th;
  th.values.reserve(theta_real.size());
  for (double t : theta_real) {
    if (!(t > 0.0)) throw NonPositiveEntry("discretize: theta entries must be > 0");
    th.values.push_back(static_cast<long>(std::ceil(t / eps)));
  }
  th.real_origin = theta_real;
  th.epsilon = eps;
  th.discretization_warning = true;  // not certified without delta_min
  return th;
}

// Same, but certifies eps <= delta_min/(2m) when the real instance is small
// enough to enumerate; otherwise the warning flag stays set.
inline Theta discretize(const DecisionSet& set,
                        const std::vector<double>& theta_real, double eps,
                        long cap = enumeration_cap()) {
  Theta th = discretize(theta_real, eps);
  try {
    auto all = enumerate_decisions(set, cap);
    double opt = 0.0;
    bool first = true;
    for (const auto& x : all) {
      double v = dot(theta_real, x);
      if (first || v > opt) opt = v;
      first = false;
    }
    std::optional<double> dmin;
    for (const auto& x : all) {
      double g = opt - dot(theta_real, x);
      if (g > 1e-12 && (!dmin || g < *dmin)) dmin = g;
    }
    int m = max_decision_size(set);
    if (dmin) th.discretization_warning = eps > *dmin / (2.0 * m);
    // no suboptimal decision: nothing to certify
    else th.discretization_warning = false;
  } catch (const TooLarge&) {
  }
  return th;
}

// Feasibility transfer from the discretized problem back to the real one:
// scale by (1 + 2 m eps / delta_min)^2.
inline double discretization_inflation(int m, double eps, double delta_min) {
  double f = 1.0 + 2.0 * m * eps / delta_min;
  return f * f;
}

inline std::vector<double> inflate_discretized(const std::vector<double>& w,
                                               int m, double eps,
                                               double delta_min) {
  double f = discretization_inflation(m, eps, delta_min);
  std::vector<double> out(w);
  for (double& v : out) v *= f;
  return out;
}

}  // namespace glkit
