#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "glkit/errors.hpp"
#include "glkit/structures.hpp"

namespace glkit {

// Lifted standard-form hull: conv(lift(X)) = { z : A z = b, z >= 0 } with the
// original decision in the first orig_dim coordinates. For every structure
// shipped here the lifted coordinates of a decision are binary.
struct HullRep {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  int orig_dim = 0;
  int lifted_dim = 0;
  // lift(x) = L x + c when the lift is affine in x (all kinds but Explicit).
  std::optional<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> affine;
  // Explicit sets carry their vertex list; lambda coordinate j belongs to
  // vertices[j].
  std::vector<Decision> vertices;

  Eigen::VectorXd lift(const Decision& x) const {
    Eigen::VectorXd z(lifted_dim);
    if (affine) {
      Eigen::VectorXd xv(orig_dim);
      for (int i = 0; i < orig_dim; ++i) xv[i] = x[i];
      z = affine->first * xv + affine->second;
    } else {
      z.setZero();
      for (int i = 0; i < orig_dim; ++i) z[i] = x[i];
      auto it = std::lower_bound(vertices.begin(), vertices.end(), x);
      if (it == vertices.end() || *it != x)
        throw InvalidInstance("lift: decision not in the explicit vertex list");
      z[orig_dim + static_cast<int>(it - vertices.begin())] = 1.0;
    }
    return z;
  }
};

namespace detail {

inline HullRep mset_hull(const MSet& p) {
  HullRep h;
  h.orig_dim = p.d;
  h.lifted_dim = 2 * p.d;
  h.A = Eigen::MatrixXd::Zero(1 + p.d, 2 * p.d);
  h.b = Eigen::VectorXd::Zero(1 + p.d);
  for (int i = 0; i < p.d; ++i) h.A(0, i) = 1.0;
  h.b[0] = p.m;
  for (int i = 0; i < p.d; ++i) {
    h.A(1 + i, i) = 1.0;
    h.A(1 + i, p.d + i) = 1.0;
    h.b[1 + i] = 1.0;
  }
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * p.d, p.d);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * p.d);
  for (int i = 0; i < p.d; ++i) {
    L(i, i) = 1.0;
    L(p.d + i, i) = -1.0;
    c[p.d + i] = 1.0;
  }
  h.affine = {std::move(L), std::move(c)};
  return h;
}

inline HullRep dag_hull(const StPathDag& p) {
  int d = static_cast<int>(p.edges.size());
  HullRep h;
  h.orig_dim = d;
  h.lifted_dim = d;
  // One conservation row per internal node, then a unit-outflow source row.
  std::vector<int> internal;
  for (int v = 0; v < p.num_nodes; ++v)
    if (v != p.source && v != p.sink) internal.push_back(v);
  int rows = static_cast<int>(internal.size()) + 1;
  h.A = Eigen::MatrixXd::Zero(rows, d);
  h.b = Eigen::VectorXd::Zero(rows);
  for (int r = 0; r < static_cast<int>(internal.size()); ++r) {
    int v = internal[r];
    for (int e = 0; e < d; ++e) {
      if (p.edges[e].second == v) h.A(r, e) += 1.0;
      if (p.edges[e].first == v) h.A(r, e) -= 1.0;
    }
  }
  int src_row = rows - 1;
  for (int e = 0; e < d; ++e) {
    if (p.edges[e].first == p.source) h.A(src_row, e) += 1.0;
    if (p.edges[e].second == p.source) h.A(src_row, e) -= 1.0;
  }
  h.b[src_row] = 1.0;
  h.affine = {Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d)};
  return h;
}

inline HullRep matching_hull(const BipartiteMatching& p) {
  int d = static_cast<int>(p.edges.size());
  HullRep h;
  h.orig_dim = d;
  int verts = p.left + p.right;
  if (p.perfect) {
    h.lifted_dim = d;
    h.A = Eigen::MatrixXd::Zero(verts, d);
    h.b = Eigen::VectorXd::Ones(verts);
    for (int e = 0; e < d; ++e) {
      h.A(p.edges[e].first, e) = 1.0;
      h.A(p.left + p.edges[e].second, e) = 1.0;
    }
    h.affine = {Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d)};
    return h;
  }
  // General matchings lift with one slack per vertex: deg(v) + s_v = 1.
  h.lifted_dim = d + verts;
  h.A = Eigen::MatrixXd::Zero(verts, h.lifted_dim);
  h.b = Eigen::VectorXd::Ones(verts);
  for (int e = 0; e < d; ++e) {
    h.A(p.edges[e].first, e) = 1.0;
    h.A(p.left + p.edges[e].second, e) = 1.0;
  }
  for (int v = 0; v < verts; ++v) h.A(v, d + v) = 1.0;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(h.lifted_dim, d);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(h.lifted_dim);
  for (int e = 0; e < d; ++e) {
    L(e, e) = 1.0;
    L(d + p.edges[e].first, e) = -1.0;
    L(d + p.left + p.edges[e].second, e) = -1.0;
  }
  for (int v = 0; v < verts; ++v) c[d + v] = 1.0;
  h.affine = {std::move(L), std::move(c)};
  return h;
}

inline HullRep explicit_hull(const DecisionSet& set, long cap) {
  auto verts = enumerate_decisions(set, cap);
  int d = set.dimension();
  int n = static_cast<int>(verts.size());
  HullRep h;
  h.orig_dim = d;
  h.lifted_dim = d + n;
  // w = sum_x lambda_x x and sum lambda = 1; vertices are (x, e_x).
  h.A = Eigen::MatrixXd::Zero(d + 1, h.lifted_dim);
  h.b = Eigen::VectorXd::Zero(d + 1);
  for (int i = 0; i < d; ++i) {
    h.A(i, i) = 1.0;
    for (int j = 0; j < n; ++j) h.A(i, d + j) = -static_cast<double>(verts[j][i]);
  }
  for (int j = 0; j < n; ++j) h.A(d, d + j) = 1.0;
  h.b[d] = 1.0;
  h.vertices = std::move(verts);
  return h;
}

}  // namespace detail

// Exact lifted equality-form hull of conv(X).
inline HullRep hull(const DecisionSet& set, long cap = enumeration_cap()) {
  if (set.is<MSet>()) return detail::mset_hull(set.as<MSet>());
  if (set.is<StPathDag>()) return detail::dag_hull(set.as<StPathDag>());
  if (set.is<BipartiteMatching>())
    return detail::matching_hull(set.as<BipartiteMatching>());
  return detail::explicit_hull(set, cap);
}

}  // namespace glkit
