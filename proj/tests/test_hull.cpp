#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <vector>

#include "glkit/hull.hpp"

using namespace glkit;

namespace {

// Vertices of {A z = b, z >= 0} by basic-feasible-solution enumeration; a
// desk-scale oracle for hull exactness.
std::vector<Eigen::VectorXd> enumerate_vertices(const Eigen::MatrixXd& A,
                                                const Eigen::VectorXd& b) {
  int n = static_cast<int>(A.cols());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  int r = static_cast<int>(qr.rank());
  std::vector<Eigen::VectorXd> verts;
  std::vector<int> cols(r);
  std::function<void(int, int)> rec = [&](int start, int k) {
    if (k == r) {
      Eigen::MatrixXd AS(A.rows(), r);
      for (int j = 0; j < r; ++j) AS.col(j) = A.col(cols[j]);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> sub(AS);
      if (sub.rank() < r) return;
      Eigen::VectorXd xs = sub.solve(b);
      if ((AS * xs - b).cwiseAbs().maxCoeff() > 1e-9) return;
      if (xs.minCoeff() < -1e-9) return;
      Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < r; ++j) full[cols[j]] = std::max(0.0, xs[j]);
      for (const auto& v : verts)
        if ((v - full).cwiseAbs().maxCoeff() < 1e-7) return;
      verts.push_back(full);
      return;
    }
    for (int c = start; c < n; ++c) {
      cols[k] = c;
      rec(c + 1, k + 1);
    }
  };
  rec(0, 0);
  return verts;
}

void check_exact(const DecisionSet& set) {
  HullRep h = hull(set);
  auto all = enumerate_decisions(set, 50);
  // every lifted decision is feasible and projects onto itself
  for (const auto& x : all) {
    Eigen::VectorXd z = h.lift(x);
    REQUIRE((h.A * z - h.b).cwiseAbs().maxCoeff() <= 1e-12);
    REQUIRE(z.minCoeff() >= 0.0);
    for (int i = 0; i < h.orig_dim; ++i) REQUIRE(z[i] == double(x[i]));
  }
  // every vertex of the polytope projects onto a decision
  for (const auto& v : enumerate_vertices(h.A, h.b)) {
    Decision x(h.orig_dim, 0);
    for (int i = 0; i < h.orig_dim; ++i) {
      REQUIRE(std::abs(v[i] - std::round(v[i])) <= 1e-7);
      x[i] = static_cast<int>(std::round(v[i]));
    }
    REQUIRE(set.contains(x));
  }
}

}  // namespace

TEST_CASE("mset hull has the cardinality row plus slack rows") {
  HullRep h = hull(DecisionSet{MSet{3, 1}});
  REQUIRE(h.orig_dim == 3);
  REQUIRE(h.lifted_dim == 6);
  Eigen::MatrixXd A(4, 6);
  A << 1, 1, 1, 0, 0, 0,
       1, 0, 0, 1, 0, 0,
       0, 1, 0, 0, 1, 0,
       0, 0, 1, 0, 0, 1;
  REQUIRE(h.A == A);
  REQUIRE(h.b == Eigen::Vector4d(1, 1, 1, 1));
}

TEST_CASE("dag hull is the unit-flow system") {
  DecisionSet dag{StPathDag{4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, 0, 3}};
  HullRep h = hull(dag);
  REQUIRE(h.lifted_dim == 4);
  Eigen::MatrixXd A(3, 4);
  A << 1, 0, -1, 0,   // flow at u
       0, 1, 0, -1,   // flow at v
       1, 1, 0, 0;    // source
  REQUIRE(h.A == A);
  REQUIRE(h.b == Eigen::Vector3d(0, 0, 1));
}

TEST_CASE("explicit hull spans exactly the stored segment") {
  DecisionSet seg{Explicit{{{1, 0}, {0, 1}}}};
  HullRep h = hull(seg);
  REQUIRE(h.orig_dim == 2);
  check_exact(seg);
}

TEST_CASE("hulls are exact for every structure kind") {
  check_exact(DecisionSet{MSet{3, 1}});
  check_exact(DecisionSet{MSet{3, 2}});
  check_exact(DecisionSet{MSet{4, 2}});
  check_exact(DecisionSet{StPathDag{4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, 0, 3}});
  check_exact(DecisionSet{
      StPathDag{5, {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {1, 4}, {3, 4}}, 0, 4}});
  check_exact(DecisionSet{
      BipartiteMatching{2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}, false}});
  check_exact(DecisionSet{
      BipartiteMatching{2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}, true}});
  check_exact(DecisionSet{
      Explicit{{{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}}});
}

TEST_CASE("lifted coordinates of decisions are binary") {
  for (auto set :
       {DecisionSet{MSet{4, 2}},
        DecisionSet{BipartiteMatching{2, 3, {{0, 0}, {0, 2}, {1, 1}}, false}},
        DecisionSet{Explicit{{{1, 0}, {0, 1}, {1, 1}}}}}) {
    HullRep h = hull(set);
    for (const auto& x : enumerate_decisions(set, 50)) {
      Eigen::VectorXd z = h.lift(x);
      for (int j = 0; j < h.lifted_dim; ++j)
        REQUIRE((z[j] == 0.0 || z[j] == 1.0));
    }
  }
}
