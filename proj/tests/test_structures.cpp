#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "glkit/structures.hpp"

using namespace glkit;

namespace {

Decision bits(std::initializer_list<int> v) { return Decision(v); }

DecisionSet four_edge_dag() {
  // s=0, u=1, v=2, t=3; e0:s->u, e1:s->v, e2:u->t, e3:v->t
  return DecisionSet{StPathDag{4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, 0, 3}};
}

std::vector<DecisionSet> small_structures() {
  std::vector<DecisionSet> sets;
  sets.push_back(DecisionSet{MSet{5, 2}});
  sets.push_back(DecisionSet{MSet{6, 3}});
  sets.push_back(four_edge_dag());
  sets.push_back(DecisionSet{StPathDag{
      6, {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {1, 4}, {2, 4}, {3, 5}, {4, 5}}, 0, 5}});
  sets.push_back(DecisionSet{BipartiteMatching{
      3, 3, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {1, 2}, {2, 1}, {2, 2}}, false}});
  sets.push_back(DecisionSet{BipartiteMatching{
      3, 3, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 1}, {2, 2}}, true}});
  sets.push_back(DecisionSet{
      Explicit{{bits({1, 1, 0, 0}), bits({0, 1, 1, 0}), bits({0, 0, 1, 1}),
                bits({1, 0, 0, 1})}}});
  return sets;
}

// Reference argmax: float-max value, lexicographically smallest indicator.
Decision scan_argmax(const std::vector<Decision>& all,
                     const std::vector<double>& a) {
  const Decision* best = nullptr;
  double best_v = 0.0;
  for (const auto& x : all) {
    double v = dot(a, x);
    if (!best || v > best_v || (v == best_v && x < *best)) {
      best = &x;
      best_v = v;
    }
  }
  return *best;
}

}  // namespace

TEST_CASE("enumeration is lexicographic and capped") {
  auto all = enumerate_decisions(DecisionSet{MSet{3, 2}}, 10);
  REQUIRE(all == std::vector<Decision>{bits({0, 1, 1}), bits({1, 0, 1}),
                                       bits({1, 1, 0})});

  auto paths = enumerate_decisions(four_edge_dag(), 10);
  REQUIRE(paths ==
          std::vector<Decision>{bits({0, 1, 0, 1}), bits({1, 0, 1, 0})});

  REQUIRE_THROWS_AS(enumerate_decisions(DecisionSet{MSet{30, 15}}, 1000),
                    TooLarge);
}

TEST_CASE("dag construction rejects cycles and bad endpoints") {
  REQUIRE_THROWS_AS(
      (DecisionSet{StPathDag{3, {{0, 1}, {1, 2}, {2, 1}}, 0, 2}}),
      InvalidInstance);
  REQUIRE_THROWS_AS((DecisionSet{StPathDag{2, {{0, 5}}, 0, 1}}), InvalidInstance);
  REQUIRE_THROWS_AS((DecisionSet{StPathDag{2, {{0, 1}}, 1, 1}}), InvalidInstance);
}

TEST_CASE("linear_max on the printed examples") {
  REQUIRE(linear_max(DecisionSet{MSet{3, 2}}, {3, 1, 2}) == bits({1, 0, 1}));

  Decision p = linear_max(four_edge_dag(), {2, 1, 2, 1});
  REQUIRE(p == bits({1, 0, 1, 0}));
  REQUIRE(dot(std::vector<double>{2, 1, 2, 1}, p) == 4.0);

  DecisionSet single{Explicit{{bits({1, 1, 0})}}};
  REQUIRE(linear_max(single, {-5, -5, -5}) == bits({1, 1, 0}));
}

TEST_CASE("linear_max breaks ties toward the lexicographically smallest") {
  // all weights equal: every 1-set optimal, smallest indicator picks the
  // last coordinate
  REQUIRE(linear_max(DecisionSet{MSet{3, 1}}, {1, 1, 1}) == bits({0, 0, 1}));
  // tied pair of 2-sets
  REQUIRE(linear_max(DecisionSet{MSet{3, 2}}, {2, 1, 1}) == bits({1, 0, 1}));
}

TEST_CASE("linear_max equals enumeration on random weights") {
  std::mt19937 rng(20240601);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (const auto& set : small_structures()) {
    auto all = enumerate_decisions(set, 200);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<double> a(set.dimension());
      for (double& v : a) v = dist(rng);
      Decision x = linear_max(set, a);
      REQUIRE(set.contains(x));
      REQUIRE(dot(a, x) == dot(a, scan_argmax(all, a)));
    }
  }
}

TEST_CASE("linear_max matches the enumeration tie-break on integer weights") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> dist(0, 2);
  for (const auto& set : small_structures()) {
    auto all = enumerate_decisions(set, 200);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<double> a(set.dimension());
      for (double& v : a) v = dist(rng);
      REQUIRE(linear_max(set, a) == scan_argmax(all, a));
    }
  }
}

TEST_CASE("budgeted_linear_max on the printed examples") {
  DecisionSet mset{MSet{3, 2}};
  auto x = budgeted_linear_max(mset, {3, 1, 2}, {1, 2, 3}, 5);
  REQUIRE(x.has_value());
  REQUIRE(*x == bits({0, 1, 1}));

  REQUIRE_FALSE(budgeted_linear_max(mset, {3, 1, 2}, {1, 2, 3}, 6).has_value());

  auto p = budgeted_linear_max(four_edge_dag(), {1, 1, 1, 1}, {2, 1, 2, 1}, 4);
  REQUIRE(p.has_value());
  REQUIRE(*p == bits({1, 0, 1, 0}));
}

TEST_CASE("budgeted_linear_max agrees with enumeration everywhere") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> adist(0.0, 4.0);
  std::uniform_int_distribution<long> udist(0, 9);
  for (const auto& set : small_structures()) {
    auto all = enumerate_decisions(set, 200);
    int m = max_decision_size(set);
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<double> a(set.dimension());
      std::vector<long> u(set.dimension());
      for (double& v : a) v = adist(rng);
      long umax = 0;
      for (long& v : u) {
        v = udist(rng);
        umax = std::max(umax, v);
      }
      for (long s = 0; s <= m * umax + 1; ++s) {
        auto got = budgeted_linear_max(set, a, u, s);
        // enumeration side
        bool feasible = false;
        double best = 0.0;
        for (const auto& y : all)
          if (dot(u, y) >= s) {
            double v = dot(a, y);
            if (!feasible || v > best) best = v;
            feasible = true;
          }
        REQUIRE(got.has_value() == feasible);
        if (feasible) {
          REQUIRE(dot(u, *got) >= s);
          REQUIRE(dot(a, *got) == best);
        }
      }
    }
  }
}

TEST_CASE("budget_value_profile matches per-budget maxima") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> adist(0.0, 2.0);
  for (const auto& set : small_structures()) {
    auto all = enumerate_decisions(set, 200);
    std::vector<double> a(set.dimension());
    std::vector<long> u(set.dimension());
    for (double& v : a) v = adist(rng);
    for (long& v : u) v = rng() % 4;
    long B = 3 * max_decision_size(set) + 1;
    auto profile = budget_value_profile(set, a, u, B);
    for (long r = 0; r <= B; ++r) {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& y : all)
        if (dot(u, y) >= r) best = std::max(best, dot(a, y));
      REQUIRE(profile[r] == best);
    }
  }
}

TEST_CASE("min_support_completion on the printed examples") {
  DecisionSet mset{MSet{3, 2}};
  REQUIRE(min_support_completion(mset, {0, 1, 2}) == bits({0, 1, 1}));
  REQUIRE(min_support_completion(mset, {0, 2}) == bits({1, 0, 1}));
  REQUIRE(min_support_completion(four_edge_dag(), {1, 3}) ==
          bits({0, 1, 0, 1}));
}

TEST_CASE("min_support_completion is free when a decision fits the support") {
  std::mt19937 rng(41);
  for (const auto& set : small_structures()) {
    auto all = enumerate_decisions(set, 200);
    for (int trial = 0; trial < 10; ++trial) {
      const Decision& x = all[rng() % all.size()];
      std::vector<int> allowed;
      for (int i = 0; i < set.dimension(); ++i)
        if (x[i] || rng() % 2) allowed.push_back(i);
      Decision y = min_support_completion(set, allowed);
      int cost = 0;
      for (int i = 0; i < set.dimension(); ++i)
        if (y[i] &&
            std::find(allowed.begin(), allowed.end(), i) == allowed.end())
          ++cost;
      REQUIRE(cost == 0);
    }
  }
}

TEST_CASE("check_covering finds witnesses and uncovered coordinates") {
  Covering c1 = check_covering(DecisionSet{MSet{3, 2}});
  REQUIRE(c1.uncovered.empty());
  for (int i = 0; i < 3; ++i) {
    REQUIRE(c1.witness[i].has_value());
    REQUIRE((*c1.witness[i])[i] == 1);
  }

  Covering c2 = check_covering(
      DecisionSet{Explicit{{bits({1, 1, 0}), bits({1, 0, 0})}}});
  REQUIRE(c2.uncovered == std::vector<int>{2});

  REQUIRE(check_covering(four_edge_dag()).uncovered.empty());
}

TEST_CASE("membership checks per structure") {
  DecisionSet dag = four_edge_dag();
  REQUIRE(dag.contains(bits({1, 0, 1, 0})));
  REQUIRE_FALSE(dag.contains(bits({1, 0, 0, 1})));
  REQUIRE_FALSE(dag.contains(bits({1, 1, 1, 1})));

  DecisionSet pm{BipartiteMatching{2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}, true}};
  REQUIRE(pm.contains(bits({1, 0, 0, 1})));
  REQUIRE_FALSE(pm.contains(bits({1, 0, 0, 0})));  // not perfect
  DecisionSet gm{BipartiteMatching{2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}, false}};
  REQUIRE(gm.contains(bits({1, 0, 0, 0})));
  REQUIRE(gm.contains(bits({0, 0, 0, 0})));
  REQUIRE_FALSE(gm.contains(bits({1, 1, 0, 0})));  // shares the left vertex
}

TEST_CASE("empty decision sets raise EmptySet") {
  // no path from 0 to 2
  DecisionSet dag{StPathDag{3, {{1, 2}}, 0, 2}};
  REQUIRE_THROWS_AS(linear_max(dag, {1.0}), EmptySet);
  // perfect matching on a graph without one
  DecisionSet pm{BipartiteMatching{2, 2, {{0, 0}, {1, 0}}, true}};
  std::vector<double> a{1.0, 1.0};
  REQUIRE_THROWS_AS(linear_max(pm, a), EmptySet);
}
