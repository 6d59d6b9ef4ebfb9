#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "glkit/instance.hpp"

using namespace glkit;

TEST_CASE("gap evaluates against the optimal value") {
  DecisionSet onesets{MSet{3, 1}};
  Theta th = Theta::from_integers({3, 1, 2});
  GapProfile p = analyze(onesets, th);
  REQUIRE(p.x_star == Decision{1, 0, 0});
  REQUIRE(p.opt_value == 3);
  REQUIRE(gap(p, th, {0, 1, 0}) == 2.0);
  REQUIRE(gap(p, th, {1, 0, 0}) == 0.0);

  DecisionSet mset{MSet{3, 2}};
  Theta th2 = Theta::from_integers({2, 2, 1});
  GapProfile p2 = analyze(mset, th2);
  REQUIRE(gap(p2, th2, {1, 0, 1}) == 1.0);
}

TEST_CASE("suboptimal_items via the penalty method") {
  REQUIRE(suboptimal_items(DecisionSet{MSet{3, 1}},
                           Theta::from_integers({3, 1, 2})) ==
          std::vector<int>{1, 2});
  REQUIRE(suboptimal_items(DecisionSet{MSet{2, 1}},
                           Theta::from_integers({1, 1}))
              .empty());
  REQUIRE(suboptimal_items(DecisionSet{MSet{3, 2}},
                           Theta::from_integers({2, 2, 1})) ==
          std::vector<int>{2});
}

TEST_CASE("suboptimal_items matches the definitional enumeration") {
  std::mt19937 rng(123);
  std::uniform_int_distribution<long> tdist(1, 9);
  for (int trial = 0; trial < 30; ++trial) {
    int d = 3 + static_cast<int>(rng() % 5);
    int m = 1 + static_cast<int>(rng() % d);
    DecisionSet set{MSet{d, m}};
    std::vector<long> tv(d);
    for (long& v : tv) v = tdist(rng);
    Theta th = Theta::from_integers(tv);
    auto I = suboptimal_items(set, th);
    auto all = enumerate_decisions(set);
    long opt = 0;
    for (const auto& x : all) opt = std::max(opt, dot(th.values, x));
    std::vector<int> expect;
    for (int i = 0; i < d; ++i) {
      long best_i = -1;
      for (const auto& x : all)
        if (x[i]) best_i = std::max(best_i, dot(th.values, x));
      if (best_i >= 0 && best_i < opt) expect.push_back(i);
    }
    REQUIRE(I == expect);
  }
}

TEST_CASE("discretize rounds up componentwise") {
  Theta a = discretize(std::vector<double>{0.5, 0.24}, 0.1);
  REQUIRE(a.values == std::vector<long>{5, 3});
  Theta b = discretize(std::vector<double>{3, 1, 2}, 1.0);
  REQUIRE(b.values == std::vector<long>{3, 1, 2});
  Theta c = discretize(std::vector<double>{1.01, 1.0}, 0.5);
  REQUIRE(c.values == std::vector<long>{3, 2});
  REQUIRE_THROWS_AS(discretize(std::vector<double>{1.0, 0.0}, 0.1),
                    NonPositiveEntry);
}

TEST_CASE("discretize certifies the step against the minimal gap") {
  DecisionSet onesets{MSet{2, 1}};
  // delta_min = 0.5, m = 1: certified iff eps <= 0.25
  Theta ok = discretize(onesets, std::vector<double>{1.0, 0.5}, 0.2);
  REQUIRE_FALSE(ok.discretization_warning);
  Theta warn = discretize(onesets, std::vector<double>{1.0, 0.5}, 0.3);
  REQUIRE(warn.discretization_warning);
}

TEST_CASE("inflation factor arithmetic") {
  auto w = inflate_discretized({1.0, 1.0}, 1, 0.25, 1.0);
  REQUIRE(w[0] == Catch::Approx(2.25).epsilon(1e-12));
  REQUIRE(w[1] == Catch::Approx(2.25).epsilon(1e-12));
  REQUIRE(discretization_inflation(3, 1e-9, 0.5) == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("gap sandwich under discretization") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> tdist(0.2, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    int d = 4 + static_cast<int>(rng() % 3);
    int m = 1 + static_cast<int>(rng() % 3);
    DecisionSet set{MSet{d, m}};
    std::vector<double> tr(d);
    for (double& v : tr) v = tdist(rng);
    double eps = 0.05 + 0.1 * (rng() % 3);
    Theta th = discretize(tr, eps);
    auto all = enumerate_decisions(set);
    double opt_real = -1e300, opt_eps = -1e300;
    for (const auto& x : all) {
      opt_real = std::max(opt_real, dot(tr, x));
      opt_eps = std::max(opt_eps, eps * dot(th.values, x));
    }
    for (const auto& x : all) {
      double g_real = opt_real - dot(tr, x);
      double g_eps = opt_eps - eps * dot(th.values, x);
      REQUIRE(std::abs(g_real - g_eps) <= 2.0 * m * eps + 1e-12);
    }
  }
}

TEST_CASE("integer instances have gaps in [1, m theta_max]") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<long> tdist(1, 9);
  for (int trial = 0; trial < 20; ++trial) {
    int d = 3 + static_cast<int>(rng() % 5);
    int m = 1 + static_cast<int>(rng() % 3);
    DecisionSet set{MSet{d, std::min(m, d)}};
    std::vector<long> tv(d);
    for (long& v : tv) v = tdist(rng);
    Theta th = Theta::from_integers(tv);
    GapProfile p = analyze(set, th);
    if (p.delta_min) {
      REQUIRE(*p.delta_min >= 1.0);
      REQUIRE(*p.delta_max <= double(p.m) * th.max_abs());
    }
  }
}
