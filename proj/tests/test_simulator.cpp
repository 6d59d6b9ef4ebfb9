#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "glkit/simulator.hpp"

using namespace glkit;

namespace {

LearnerState make_state(std::vector<long> counts, std::vector<double> means) {
  LearnerState s(static_cast<int>(counts.size()));
  s.counts = counts;
  for (std::size_t i = 0; i < counts.size(); ++i)
    s.sums[i] = means[i] * std::max<long>(1, counts[i]);
  s.t = 0;
  for (long n : counts) s.t += n;
  return s;
}

}  // namespace

TEST_CASE("cucb index rule as printed") {
  DecisionSet set{MSet{2, 1}};
  LearnerState s = make_state({1, 1}, {1.0, 0.0});
  // ln(3)/1 bonus on both arms: indices (1+1.0986, 1.0986)
  REQUIRE(cucb_select(s, set, 3) == Decision{1, 0});

  // equal means and counts: lexicographic tie-break
  DecisionSet set3{MSet{3, 1}};
  LearnerState tie = make_state({5, 5, 5}, {1.0, 1.0, 1.0});
  REQUIRE(cucb_select(tie, set3, 100) == Decision{0, 0, 1});

  // the bonus vanishes with many samples
  LearnerState big = make_state({100000000, 100000000}, {0.2, 0.9});
  REQUIRE(cucb_select(big, set, 100) == Decision{0, 1});
}

TEST_CASE("thompson sampling selects the sampled argmax") {
  DecisionSet set{MSet{3, 1}};
  REQUIRE(ts_select_from_sample(set, {3, 1, 2}) == Decision{1, 0, 0});

  // tiny posterior variance concentrates on the empirical argmax
  LearnerState s = make_state({1000000000000L, 1000000000000L}, {0.3, 0.8});
  DecisionSet set2{MSet{2, 1}};
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i)
    REQUIRE(ts_select(s, set2, rng) == Decision{0, 1});

  // fixed seed, fixed draw sequence
  LearnerState s2 = make_state({3, 4}, {0.5, 0.5});
  std::mt19937_64 a(42), b(42);
  for (int i = 0; i < 10; ++i) REQUIRE(ts_select(s2, set2, a) == ts_select(s2, set2, b));
}

TEST_CASE("escb maximizes the square-root index by enumeration") {
  DecisionSet onesets{MSet{2, 1}};
  LearnerState s = make_state({1, 4}, {0.1, 0.1});
  // indices 0.1 + sqrt(ln 3), 0.1 + sqrt(ln(3)/4): arm 0 wins
  REQUIRE(escb_select(s, onesets, 3) == Decision{1, 0});

  DecisionSet mset{MSet{3, 2}};
  LearnerState s2 = make_state({1, 1, 100}, {1.0, 1.0, 0.0});
  REQUIRE(escb_select(s2, mset, 3) == Decision{1, 1, 0});

  REQUIRE_THROWS_AS(escb_select(make_state(std::vector<long>(30, 1),
                                           std::vector<double>(30, 0.0)),
                                DecisionSet{MSet{30, 15}}, 10, 1000),
                    TooLarge);
}

TEST_CASE("certainty-equivalence targets and branching") {
  DecisionSet set{MSet{3, 1}};
  OssbCePolicy policy;
  // closed-form allocation for theta=(3,1,2): alpha = (1/4, 1) on arms 2,3
  policy.install_allocation({{0, 1, 0}, {0, 0, 1}}, {0.25, 1.0}, 30);
  REQUIRE(OssbCePolicy::target(0.25, 22026) == 3);
  REQUIRE(OssbCePolicy::target(1.0, 22026) == 10);

  LearnerState s = make_state({40, 40, 40}, {3.0, 1.0, 2.0});
  // deficits force the atoms until the quotas fill, then exploitation;
  // ln t crosses 10 inside the window, so the unit-rate quota ends at 11
  std::map<Decision, int> seen;
  for (long t = 22026; t < 22026 + 20; ++t) seen[policy.select(s, set, t)]++;
  REQUIRE(seen[{0, 1, 0}] == 3);
  REQUIRE(seen[{0, 0, 1}] == 11);
  REQUIRE(seen[{1, 0, 0}] == 6);  // empirical best afterwards

  // forced plays never exceed the final quota
  REQUIRE(policy.forced_plays({0, 1, 0}) <= 3);
  REQUIRE(policy.forced_plays({0, 0, 1}) <= 11);

  // empty allocation plays the empirical best immediately
  OssbCePolicy idle;
  idle.install_allocation({}, {}, 30);
  REQUIRE(idle.select(s, set, 50000) == Decision{1, 0, 0});
}

TEST_CASE("environment noise is calibrated to variance one half") {
  Environment env{{1.0, 2.0}};
  std::mt19937_64 rng(9);
  int n = 10000;
  std::vector<double> sum(2, 0.0), sq(2, 0.0);
  for (int i = 0; i < n; ++i) {
    auto y = env.draw(rng);
    for (int j = 0; j < 2; ++j) {
      sum[j] += y[j];
      sq[j] += y[j] * y[j];
    }
  }
  for (int j = 0; j < 2; ++j) {
    double mean = sum[j] / n;
    double var = sq[j] / n - mean * mean;
    REQUIRE(var == Catch::Approx(0.5).epsilon(0.1));
  }
}

TEST_CASE("empirical means are unbiased under forced sampling") {
  int reps = 100, n = 200;
  std::vector<double> theta{1.5, 0.5};
  DecisionSet set{MSet{2, 1}};
  std::vector<double> acc(2, 0.0);
  for (int r = 0; r < reps; ++r) {
    std::mt19937_64 rng(1000 + r);
    Environment env{theta};
    LearnerState st(2);
    for (int t = 0; t < n; ++t) {
      Decision x{t % 2 == 0, t % 2 != 0};
      st.update(x, env.draw(rng));
    }
    auto m = st.means();
    for (int j = 0; j < 2; ++j) acc[j] += m[j];
  }
  for (int j = 0; j < 2; ++j) {
    double half_n = n / 2.0;
    double tol = 4.0 * std::sqrt(1.0 / (2.0 * half_n * reps));
    REQUIRE(std::abs(acc[j] / reps - theta[j]) <= tol);
  }
}

TEST_CASE("oracle replications have zero pseudo-regret") {
  DecisionSet set{MSet{3, 1}};
  auto traces = run_experiment(set, {3, 1, 2}, Algo::Oracle, 1000, 3, 7, "t");
  REQUIRE(traces.size() == 3);
  for (const auto& tr : traces)
    for (auto [t, r] : tr.points) REQUIRE(r == 0.0);
}

TEST_CASE("pseudo-regret is nondecreasing and traces are deterministic") {
  DecisionSet set{MSet{3, 1}};
  for (Algo algo : {Algo::Cucb, Algo::Ts, Algo::Escb}) {
    auto a = run_experiment(set, {3, 1, 2}, algo, 2000, 2, 11, "t");
    auto b = run_experiment(set, {3, 1, 2}, algo, 2000, 2, 11, "t");
    std::string csv_a, csv_b;
    write_traces_csv(csv_a, a);
    write_traces_csv(csv_b, b);
    REQUIRE(csv_a == csv_b);
    for (const auto& tr : a) {
      double prev = 0.0;
      for (auto [t, r] : tr.points) {
        REQUIRE(r >= prev - 1e-12);
        prev = r;
      }
    }
  }
}

TEST_CASE("parallel replications reproduce the sequential traces") {
  DecisionSet set{MSet{3, 1}};
  SimOptions seq, par;
  par.threads = 3;
  auto a = run_experiment(set, {3, 1, 2}, Algo::Cucb, 1500, 6, 3, "t", seq);
  auto b = run_experiment(set, {3, 1, 2}, Algo::Cucb, 1500, 6, 3, "t", par);
  std::string csv_a, csv_b;
  write_traces_csv(csv_a, a);
  write_traces_csv(csv_b, b);
  REQUIRE(csv_a == csv_b);
}

TEST_CASE("checkpoints follow the 1-2-5 grid") {
  auto cps = default_checkpoints(1000);
  REQUIRE(cps == std::vector<long>{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000});
  auto odd = default_checkpoints(137);
  REQUIRE(odd.back() == 137);
}
