#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "glkit/errors.hpp"

namespace glkit {

// A decision is a binary vector of length d. Plain vectors keep the
// combinatorial code close to the math; lexicographic order is the
// default vector comparison.
using Decision = std::vector<int>;

inline double dot(const std::vector<double>& a, const Decision& x) {
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) v += a[i];
  return v;
}

inline long dot(const std::vector<long>& a, const Decision& x) {
  long v = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) v += a[i];
  return v;
}

inline int support_size(const Decision& x) {
  return static_cast<int>(std::count(x.begin(), x.end(), 1));
}

// Global default for enumeration work (counts partial expansions of the
// search tree as well as emitted decisions).
inline long& enumeration_cap() {
  static long cap = 1'000'000;
  return cap;
}

// ---------------------------------------------------------------------------
// Structure payloads

struct MSet {
  int d = 0;  // ambient dimension
  int m = 0;  // ones per decision
};

struct StPathDag {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // (from, to); index = coordinate
  int source = 0;
  int sink = 0;
};

struct BipartiteMatching {
  int left = 0;
  int right = 0;
  std::vector<std::pair<int, int>> edges;  // (left vertex, right vertex)
  bool perfect = false;
};

struct Explicit {
  std::vector<Decision> decisions;  // stored sorted and deduplicated
};

class DecisionSet {
 public:
  explicit DecisionSet(MSet s) : payload_(std::move(s)) {
    const auto& p = std::get<MSet>(payload_);
    if (p.d <= 0 || p.m <= 0 || p.m > p.d)
      throw InvalidInstance("mset requires 0 < m <= d");
    dim_ = p.d;
  }

  explicit DecisionSet(StPathDag s) : payload_(std::move(s)) {
    auto& p = std::get<StPathDag>(payload_);
    if (p.num_nodes <= 0) throw InvalidInstance("path_dag: empty graph");
    if (p.source < 0 || p.source >= p.num_nodes || p.sink < 0 ||
        p.sink >= p.num_nodes || p.source == p.sink)
      throw InvalidInstance("path_dag: bad source/sink");
    for (auto [u, v] : p.edges)
      if (u < 0 || u >= p.num_nodes || v < 0 || v >= p.num_nodes)
        throw InvalidInstance("path_dag: edge endpoint out of range");
    topo_order_ = topological_order(p);  // throws on cycles
    dim_ = static_cast<int>(p.edges.size());
  }

  explicit DecisionSet(BipartiteMatching s) : payload_(std::move(s)) {
    const auto& p = std::get<BipartiteMatching>(payload_);
    if (p.left <= 0 || p.right <= 0)
      throw InvalidInstance("bipartite_matching: empty side");
    for (auto [l, r] : p.edges)
      if (l < 0 || l >= p.left || r < 0 || r >= p.right)
        throw InvalidInstance("bipartite_matching: edge endpoint out of range");
    if (p.perfect && p.left != p.right)
      throw InvalidInstance("bipartite_matching: perfect requires equal sides");
    dim_ = static_cast<int>(p.edges.size());
  }

  explicit DecisionSet(Explicit s) : payload_(std::move(s)) {
    auto& p = std::get<Explicit>(payload_);
    if (p.decisions.empty()) throw InvalidInstance("explicit: no decisions");
    dim_ = static_cast<int>(p.decisions.front().size());
    if (dim_ == 0) throw InvalidInstance("explicit: zero-length decisions");
    for (const auto& x : p.decisions) {
      if (static_cast<int>(x.size()) != dim_)
        throw InvalidInstance("explicit: mixed decision lengths");
      for (int b : x)
        if (b != 0 && b != 1) throw InvalidInstance("explicit: non-binary entry");
    }
    std::sort(p.decisions.begin(), p.decisions.end());
    p.decisions.erase(std::unique(p.decisions.begin(), p.decisions.end()),
                      p.decisions.end());
  }

  int dimension() const { return dim_; }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(payload_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(payload_);
  }

  const std::vector<int>& topo_order() const { return topo_order_; }

  bool contains(const Decision& x) const;

 private:
  static std::vector<int> topological_order(const StPathDag& p) {
    std::vector<int> indeg(p.num_nodes, 0);
    std::vector<std::vector<int>> out(p.num_nodes);
    for (std::size_t e = 0; e < p.edges.size(); ++e) {
      out[p.edges[e].first].push_back(p.edges[e].second);
      indeg[p.edges[e].second]++;
    }
    std::vector<int> order;
    order.reserve(p.num_nodes);
    std::vector<int> stack;
    for (int v = 0; v < p.num_nodes; ++v)
      if (indeg[v] == 0) stack.push_back(v);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (int w : out[v])
        if (--indeg[w] == 0) stack.push_back(w);
    }
    if (static_cast<int>(order.size()) != p.num_nodes)
      throw InvalidInstance("path_dag: graph has a directed cycle");
    return order;
  }

  std::variant<MSet, StPathDag, BipartiteMatching, Explicit> payload_;
  int dim_ = 0;
  std::vector<int> topo_order_;  // DAG only
};

// ---------------------------------------------------------------------------
// Enumeration

namespace detail {

struct EnumBudget {
  long cap;
  long expansions = 0;
  void tick() {
    if (++expansions > cap) throw TooLarge("enumeration cap exceeded");
  }
};

inline void enum_msets(int d, int m, EnumBudget& budget,
                       std::vector<Decision>& out) {
  Decision cur(d, 0);
  std::function<void(int, int)> rec = [&](int start, int remaining) {
    budget.tick();
    if (remaining == 0) {
      out.push_back(cur);
      if (static_cast<long>(out.size()) > budget.cap)
        throw TooLarge("enumeration cap exceeded");
      return;
    }
    for (int i = start; i <= d - remaining; ++i) {
      cur[i] = 1;
      rec(i + 1, remaining - 1);
      cur[i] = 0;
    }
  };
  rec(0, m);
}

inline void enum_paths(const StPathDag& p, EnumBudget& budget,
                       std::vector<Decision>& out) {
  int d = static_cast<int>(p.edges.size());
  std::vector<std::vector<int>> out_edges(p.num_nodes);
  for (int e = 0; e < d; ++e) out_edges[p.edges[e].first].push_back(e);
  Decision cur(d, 0);
  std::function<void(int)> rec = [&](int v) {
    budget.tick();
    if (v == p.sink) {
      out.push_back(cur);
      if (static_cast<long>(out.size()) > budget.cap)
        throw TooLarge("enumeration cap exceeded");
      return;
    }
    for (int e : out_edges[v]) {
      cur[e] = 1;
      rec(p.edges[e].second);
      cur[e] = 0;
    }
  };
  rec(p.source);
}

inline void enum_matchings(const BipartiteMatching& p, EnumBudget& budget,
                           std::vector<Decision>& out) {
  int d = static_cast<int>(p.edges.size());
  std::vector<int> lfree(p.left, 1), rfree(p.right, 1);
  Decision cur(d, 0);
  int matched = 0;
  std::function<void(int)> rec = [&](int e) {
    budget.tick();
    if (e == d) {
      if (!p.perfect || (matched == p.left && matched == p.right)) {
        out.push_back(cur);
        if (static_cast<long>(out.size()) > budget.cap)
          throw TooLarge("enumeration cap exceeded");
      }
      return;
    }
    rec(e + 1);
    auto [l, r] = p.edges[e];
    if (lfree[l] && rfree[r]) {
      lfree[l] = rfree[r] = 0;
      cur[e] = 1;
      ++matched;
      rec(e + 1);
      --matched;
      cur[e] = 0;
      lfree[l] = rfree[r] = 1;
    }
  };
  rec(0);
}

}  // namespace detail

// Returns all of X sorted lexicographically; throws TooLarge when either the
// number of decisions or the number of partial search expansions exceeds cap.
inline std::vector<Decision> enumerate_decisions(const DecisionSet& set,
                                                 long cap = enumeration_cap()) {
  detail::EnumBudget budget{cap};
  std::vector<Decision> out;
  if (set.is<MSet>()) {
    const auto& p = set.as<MSet>();
    detail::enum_msets(p.d, p.m, budget, out);
  } else if (set.is<StPathDag>()) {
    detail::enum_paths(set.as<StPathDag>(), budget, out);
  } else if (set.is<BipartiteMatching>()) {
    detail::enum_matchings(set.as<BipartiteMatching>(), budget, out);
  } else {
    out = set.as<Explicit>().decisions;
    if (static_cast<long>(out.size()) > cap)
      throw TooLarge("enumeration cap exceeded");
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Linear maximization (P_LM)

namespace detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Max value of a'x with forbidden coordinates excluded; nullopt if the
// restricted set is empty.
inline std::optional<double> mset_value(const MSet& p, const std::vector<double>& a,
                                        const std::vector<char>& forbidden) {
  std::vector<int> idx;
  idx.reserve(p.d);
  for (int i = 0; i < p.d; ++i)
    if (!forbidden[i]) idx.push_back(i);
  if (static_cast<int>(idx.size()) < p.m) return std::nullopt;
  // Tie values prefer larger indices so the induced argmax is the
  // lexicographically smallest indicator.
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    if (a[i] != a[j]) return a[i] > a[j];
    return i > j;
  });
  idx.resize(p.m);
  std::sort(idx.begin(), idx.end());
  double v = 0.0;
  for (int i : idx) v += a[i];
  return v;
}

inline std::optional<double> dag_value(const DecisionSet& set,
                                       const std::vector<double>& a,
                                       const std::vector<char>& forbidden) {
  const auto& p = set.as<StPathDag>();
  int d = static_cast<int>(p.edges.size());
  std::vector<std::vector<int>> out_edges(p.num_nodes);
  for (int e = 0; e < d; ++e)
    if (!forbidden[e]) out_edges[p.edges[e].first].push_back(e);
  std::vector<double> dp(p.num_nodes, kNegInf);
  dp[p.source] = 0.0;
  for (int v : set.topo_order()) {
    if (dp[v] == kNegInf) continue;
    for (int e : out_edges[v]) {
      int w = p.edges[e].second;
      dp[w] = std::max(dp[w], dp[v] + a[e]);
    }
  }
  if (dp[p.sink] == kNegInf) return std::nullopt;
  return dp[p.sink];
}

// Successive-shortest-path min-cost flow on the unit-capacity bipartite
// network; small graphs, Bellman-Ford per augmentation.
struct UnitMcmf {
  struct Arc {
    int to;
    int cap;
    double cost;
    int rev;
  };
  std::vector<std::vector<Arc>> g;
  explicit UnitMcmf(int n) : g(n) {}
  void add(int u, int v, int cap, double cost) {
    g[u].push_back({v, cap, cost, static_cast<int>(g[v].size())});
    g[v].push_back({u, 0, -cost, static_cast<int>(g[u].size()) - 1});
  }
  // Bellman-Ford min-cost path in the residual graph. Returns the cost and
  // fills pre with (node, arc index) predecessors; nullopt when unreachable.
  std::optional<double> find_path(int s, int t,
                                  std::vector<std::pair<int, int>>& pre) {
    int n = static_cast<int>(g.size());
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    pre.assign(n, {-1, -1});
    dist[s] = 0.0;
    for (int it = 0; it < n; ++it) {
      bool changed = false;
      for (int u = 0; u < n; ++u) {
        if (dist[u] == std::numeric_limits<double>::infinity()) continue;
        for (int k = 0; k < static_cast<int>(g[u].size()); ++k) {
          const Arc& arc = g[u][k];
          if (arc.cap > 0 && dist[u] + arc.cost < dist[arc.to]) {
            dist[arc.to] = dist[u] + arc.cost;
            pre[arc.to] = {u, k};
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[t] == std::numeric_limits<double>::infinity()) return std::nullopt;
    return dist[t];
  }
  void apply(int s, int t, const std::vector<std::pair<int, int>>& pre) {
    for (int v = t; v != s;) {
      auto [u, k] = pre[v];
      g[u][k].cap -= 1;
      g[g[u][k].to][g[u][k].rev].cap += 1;
      v = u;
    }
  }
};

// Max-weight matching value. Successive shortest paths have nondecreasing
// cost, so non-perfect matchings stop at the first nonnegative one; perfect
// matchings must saturate both sides.
inline std::optional<double> matching_value(const BipartiteMatching& p,
                                            const std::vector<double>& a,
                                            const std::vector<char>& forbidden) {
  int d = static_cast<int>(p.edges.size());
  int n = 2 + p.left + p.right;
  int src = 0, snk = n - 1;
  UnitMcmf net(n);
  for (int l = 0; l < p.left; ++l) net.add(src, 1 + l, 1, 0.0);
  for (int r = 0; r < p.right; ++r) net.add(1 + p.left + r, snk, 1, 0.0);
  std::vector<int> edge_arc(d, -1);
  for (int e = 0; e < d; ++e) {
    if (forbidden[e]) continue;
    edge_arc[e] = static_cast<int>(net.g[1 + p.edges[e].first].size());
    net.add(1 + p.edges[e].first, 1 + p.left + p.edges[e].second, 1, -a[e]);
  }
  int rounds = p.perfect ? p.left : std::min(p.left, p.right);
  std::vector<std::pair<int, int>> pre;
  for (int it = 0; it < rounds; ++it) {
    auto c = net.find_path(src, snk, pre);
    if (!c) {
      if (p.perfect) return std::nullopt;
      break;
    }
    if (!p.perfect && *c >= 0.0) break;
    net.apply(src, snk, pre);
  }
  // Read the matched support and re-sum in index order.
  double v = 0.0;
  for (int e = 0; e < d; ++e) {
    if (edge_arc[e] < 0) continue;
    const auto& arc = net.g[1 + p.edges[e].first][edge_arc[e]];
    if (arc.cap == 0) v += a[e];
  }
  return v;
}

inline std::optional<double> explicit_value(const Explicit& p,
                                            const std::vector<double>& a,
                                            const std::vector<char>& forbidden) {
  std::optional<double> best;
  for (const auto& x : p.decisions) {
    bool ok = true;
    for (std::size_t i = 0; i < x.size() && ok; ++i)
      if (x[i] && forbidden[i]) ok = false;
    if (!ok) continue;
    double v = dot(a, x);
    if (!best || v > *best) best = v;
  }
  return best;
}

inline std::optional<double> lm_value(const DecisionSet& set,
                                      const std::vector<double>& a,
                                      const std::vector<char>& forbidden) {
  if (set.is<MSet>()) return mset_value(set.as<MSet>(), a, forbidden);
  if (set.is<StPathDag>()) return dag_value(set, a, forbidden);
  if (set.is<BipartiteMatching>())
    return matching_value(set.as<BipartiteMatching>(), a, forbidden);
  return explicit_value(set.as<Explicit>(), a, forbidden);
}

// Lexicographic tie-breaking: sweep coordinates in order and forbid each one
// whose removal keeps the optimal value. Whatever remains mandatory is the
// lexicographically smallest argmax.
template <class ValueFn>
Decision lex_min_argmax(int d, ValueFn&& value) {
  std::vector<char> forbidden(d, 0);
  auto v0 = value(forbidden);
  if (!v0) throw EmptySet("decision set is empty");
  Decision x(d, 0);
  for (int i = 0; i < d; ++i) {
    forbidden[i] = 1;
    auto v = value(forbidden);
    if (v && *v == *v0) {
      x[i] = 0;
    } else {
      forbidden[i] = 0;
      x[i] = 1;
    }
  }
  return x;
}

}  // namespace detail

// Returns argmax of a'x over X; ties resolved to the lexicographically
// smallest binary vector. Throws EmptySet when X is empty.
inline Decision linear_max(const DecisionSet& set, const std::vector<double>& a) {
  if (static_cast<int>(a.size()) != set.dimension())
    throw InvalidInstance("linear_max: weight vector has wrong length");
  for (double v : a)
    if (!std::isfinite(v)) throw InvalidInstance("linear_max: non-finite weight");
  return detail::lex_min_argmax(set.dimension(), [&](const std::vector<char>& f) {
    return detail::lm_value(set, a, f);
  });
}

inline bool DecisionSet::contains(const Decision& x) const {
  if (static_cast<int>(x.size()) != dim_) return false;
  for (int b : x)
    if (b != 0 && b != 1) return false;
  if (is<MSet>()) return support_size(x) == as<MSet>().m;
  if (is<StPathDag>()) {
    const auto& p = as<StPathDag>();
    // Chosen edges must trace a single source->sink walk.
    std::vector<int> chosen;
    for (int e = 0; e < dim_; ++e)
      if (x[e]) chosen.push_back(e);
    int v = p.source;
    std::size_t used = 0;
    while (v != p.sink) {
      int next = -1;
      for (int e : chosen)
        if (x[e] && p.edges[e].first == v) {
          if (next != -1) return false;  // branching
          next = e;
        }
      if (next == -1) return false;
      v = p.edges[next].second;
      ++used;
      if (used > chosen.size()) return false;
    }
    return used == chosen.size();
  }
  if (is<BipartiteMatching>()) {
    const auto& p = as<BipartiteMatching>();
    std::vector<int> ldeg(p.left, 0), rdeg(p.right, 0);
    for (int e = 0; e < dim_; ++e)
      if (x[e]) {
        if (++ldeg[p.edges[e].first] > 1) return false;
        if (++rdeg[p.edges[e].second] > 1) return false;
      }
    if (p.perfect) {
      for (int v : ldeg)
        if (v != 1) return false;
      for (int v : rdeg)
        if (v != 1) return false;
    }
    return true;
  }
  const auto& list = as<Explicit>().decisions;
  return std::binary_search(list.begin(), list.end(), x);
}

// ---------------------------------------------------------------------------
// Budgeted linear maximization (P_BLM)

namespace detail {

// DP value for max a'x subject to u'x >= s over m-sets, with the budget axis
// capped at s. States: (items chosen, capped budget).
inline std::optional<double> mset_blm_value(const MSet& p, const std::vector<double>& a,
                                            const std::vector<long>& u, long s,
                                            const std::vector<char>& forbidden) {
  long cap = std::max<long>(s, 0);
  std::vector<std::vector<double>> f(p.m + 1, std::vector<double>(cap + 1, kNegInf));
  f[0][0] = 0.0;
  for (int i = 0; i < p.d; ++i) {
    if (forbidden[i]) continue;
    for (int c = p.m - 1; c >= 0; --c) {
      for (long b = cap; b >= 0; --b) {
        if (f[c][b] == kNegInf) continue;
        long nb = std::min(cap, b + u[i]);
        double nv = f[c][b] + a[i];
        if (nv > f[c + 1][nb]) f[c + 1][nb] = nv;
      }
    }
  }
  if (f[p.m][cap] == kNegInf) return std::nullopt;
  return f[p.m][cap];
}

inline std::optional<double> dag_blm_value(const DecisionSet& set,
                                           const std::vector<double>& a,
                                           const std::vector<long>& u, long s,
                                           const std::vector<char>& forbidden) {
  const auto& p = set.as<StPathDag>();
  int d = static_cast<int>(p.edges.size());
  long cap = std::max<long>(s, 0);
  std::vector<std::vector<int>> out_edges(p.num_nodes);
  for (int e = 0; e < d; ++e)
    if (!forbidden[e]) out_edges[p.edges[e].first].push_back(e);
  std::vector<std::vector<double>> dp(
      p.num_nodes, std::vector<double>(cap + 1, kNegInf));
  dp[p.source][0] = 0.0;
  for (int v : set.topo_order()) {
    for (long b = 0; b <= cap; ++b) {
      if (dp[v][b] == kNegInf) continue;
      for (int e : out_edges[v]) {
        int w = p.edges[e].second;
        long nb = std::min(cap, b + u[e]);
        double nv = dp[v][b] + a[e];
        if (nv > dp[w][nb]) dp[w][nb] = nv;
      }
    }
  }
  if (dp[p.sink][cap] == kNegInf) return std::nullopt;
  return dp[p.sink][cap];
}

inline std::optional<double> blm_value(const DecisionSet& set,
                                       const std::vector<double>& a,
                                       const std::vector<long>& u, long s,
                                       const std::vector<char>& forbidden) {
  if (set.is<MSet>()) return mset_blm_value(set.as<MSet>(), a, u, s, forbidden);
  return dag_blm_value(set, a, u, s, forbidden);
}

inline std::optional<Decision> scan_blm(const std::vector<Decision>& decisions,
                                        const std::vector<double>& a,
                                        const std::vector<long>& u, long s) {
  const Decision* best = nullptr;
  double best_v = kNegInf;
  for (const auto& x : decisions) {
    if (dot(u, x) < s) continue;
    double v = dot(a, x);
    if (!best || v > best_v || (v == best_v && x < *best)) {
      best = &x;
      best_v = v;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

}  // namespace detail

// Returns argmax of a'x subject to u'x >= s, or nullopt when no decision
// meets the budget. Exact DP for m-sets and path DAGs; enumeration fallback
// for matchings and explicit sets (OracleUnavailable beyond the cap).
inline std::optional<Decision> budgeted_linear_max(const DecisionSet& set,
                                                   const std::vector<double>& a,
                                                   const std::vector<long>& u,
                                                   long s,
                                                   long cap = enumeration_cap()) {
  int d = set.dimension();
  if (static_cast<int>(a.size()) != d || static_cast<int>(u.size()) != d)
    throw InvalidInstance("budgeted_linear_max: wrong vector length");
  for (int i = 0; i < d; ++i) {
    if (!std::isfinite(a[i]) || a[i] < 0.0)
      throw InvalidInstance("budgeted_linear_max: weights must be finite and >= 0");
    if (u[i] < 0) throw InvalidInstance("budgeted_linear_max: u must be >= 0");
  }
  if (s < 0) s = 0;
  if (set.is<MSet>() || set.is<StPathDag>()) {
    std::vector<char> forbidden(d, 0);
    auto v0 = detail::blm_value(set, a, u, s, forbidden);
    if (!v0) return std::nullopt;
    Decision x(d, 0);
    for (int i = 0; i < d; ++i) {
      forbidden[i] = 1;
      auto v = detail::blm_value(set, a, u, s, forbidden);
      if (v && *v == *v0) {
        x[i] = 0;
      } else {
        forbidden[i] = 0;
        x[i] = 1;
      }
    }
    return x;
  }
  std::vector<Decision> all;
  try {
    all = enumerate_decisions(set, cap);
  } catch (const TooLarge&) {
    throw OracleUnavailable(
        "budgeted_linear_max: structure needs enumeration beyond the cap");
  }
  return detail::scan_blm(all, a, u, s);
}

// Values of max a'x subject to u'x >= r for every r in 0..budget_max, in one
// pass. profile[r] is -inf when the budget r is unattainable.
inline std::vector<double> budget_value_profile(const DecisionSet& set,
                                                const std::vector<double>& a,
                                                const std::vector<long>& u,
                                                long budget_max,
                                                long cap = enumeration_cap()) {
  long B = std::max<long>(budget_max, 0);
  std::vector<double> profile(B + 1, detail::kNegInf);
  if (set.is<MSet>()) {
    const auto& p = set.as<MSet>();
    std::vector<std::vector<double>> f(p.m + 1,
                                       std::vector<double>(B + 1, detail::kNegInf));
    f[0][0] = 0.0;
    for (int i = 0; i < p.d; ++i) {
      for (int c = p.m - 1; c >= 0; --c)
        for (long b = B; b >= 0; --b) {
          if (f[c][b] == detail::kNegInf) continue;
          long nb = std::min(B, b + u[i]);
          double nv = f[c][b] + a[i];
          if (nv > f[c + 1][nb]) f[c + 1][nb] = nv;
        }
    }
    for (long b = 0; b <= B; ++b) profile[b] = f[p.m][b];
  } else if (set.is<StPathDag>()) {
    const auto& p = set.as<StPathDag>();
    std::vector<std::vector<int>> out_edges(p.num_nodes);
    for (int e = 0; e < set.dimension(); ++e)
      out_edges[p.edges[e].first].push_back(e);
    std::vector<std::vector<double>> dp(
        p.num_nodes, std::vector<double>(B + 1, detail::kNegInf));
    dp[p.source][0] = 0.0;
    for (int v : set.topo_order())
      for (long b = 0; b <= B; ++b) {
        if (dp[v][b] == detail::kNegInf) continue;
        for (int e : out_edges[v]) {
          long nb = std::min(B, b + u[e]);
          double nv = dp[v][b] + a[e];
          if (nv > dp[p.edges[e].second][nb]) dp[p.edges[e].second][nb] = nv;
        }
      }
    for (long b = 0; b <= B; ++b) profile[b] = dp[p.sink][b];
  } else {
    std::vector<Decision> all;
    try {
      all = enumerate_decisions(set, cap);
    } catch (const TooLarge&) {
      throw OracleUnavailable(
          "budget_value_profile: structure needs enumeration beyond the cap");
    }
    for (const auto& x : all) {
      long b = std::min<long>(B, dot(u, x));
      double v = dot(a, x);
      if (v > profile[b]) profile[b] = v;
    }
  }
  // profile[r] = max over states with budget >= r.
  for (long b = B - 1; b >= 0; --b)
    profile[b] = std::max(profile[b], profile[b + 1]);
  return profile;
}

// ---------------------------------------------------------------------------
// Support completion and covering

// Decision minimizing the number of ones outside `allowed` (0-based indices).
inline Decision min_support_completion(const DecisionSet& set,
                                       const std::vector<int>& allowed) {
  std::vector<double> a(set.dimension(), -1.0);
  for (int i : allowed)
    if (i >= 0 && i < set.dimension()) a[i] = 0.0;
  return linear_max(set, a);
}

struct Covering {
  std::vector<int> uncovered;                     // coordinates never selected
  std::vector<std::optional<Decision>> witness;   // witness[i] set when covered
};

// For each coordinate, finds a decision selecting it (or reports it uncovered).
inline Covering check_covering(const DecisionSet& set) {
  int d = set.dimension();
  Covering cov;
  cov.witness.resize(d);
  for (int i = 0; i < d; ++i) {
    std::vector<double> a(d, 0.0);
    a[i] = 1.0;
    Decision x;
    try {
      x = linear_max(set, a);
    } catch (const EmptySet&) {
      for (int j = i; j < d; ++j) cov.uncovered.push_back(j);
      return cov;
    }
    if (x[i] == 1)
      cov.witness[i] = std::move(x);
    else
      cov.uncovered.push_back(i);
  }
  return cov;
}

// Largest decision size m = max_x 1'x.
inline int max_decision_size(const DecisionSet& set) {
  std::vector<double> ones(set.dimension(), 1.0);
  return support_size(linear_max(set, ones));
}

}  // namespace glkit
