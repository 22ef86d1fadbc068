#pragma once

// Shared desk fixtures and small independent oracles for the test suite.  The
// oracles deliberately use different algorithms than the library (direct
// recounting, per-pair path DP) so agreement is meaningful.

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "resub/core.hpp"

namespace resub::fixtures {

inline ArcData arc(std::string id, std::string from, std::string to, std::string initial,
                   std::vector<std::string> candidates, double miles = 0.0) {
  ArcData a;
  a.id = std::move(id);
  a.from = std::move(from);
  a.to = std::move(to);
  a.initial = std::move(initial);
  a.candidates = std::move(candidates);
  a.miles = miles;
  return a;
}

// Two nodes, two opposing arcs with mismatched resources, one scheduler.
inline Instance make_t1() {
  InstanceData d;
  d.nodes = {"n1", "n2"};
  d.resources = {"r1", "r2"};
  d.schedulers = {{"s1", {"n1", "n2"}}};
  d.arcs = {arc("a1", "n1", "n2", "r1", {"r1", "r2"}),
            arc("a2", "n2", "n1", "r2", {"r1", "r2"})};
  return Instance::from_data(std::move(d));
}

// Three-node cycle split across two schedulers.
inline Instance make_d1() {
  InstanceData d;
  d.nodes = {"n1", "n2", "n3"};
  d.resources = {"r1", "r2"};
  d.schedulers = {{"s1", {"n1", "n2"}}, {"s2", {"n3"}}};
  d.arcs = {arc("a1", "n1", "n2", "r1", {"r1", "r2"}),
            arc("a2", "n2", "n3", "r2", {"r1", "r2"}),
            arc("a3", "n3", "n1", "r1", {"r1", "r2"})};
  return Instance::from_data(std::move(d));
}

// Directed path n1 -> n2 -> n3, for betweenness.
inline Instance make_p3() {
  InstanceData d;
  d.nodes = {"n1", "n2", "n3"};
  d.resources = {"r1"};
  d.schedulers = {{"s1", {"n1", "n2", "n3"}}};
  d.arcs = {arc("e1", "n1", "n2", "r1", {"r1"}), arc("e2", "n2", "n3", "r1", {"r1"})};
  return Instance::from_data(std::move(d));
}

// n1 -> {n2, n3} -> n4: two equal-length n1-to-n4 paths split the path count.
inline Instance make_diamond() {
  InstanceData d;
  d.nodes = {"n1", "n2", "n3", "n4"};
  d.resources = {"r1"};
  d.schedulers = {{"s1", {"n1", "n2", "n3", "n4"}}};
  d.arcs = {arc("e1", "n1", "n2", "r1", {"r1"}), arc("e2", "n1", "n3", "r1", {"r1"}),
            arc("e3", "n2", "n4", "r1", {"r1"}), arc("e4", "n3", "n4", "r1", {"r1"})};
  return Instance::from_data(std::move(d));
}

// Three disjoint 3-cycles, each fixable either by one change on the arc owned
// by scheduler s1 or by two changes on the arcs owned by the other schedulers.
// The unique minimum-change plan loads s1 with all three changes, while the
// minimax plan spreads the burden at the cost of one extra change: efficiency
// and fairness separate strictly on this instance.
inline Instance make_e1() {
  InstanceData d;
  d.nodes = {"u1", "v1", "w1", "u2", "v2", "w2", "u3", "v3", "w3"};
  d.resources = {"r1", "r2"};
  d.schedulers = {{"s1", {"w1", "w2", "w3"}},
                  {"s2", {"u1", "v1", "u3"}},
                  {"s3", {"u2", "v2", "v3"}}};
  auto tri = [&](int i) {
    std::string n = std::to_string(i);
    d.arcs.push_back(arc("t" + n + "a", "u" + n, "v" + n, "r1", {"r1", "r2"}));
    d.arcs.push_back(arc("t" + n + "b", "v" + n, "w" + n, "r1", {"r1", "r2"}));
    d.arcs.push_back(arc("t" + n + "c", "w" + n, "u" + n, "r2", {"r1", "r2"}));
  };
  tri(1);
  tri(2);
  tri(3);
  return Instance::from_data(std::move(d));
}

// Direct per-node, per-resource recount of I(phi) via string maps.
inline int64_t oracle_imbalance(const Instance& inst, const Assignment& phi) {
  std::map<std::pair<std::string, std::string>, int64_t> in, out;
  for (int32_t a = 0; a < inst.num_arcs(); ++a) {
    const Arc& arc = inst.arcs()[a];
    const std::string& r = inst.resources()[phi[a]];
    out[{inst.nodes()[arc.from], r}] += 1;
    in[{inst.nodes()[arc.to], r}] += 1;
  }
  int64_t total = 0;
  std::set<std::pair<std::string, std::string>> keys;
  for (auto& [k, v] : in) keys.insert(k);
  for (auto& [k, v] : out) keys.insert(k);
  for (auto& k : keys) {
    int64_t i = in.count(k) ? in[k] : 0;
    int64_t o = out.count(k) ? out[k] : 0;
    total += std::abs(i - o);
  }
  return total;
}

// Per-pair shortest-path counting oracle for edge betweenness: for every
// source, a BFS (or Dijkstra on miles) gives distances and path counts from
// both ends of each arc; sigma_ij(a) = sigma(i, u) * sigma(v, j) when the arc
// lies on a shortest i-j path.  O(n^2 m), fine at test scale.
inline std::vector<double> oracle_betweenness(const Instance& inst, bool miles_weighted = false) {
  int32_t n = inst.num_nodes();
  const double inf = 1e300;
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, inf));
  std::vector<std::vector<double>> sigma(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<std::pair<int32_t, double>>> adj(n);
  for (const Arc& a : inst.arcs())
    adj[a.from].push_back({a.to, miles_weighted ? a.miles : 1.0});

  for (int32_t s = 0; s < n; ++s) {
    auto& ds = dist[s];
    auto& ss = sigma[s];
    ds[s] = 0;
    ss[s] = 1;
    if (!miles_weighted) {
      std::deque<int32_t> q{s};
      while (!q.empty()) {
        int32_t v = q.front();
        q.pop_front();
        for (auto [w, len] : adj[v]) {
          if (ds[w] >= inf) {
            ds[w] = ds[v] + 1;
            q.push_back(w);
          }
          if (ds[w] == ds[v] + 1) ss[w] += ss[v];
        }
      }
    } else {
      std::vector<bool> done(n, false);
      for (;;) {
        int32_t v = -1;
        for (int32_t i = 0; i < n; ++i)
          if (!done[i] && ds[i] < inf && (v < 0 || ds[i] < ds[v])) v = i;
        if (v < 0) break;
        done[v] = true;
        for (auto [w, len] : adj[v]) {
          if (ds[v] + len < ds[w]) {
            ds[w] = ds[v] + len;
            ss[w] = 0;
          }
          if (!done[w] && ds[v] + len == ds[w]) ss[w] += ss[v];
        }
      }
    }
  }

  std::vector<double> acc(inst.num_arcs(), 0.0);
  for (int32_t i = 0; i < n; ++i)
    for (int32_t j = 0; j < n; ++j) {
      if (i == j || dist[i][j] >= inf || sigma[i][j] == 0) continue;
      for (int32_t a = 0; a < inst.num_arcs(); ++a) {
        const Arc& arc = inst.arcs()[a];
        double len = miles_weighted ? arc.miles : 1.0;
        if (dist[i][arc.from] >= inf || dist[arc.to][j] >= inf) continue;
        if (dist[i][arc.from] + len + dist[arc.to][j] == dist[i][j])
          acc[a] += sigma[i][arc.from] * sigma[arc.to][j] / sigma[i][j];
      }
    }
  return acc;
}

// Random small instance with full node coverage and arbitrary candidate sets;
// independent of the instance generator module so solver tests do not inherit
// its structure.
inline Instance random_instance(Rng& rng, int32_t max_nodes, int32_t max_arcs,
                                int32_t max_resources, int32_t max_schedulers,
                                int32_t min_arcs = 2) {
  int32_t nn = static_cast<int32_t>(rng.next_int(2, max_nodes));
  int32_t na = static_cast<int32_t>(rng.next_int(min_arcs, max_arcs));
  int32_t nr = static_cast<int32_t>(rng.next_int(2, max_resources));
  int32_t ns = static_cast<int32_t>(rng.next_int(1, std::min(max_schedulers, nn)));

  InstanceData d;
  for (int32_t i = 0; i < nn; ++i) d.nodes.push_back("n" + std::to_string(i + 1));
  for (int32_t r = 0; r < nr; ++r) d.resources.push_back("r" + std::to_string(r + 1));
  std::vector<std::vector<std::string>> owned(ns);
  for (int32_t i = 0; i < nn; ++i) {
    int32_t s = i < ns ? i : static_cast<int32_t>(rng.next_below(ns));
    owned[s].push_back(d.nodes[i]);
  }
  for (int32_t s = 0; s < ns; ++s) d.schedulers.push_back({"s" + std::to_string(s + 1), owned[s]});

  for (int32_t a = 0; a < na; ++a) {
    int32_t from = static_cast<int32_t>(rng.next_below(nn));
    int32_t to = static_cast<int32_t>(rng.next_below(nn));
    if (to == from) to = (to + 1) % nn;
    std::vector<std::string> cands;
    for (int32_t r = 0; r < nr; ++r)
      if (rng.next_unit() < 0.6) cands.push_back(d.resources[r]);
    if (cands.empty()) cands.push_back(d.resources[rng.next_below(nr)]);
    std::string initial = cands[rng.next_below(cands.size())];
    double miles = static_cast<double>(rng.next_int(1, 40));
    ArcData ad = arc("a" + std::to_string(a + 1), d.nodes[from], d.nodes[to], initial, cands, miles);
    ad.volume = static_cast<double>(rng.next_int(1, 100));
    ad.tod = rng.next_in(0.0, 24.0);
    ad.tow = rng.next_in(0.0, 168.0);
    ad.size_class = ad.volume < 34 ? "S" : (ad.volume < 67 ? "M" : "L");
    d.arcs.push_back(std::move(ad));
  }
  return Instance::from_data(std::move(d));
}

}  // namespace resub::fixtures
