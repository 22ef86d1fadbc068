#include "resub/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace resub {

Backend backend_from_name(const std::string& name) {
  if (name == "exact") return Backend::Exact;
  if (name == "ils") return Backend::Ils;
  if (name == "brute") return Backend::Brute;
  throw Error("unknown backend '" + name + "' (expected exact, ils or brute)");
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Exact: return "exact";
    case Backend::Ils: return "ils";
    case Backend::Brute: return "brute";
  }
  return "?";
}

const PortfolioEntry* Portfolio::find(const std::string& label) const {
  for (const PortfolioEntry& e : entries)
    if (e.label == label) return &e;
  return nullptr;
}

SolutionAnalytics analyze_solution(const Instance& inst, const Assignment& phi) {
  SolutionAnalytics a;
  a.burdens = burdens(inst, phi);
  a.shares.assign(inst.num_schedulers(), 0.0);
  if (a.burdens.total_changes > 0)
    for (int32_t s = 0; s < inst.num_schedulers(); ++s)
      a.shares[s] = static_cast<double>(a.burdens.per_scheduler[s]) /
                    static_cast<double>(a.burdens.total_changes);
  a.gini = gini_coefficient(a.burdens);
  std::tie(a.internal_changes, a.collaborative_changes) = classify_substitutions(inst, phi);
  return a;
}

namespace {

Solution run_backend(const ModelSpec& spec, Backend backend, const SolveLimits& limits,
                     uint64_t seed) {
  switch (backend) {
    case Backend::Exact: return solve_exact(spec, limits);
    case Backend::Ils: return solve_ils(spec, seed);
    case Backend::Brute: return solve_brute_force(spec);
  }
  throw Error("run_backend: unreachable");
}

Portfolio sweep_impl(const Instance& inst, const CandidateSets& cands, int64_t istar,
                     const std::vector<Rational>& weights, bool gini_kind, Backend backend,
                     const SolveLimits& limits, uint64_t seed) {
  std::set<std::pair<int64_t, int64_t>> distinct;
  for (const Rational& w : weights) {
    if (w.num > w.den) throw Error("sweep: weights must lie in [0, 1]");
    if (!distinct.insert({w.num, w.den}).second)
      throw Error("sweep: duplicate weight " + format_double(w.value()));
  }
  Portfolio pf;
  for (size_t i = 0; i < weights.size(); ++i) {
    const Rational& w = weights[i];
    ModelSpec spec = gini_kind ? build_stage2_gini(inst, cands, istar, w)
                               : build_stage2_weighted(inst, cands, istar, w);
    uint64_t run_seed = mix_seed(seed, i);
    PortfolioEntry e;
    e.label = std::string(gini_kind ? "omega=" : "alpha=") + format_double(w.value());
    e.params = json{{gini_kind ? "omega" : "alpha", {{"num", w.num}, {"den", w.den}}},
                    {"backend", backend_name(backend)},
                    {"istar", istar},
                    {"seed", run_seed}};
    e.solution = run_backend(spec, backend, limits, run_seed);
    if (e.solution.assignment) e.analytics = analyze_solution(inst, *e.solution.assignment);
    pf.entries.push_back(std::move(e));
  }
  mark_pareto_front(pf);
  return pf;
}

}  // namespace

Portfolio sweep_alpha(const Instance& inst, const CandidateSets& cands, int64_t istar,
                      const std::vector<Rational>& alphas, Backend backend,
                      const SolveLimits& limits, uint64_t seed) {
  return sweep_impl(inst, cands, istar, alphas, false, backend, limits, seed);
}

Portfolio sweep_omega(const Instance& inst, const CandidateSets& cands, int64_t istar,
                      const std::vector<Rational>& omegas, Backend backend,
                      const SolveLimits& limits, uint64_t seed) {
  return sweep_impl(inst, cands, istar, omegas, true, backend, limits, seed);
}

std::pair<int64_t, int64_t> classify_substitutions(const Instance& inst, const Assignment& phi) {
  if (phi.res.size() != static_cast<size_t>(inst.num_arcs()))
    throw Error("classify_substitutions: assignment does not cover every arc");
  int64_t internal = 0, collaborative = 0;
  for (int32_t a = 0; a < inst.num_arcs(); ++a) {
    if (phi.res[a] == inst.arcs()[a].initial) continue;
    const Arc& arc = inst.arcs()[a];
    if (inst.scheduler_of_node(arc.from) == inst.scheduler_of_node(arc.to))
      ++internal;
    else
      ++collaborative;
  }
  return {internal, collaborative};
}

double gini_coefficient(const BurdenVector& b) {
  if (b.per_scheduler.empty()) throw Error("gini_coefficient: empty burden vector");
  int64_t total = 0;
  for (int64_t v : b.per_scheduler) total += v;
  if (total == 0) return 0.0;
  int64_t pair_sum = 0;  // unordered pairs; the ordered-pair sum is twice this
  for (size_t i = 0; i < b.per_scheduler.size(); ++i)
    for (size_t j = i + 1; j < b.per_scheduler.size(); ++j)
      pair_sum += std::abs(b.per_scheduler[i] - b.per_scheduler[j]);
  return static_cast<double>(pair_sum) /
         (static_cast<double>(b.per_scheduler.size()) * static_cast<double>(total));
}

namespace {

// Minimal in-out counter used for replaying changes one at a time.
struct Replay {
  const Instance& inst;
  int32_t R;
  std::vector<int32_t> d;
  std::vector<int32_t> cur;
  int64_t imbalance = 0;

  explicit Replay(const Instance& i) : inst(i), R(i.num_resources()) {
    d.assign(static_cast<size_t>(i.num_nodes()) * R, 0);
    cur.reserve(i.num_arcs());
    for (const Arc& a : i.arcs()) {
      cur.push_back(a.initial);
      add(a.from, a.initial, -1);
      add(a.to, a.initial, +1);
    }
  }

  void add(int32_t n, int32_t r, int32_t delta) {
    int32_t& v = d[static_cast<size_t>(n) * R + r];
    imbalance -= std::abs(v);
    v += delta;
    imbalance += std::abs(v);
  }

  int64_t peek(int32_t a, int32_t r) const {
    const Arc& arc = inst.arcs()[a];
    int32_t r0 = cur[a];
    std::array<std::pair<size_t, int32_t>, 4> upd{{{static_cast<size_t>(arc.from) * R + r0, +1},
                                                   {static_cast<size_t>(arc.from) * R + r, -1},
                                                   {static_cast<size_t>(arc.to) * R + r0, -1},
                                                   {static_cast<size_t>(arc.to) * R + r, +1}}};
    int64_t diff = 0;
    for (size_t i = 0; i < 4; ++i) {
      if (upd[i].second == 0) continue;
      int32_t net = upd[i].second;
      for (size_t j = i + 1; j < 4; ++j)
        if (upd[j].first == upd[i].first) {
          net += upd[j].second;
          upd[j].second = 0;
        }
      diff += std::abs(d[upd[i].first] + net) - std::abs(d[upd[i].first]);
    }
    return diff;
  }

  void apply(int32_t a, int32_t r) {
    const Arc& arc = inst.arcs()[a];
    add(arc.from, cur[a], +1);
    add(arc.from, r, -1);
    add(arc.to, cur[a], -1);
    add(arc.to, r, +1);
    cur[a] = r;
  }
};

}  // namespace

std::vector<std::pair<double, int64_t>> partial_implementation_curve(
    const Instance& inst, const Assignment& phi_star, const std::vector<double>& levels) {
  if (phi_star.res.size() != static_cast<size_t>(inst.num_arcs()))
    throw Error("partial_implementation_curve: assignment does not cover every arc");
  for (size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 0 || levels[i] > 1)
      throw Error("partial_implementation_curve: levels must lie in [0, 1]");
    if (i > 0 && levels[i] < levels[i - 1])
      throw Error("partial_implementation_curve: levels must be sorted ascending");
  }

  Replay rp(inst);
  std::vector<int32_t> remaining;
  for (int32_t a = 0; a < inst.num_arcs(); ++a)
    if (phi_star.res[a] != inst.arcs()[a].initial) remaining.push_back(a);
  int64_t delta = static_cast<int64_t>(remaining.size());

  std::vector<int64_t> after;  // imbalance after the k best-ranked changes
  after.push_back(rp.imbalance);
  while (!remaining.empty()) {
    size_t best = 0;
    int64_t best_gain = rp.peek(remaining[0], phi_star.res[remaining[0]]);
    for (size_t i = 1; i < remaining.size(); ++i) {
      int64_t g = rp.peek(remaining[i], phi_star.res[remaining[i]]);
      if (g < best_gain) {
        best_gain = g;
        best = i;
      }
    }
    rp.apply(remaining[best], phi_star.res[remaining[best]]);
    after.push_back(rp.imbalance);
    remaining.erase(remaining.begin() + best);
  }

  std::vector<std::pair<double, int64_t>> curve;
  for (double f : levels) {
    int64_t k = static_cast<int64_t>(std::ceil(f * static_cast<double>(delta) - 1e-9));
    k = std::clamp<int64_t>(k, 0, delta);
    curve.emplace_back(f, after[static_cast<size_t>(k)]);
  }
  return curve;
}

std::vector<std::pair<std::string, std::vector<double>>> burden_distribution(const Portfolio& pf) {
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (const PortfolioEntry& e : pf.entries)
    if (e.analytics) rows.emplace_back(e.label, e.analytics->shares);
  return rows;
}

void mark_pareto_front(Portfolio& pf) {
  struct Point {
    size_t idx;
    int64_t delta, z;
  };
  std::vector<Point> pts;
  for (size_t i = 0; i < pf.entries.size(); ++i) {
    pf.entries[i].on_front = false;
    const PortfolioEntry& e = pf.entries[i];
    if (e.solution.status == SolveStatus::Optimal && e.solution.objective)
      pts.push_back({i, e.solution.objective->changes, e.solution.objective->max_burden});
  }
  for (const Point& p : pts) {
    bool dominated = false;
    for (const Point& q : pts) {
      if (q.idx == p.idx) continue;
      bool weak = q.delta <= p.delta && q.z <= p.z;
      bool strict = q.delta < p.delta || q.z < p.z;
      if (weak && (strict || q.idx < p.idx)) {  // ties keep the first label
        dominated = true;
        break;
      }
    }
    pf.entries[p.idx].on_front = !dominated;
  }
}

json portfolio_to_json(const Instance& inst, const Portfolio& pf) {
  json entries = json::array();
  std::vector<std::string> front;
  for (const PortfolioEntry& e : pf.entries) {
    json je;
    je["label"] = e.label;
    je["params"] = e.params;
    je["status"] = status_name(e.solution.status);
    if (e.solution.objective) {
      const ObjectiveValue& v = *e.solution.objective;
      je["objective"] = {{"imbalance", v.imbalance},   {"changes", v.changes},
                         {"max_burden", v.max_burden}, {"gini_pairwise", v.gini_pairwise},
                         {"value_num", v.value_num},   {"value_den", v.value_den}};
    } else {
      je["objective"] = nullptr;
    }
    if (e.solution.assignment) {
      json m = json::object();
      for (const auto& [aid, rid] : e.solution.assignment->to_map(inst)) m[aid] = rid;
      je["assignment"] = m;
    } else {
      je["assignment"] = nullptr;
    }
    if (e.analytics) {
      const SolutionAnalytics& a = *e.analytics;
      json bj = json::object(), sj = json::object();
      for (int32_t s = 0; s < inst.num_schedulers(); ++s) {
        bj[inst.schedulers()[s]] = a.burdens.per_scheduler[s];
        sj[inst.schedulers()[s]] = a.shares[s];
      }
      je["analytics"] = {{"burdens", bj},
                        {"shares", sj},
                        {"gini", a.gini},
                        {"internal", a.internal_changes},
                        {"collaborative", a.collaborative_changes}};
    } else {
      je["analytics"] = nullptr;
    }
    je["on_front"] = e.on_front;
    je["nodes"] = e.solution.nodes;
    je["wall_ms"] = e.solution.wall_ms;
    je["seed"] = e.solution.seed;
    entries.push_back(std::move(je));
    if (e.on_front) front.push_back(e.label);
  }
  return json{{"entries", entries}, {"front", front}};
}

}  // namespace resub
