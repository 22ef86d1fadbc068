#include "resub/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace resub {

namespace {

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

int64_t value_from(const ModelSpec& spec, int64_t imbalance, int64_t delta, int64_t z,
                   int64_t pairwise) {
  switch (spec.kind) {
    case ModelKind::Stage1: return imbalance;
    case ModelKind::Stage2Efficient: return delta;
    case ModelKind::Stage2Minimax: return z;
    case ModelKind::Stage2Weighted:
      return (spec.alpha.den - spec.alpha.num) * delta + spec.alpha.num * z;
    case ModelKind::Stage2Gini:
      return (spec.omega.den - spec.omega.num) * delta + spec.omega.num * pairwise;
  }
  return 0;
}

ObjectiveValue objective_from(const ModelSpec& spec, int64_t imbalance, int64_t delta, int64_t z,
                              int64_t pairwise) {
  ObjectiveValue v;
  v.kind = spec.kind;
  v.imbalance = imbalance;
  v.changes = delta;
  v.max_burden = z;
  v.gini_pairwise = pairwise;
  v.value_den = spec.value_den();
  v.value_num = value_from(spec, imbalance, delta, z, pairwise);
  return v;
}

// Incremental accounting shared by the exhaustive and branch-and-bound
// searches.  Tracks, per node, the committed in-out split plus undecided arc
// counts, and keeps an admissible per-node imbalance bound in sync.
struct SearchState {
  const Instance& inst;
  const ModelSpec& spec;
  int32_t N, R, S;
  std::vector<int32_t> d;        // committed in - out per (node, resource)
  std::vector<int64_t> pos, neg; // per node: sum of positive / negative parts of d
  std::vector<int32_t> uin, uout;
  std::vector<int64_t> term;     // per-node bound term
  int64_t s1bound = 0;           // sum of terms; exact imbalance at a leaf

  std::vector<int32_t> d2;  // in - out with undecided arcs pinned at phi0
  int64_t iu = 0;           // imbalance of that reference completion

  int64_t delta_c = 0;            // committed change count
  std::vector<int64_t> burden;    // committed per-scheduler changes
  std::vector<int32_t> cur;       // current resource per arc, -1 = undecided
  std::vector<int32_t> arc_sched; // scheduler owning each arc

  SearchState(const Instance& i, const ModelSpec& s)
      : inst(i), spec(s), N(i.num_nodes()), R(i.num_resources()), S(i.num_schedulers()) {
    d.assign(static_cast<size_t>(N) * R, 0);
    pos.assign(N, 0);
    neg.assign(N, 0);
    uin.assign(N, 0);
    uout.assign(N, 0);
    d2.assign(static_cast<size_t>(N) * R, 0);
    burden.assign(S, 0);
    cur.assign(inst.num_arcs(), -1);
    arc_sched.resize(inst.num_arcs());
    for (int32_t a = 0; a < inst.num_arcs(); ++a) {
      const Arc& arc = inst.arcs()[a];
      uout[arc.from]++;
      uin[arc.to]++;
      arc_sched[a] = inst.scheduler_of_node(arc.from);
      bump2(arc.from, arc.initial, -1);
      bump2(arc.to, arc.initial, +1);
    }
    term.assign(N, 0);
    for (int32_t n = 0; n < N; ++n) {
      term[n] = node_term(n);
      s1bound += term[n];
    }
  }

  void bump2(int32_t n, int32_t r, int32_t delta) {
    int32_t& v = d2[static_cast<size_t>(n) * R + r];
    iu -= std::abs(v);
    v += delta;
    iu += std::abs(v);
  }

  void bump(int32_t n, int32_t r, int32_t delta) {
    int32_t& v = d[static_cast<size_t>(n) * R + r];
    if (delta > 0) {
      if (v >= 0) pos[n]++; else neg[n]--;
    } else {
      if (v <= 0) neg[n]++; else pos[n]--;
    }
    v += delta;
  }

  int64_t node_term(int32_t n) const {
    int64_t a = uin[n], b = uout[n], p = pos[n], q = neg[n];
    int64_t c1 = std::min(a, q);
    int64_t c2 = std::min(b, p);
    return (p - c2) + (q - c1) + std::abs((a - c1) - (b - c2));
  }

  void refresh_terms(int32_t u, int32_t w) {
    s1bound -= term[u];
    term[u] = node_term(u);
    s1bound += term[u];
    if (w != u) {
      s1bound -= term[w];
      term[w] = node_term(w);
      s1bound += term[w];
    }
  }

  void fix(int32_t a, int32_t r) {
    const Arc& arc = inst.arcs()[a];
    uout[arc.from]--;
    bump(arc.from, r, -1);
    uin[arc.to]--;
    bump(arc.to, r, +1);
    refresh_terms(arc.from, arc.to);
    if (r != arc.initial) {
      bump2(arc.from, arc.initial, +1);
      bump2(arc.from, r, -1);
      bump2(arc.to, arc.initial, -1);
      bump2(arc.to, r, +1);
      delta_c++;
      burden[arc_sched[a]]++;
    }
    cur[a] = r;
  }

  void unfix(int32_t a, int32_t r) {
    const Arc& arc = inst.arcs()[a];
    uout[arc.from]++;
    bump(arc.from, r, +1);
    uin[arc.to]++;
    bump(arc.to, r, -1);
    refresh_terms(arc.from, arc.to);
    if (r != arc.initial) {
      bump2(arc.from, arc.initial, -1);
      bump2(arc.from, r, +1);
      bump2(arc.to, arc.initial, +1);
      bump2(arc.to, r, -1);
      delta_c--;
      burden[arc_sched[a]]--;
    }
    cur[a] = -1;
  }

  int64_t committed_z() const {
    int64_t z = 0;
    for (int64_t b : burden) z = std::max(z, b);
    return z;
  }

  int64_t committed_pairwise() const {
    int64_t p = 0;
    for (int32_t i = 0; i < S; ++i)
      for (int32_t j = i + 1; j < S; ++j) p += std::abs(burden[i] - burden[j]);
    return p;
  }

  // Admissible lower bound on the objective over all completions of the
  // current partial assignment.  Returns nullopt when no completion can meet
  // the imbalance cap.
  std::optional<int64_t> lower_bound() const {
    if (spec.kind == ModelKind::Stage1) return s1bound;
    if (s1bound > spec.imbalance_cap) return std::nullopt;
    // Every arc move shifts at most four unit counts, so reaching the cap
    // from the pinned-at-phi0 completion needs at least this many changes.
    int64_t rmin = 0;
    if (iu > spec.imbalance_cap) rmin = (iu - spec.imbalance_cap + 3) / 4;
    int64_t dmin = delta_c + rmin;
    switch (spec.kind) {
      case ModelKind::Stage2Efficient: return dmin;
      case ModelKind::Stage2Minimax:
        return std::max(committed_z(), (dmin + S - 1) / S);
      case ModelKind::Stage2Weighted: {
        int64_t z = std::max(committed_z(), (dmin + S - 1) / S);
        return (spec.alpha.den - spec.alpha.num) * dmin + spec.alpha.num * z;
      }
      case ModelKind::Stage2Gini:
        return (spec.omega.den - spec.omega.num) * dmin;
      default: return 0;
    }
  }

  // Exact leaf components (everything committed).
  ObjectiveValue leaf_objective() const {
    return objective_from(spec, s1bound, delta_c, committed_z(), committed_pairwise());
  }
};

int64_t product_guard(const ModelSpec& spec, int64_t guard) {
  double prod = 1.0;
  for (const auto& cs : spec.candidates) {
    prod *= static_cast<double>(cs.size());
    if (prod > static_cast<double>(guard)) return -1;
  }
  return static_cast<int64_t>(prod);
}

struct BruteContext {
  SearchState st;
  int64_t best = 0;
  bool have_best = false;
  std::vector<int32_t> best_assign;
  int64_t leaves = 0;

  // Optima collection pass (enumerate_optima).
  bool collecting = false;
  int64_t target = 0;
  int64_t cap = 0;
  std::vector<std::vector<int32_t>> optima;
  bool truncated = false;

  BruteContext(const Instance& inst, const ModelSpec& spec) : st(inst, spec) {}

  bool feasible_leaf() const {
    return st.spec.kind == ModelKind::Stage1 || st.s1bound <= st.spec.imbalance_cap;
  }

  // Returns false to abort the walk (only used once truncation is known).
  bool walk(int32_t depth) {
    if (depth == st.inst.num_arcs()) {
      ++leaves;
      if (!feasible_leaf()) return true;
      int64_t v = value_from(st.spec, st.s1bound, st.delta_c, st.committed_z(),
                             st.committed_pairwise());
      if (collecting) {
        if (v == target) {
          if (static_cast<int64_t>(optima.size()) < cap) {
            optima.push_back(st.cur);
          } else {
            truncated = true;
            return false;
          }
        }
        return true;
      }
      if (!have_best || v < best) {
        have_best = true;
        best = v;
        best_assign = st.cur;
      }
      return true;
    }
    for (int32_t r : st.spec.candidates[depth]) {
      st.fix(depth, r);
      bool go = walk(depth + 1);
      st.unfix(depth, r);
      if (!go) return false;
    }
    return true;
  }
};

Solution finish(const ModelSpec& spec, SolveStatus status, const std::vector<int32_t>* assign,
                int64_t nodes, int64_t t0, uint64_t seed, int64_t bound_num, bool bound_known) {
  Solution sol;
  sol.status = status;
  sol.nodes = nodes;
  sol.wall_ms = now_ms() - t0;
  sol.seed = seed;
  sol.bound_den = spec.value_den();
  sol.bound_num = bound_known ? bound_num : 0;
  if (assign) {
    Assignment phi;
    phi.res = *assign;
    EvalResult ev = evaluate(spec, phi);
    sol.objective = ev.objective;
    sol.assignment = std::move(phi);
    if (status == SolveStatus::Optimal) sol.bound_num = ev.objective.value_num;
  }
  return sol;
}

}  // namespace

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::LimitReached: return "limit";
  }
  return "?";
}

Solution solve_brute_force(const ModelSpec& spec, int64_t guard) {
  if (product_guard(spec, guard) < 0)
    throw Error("solve_brute_force: candidate cross product exceeds the guard of " +
                std::to_string(guard) + " assignments");
  int64_t t0 = now_ms();
  BruteContext ctx(*spec.instance, spec);
  ctx.walk(0);
  if (!ctx.have_best)
    return finish(spec, SolveStatus::Infeasible, nullptr, ctx.leaves, t0, 0, 0, false);
  return finish(spec, SolveStatus::Optimal, &ctx.best_assign, ctx.leaves, t0, 0, 0, false);
}

EnumerateResult enumerate_optima(const ModelSpec& spec, int64_t cap, int64_t guard) {
  if (cap < 1) throw Error("enumerate_optima: cap must be at least 1");
  if (product_guard(spec, guard) < 0)
    throw Error("enumerate_optima: candidate cross product exceeds the guard of " +
                std::to_string(guard) + " assignments");
  EnumerateResult res;
  BruteContext pass1(*spec.instance, spec);
  pass1.walk(0);
  if (!pass1.have_best) return res;

  BruteContext pass2(*spec.instance, spec);
  pass2.collecting = true;
  pass2.target = pass1.best;
  pass2.cap = cap;
  pass2.walk(0);
  res.truncated = pass2.truncated;
  res.optima.reserve(pass2.optima.size());
  for (auto& v : pass2.optima) {
    Assignment phi;
    phi.res = std::move(v);
    res.optima.push_back(std::move(phi));
  }
  Assignment first;
  first.res = pass1.best_assign;
  res.objective = evaluate(spec, first).objective;
  return res;
}

namespace {

struct ExactContext {
  SearchState st;
  const ModelSpec& spec;
  std::vector<int32_t> order;                 // branching order over arcs
  std::vector<std::vector<int32_t>> children; // per arc, candidate visit order
  int64_t best = 0;
  bool have_best = false;
  std::vector<int32_t> best_assign;
  int64_t nodes = 0;
  int64_t node_limit = -1;
  int64_t deadline_ms = -1;
  bool aborted = false;

  ExactContext(const ModelSpec& s) : st(*s.instance, s), spec(s) {}

  bool over_limit() {
    if (node_limit >= 0 && nodes > node_limit) return true;
    if (deadline_ms >= 0 && (nodes & 1023) == 0 && now_ms() > deadline_ms) return true;
    return false;
  }

  void dfs(size_t depth) {
    if (aborted) return;
    ++nodes;
    if (over_limit()) {
      aborted = true;
      return;
    }
    if (depth == order.size()) {
      if (spec.kind != ModelKind::Stage1 && st.s1bound > spec.imbalance_cap) return;
      int64_t v = value_from(spec, st.s1bound, st.delta_c, st.committed_z(),
                             st.committed_pairwise());
      if (!have_best || v < best || (v == best && st.cur < best_assign)) {
        have_best = true;
        best = v;
        best_assign = st.cur;
      }
      return;
    }
    int32_t a = order[depth];
    for (int32_t r : children[a]) {
      st.fix(a, r);
      std::optional<int64_t> lb = st.lower_bound();
      // Strict comparison keeps every tied optimum reachable, which is what
      // makes the lexicographic tie-break exact.
      if (lb && !(have_best && *lb > best)) dfs(depth + 1);
      st.unfix(a, r);
      if (aborted) return;
    }
  }
};

}  // namespace

Solution solve_exact(const ModelSpec& spec, const SolveLimits& limits) {
  ExactOptions opts;
  opts.limits = limits;
  return solve_exact(spec, opts);
}

Solution solve_exact(const ModelSpec& spec, const ExactOptions& opts) {
  const Instance& inst = *spec.instance;
  int64_t t0 = now_ms();
  ExactContext ctx(spec);
  ctx.node_limit = opts.limits.node_limit;
  if (opts.limits.time_limit_ms >= 0) ctx.deadline_ms = t0 + opts.limits.time_limit_ms;

  ctx.order.resize(inst.num_arcs());
  for (int32_t a = 0; a < inst.num_arcs(); ++a) ctx.order[a] = a;
  std::stable_sort(ctx.order.begin(), ctx.order.end(), [&](int32_t a, int32_t b) {
    return spec.candidates[a].size() > spec.candidates[b].size();
  });

  ctx.children.resize(inst.num_arcs());
  for (int32_t a = 0; a < inst.num_arcs(); ++a) {
    ctx.children[a] = spec.candidates[a];
    if (opts.guidance) {
      const std::vector<double>& score = (*opts.guidance)[a];
      std::stable_sort(ctx.children[a].begin(), ctx.children[a].end(),
                       [&](int32_t r1, int32_t r2) { return score[r1] > score[r2]; });
    }
  }

  if (opts.warm_start) {
    EvalResult ev = evaluate(spec, *opts.warm_start);  // throws if outside candidates
    if (!ev.feasible)
      throw Error("solve_exact: warm start violates the imbalance cap");
    ctx.have_best = true;
    ctx.best = ev.objective.value_num;
    ctx.best_assign = opts.warm_start->res;
  }

  std::optional<int64_t> root = ctx.st.lower_bound();
  int64_t root_bound = root.value_or(0);
  bool root_feasible = root.has_value();
  if (root_feasible) ctx.dfs(0);

  if (ctx.aborted) {
    Solution sol = finish(spec, SolveStatus::LimitReached,
                          ctx.have_best ? &ctx.best_assign : nullptr, ctx.nodes, t0, 0,
                          root_bound, true);
    return sol;
  }
  if (!ctx.have_best)
    return finish(spec, SolveStatus::Infeasible, nullptr, ctx.nodes, t0, 0, root_bound,
                  root_feasible);
  return finish(spec, SolveStatus::Optimal, &ctx.best_assign, ctx.nodes, t0, 0, 0, false);
}

namespace {

// Mutable assignment state for the local search.
struct IlsState {
  const Instance& inst;
  const ModelSpec& spec;
  int32_t N, R, S;
  std::vector<int32_t> d;  // in - out per (node, resource)
  int64_t imbalance = 0;
  std::vector<int32_t> cur;
  std::vector<int64_t> burden;
  int64_t delta = 0;

  IlsState(const Instance& i, const ModelSpec& s, const Assignment& phi)
      : inst(i), spec(s), N(i.num_nodes()), R(i.num_resources()), S(i.num_schedulers()) {
    d.assign(static_cast<size_t>(N) * R, 0);
    burden.assign(S, 0);
    cur = phi.res;
    for (int32_t a = 0; a < inst.num_arcs(); ++a) {
      const Arc& arc = inst.arcs()[a];
      add(arc.from, cur[a], -1);
      add(arc.to, cur[a], +1);
      if (cur[a] != arc.initial) {
        delta++;
        burden[inst.scheduler_of_node(arc.from)]++;
      }
    }
  }

  void add(int32_t n, int32_t r, int32_t delta_) {
    int32_t& v = d[static_cast<size_t>(n) * R + r];
    imbalance -= std::abs(v);
    v += delta_;
    imbalance += std::abs(v);
  }

  void adopt(const IlsState& o) {
    d = o.d;
    imbalance = o.imbalance;
    cur = o.cur;
    burden = o.burden;
    delta = o.delta;
  }

  // Imbalance change if arc a moved from its current resource to r.
  int64_t peek_imbalance(int32_t a, int32_t r) const {
    const Arc& arc = inst.arcs()[a];
    int32_t r0 = cur[a];
    // Merge the four unit updates so shared coordinates are handled once.
    std::array<std::pair<size_t, int32_t>, 4> upd{{{static_cast<size_t>(arc.from) * R + r0, +1},
                                                   {static_cast<size_t>(arc.from) * R + r, -1},
                                                   {static_cast<size_t>(arc.to) * R + r0, -1},
                                                   {static_cast<size_t>(arc.to) * R + r, +1}}};
    int64_t diff = 0;
    for (size_t i = 0; i < 4; ++i) {
      if (upd[i].second == 0) continue;
      int32_t net = upd[i].second;
      for (size_t j = i + 1; j < 4; ++j) {
        if (upd[j].first == upd[i].first) {
          net += upd[j].second;
          upd[j].second = 0;
        }
      }
      int32_t v = d[upd[i].first];
      diff += std::abs(v + net) - std::abs(v);
    }
    return diff;
  }

  void apply(int32_t a, int32_t r) {
    const Arc& arc = inst.arcs()[a];
    int32_t r0 = cur[a];
    add(arc.from, r0, +1);
    add(arc.from, r, -1);
    add(arc.to, r0, -1);
    add(arc.to, r, +1);
    bool was = r0 != arc.initial, is = r != arc.initial;
    if (was != is) {
      int32_t s = inst.scheduler_of_node(arc.from);
      delta += is ? 1 : -1;
      burden[s] += is ? 1 : -1;
    }
    cur[a] = r;
  }

  int64_t z() const {
    int64_t m = 0;
    for (int64_t b : burden) m = std::max(m, b);
    return m;
  }

  int64_t pairwise() const {
    int64_t p = 0;
    for (int32_t i = 0; i < S; ++i)
      for (int32_t j = i + 1; j < S; ++j) p += std::abs(burden[i] - burden[j]);
    return p;
  }

  int64_t value() const { return value_from(spec, imbalance, delta, z(), pairwise()); }

  // Objective scalar after a hypothetical move, without applying it.
  std::pair<int64_t, int64_t> peek_value(int32_t a, int32_t r) const {
    const Arc& arc = inst.arcs()[a];
    int64_t ni = imbalance + peek_imbalance(a, r);
    bool was = cur[a] != arc.initial, is = r != arc.initial;
    int64_t nd = delta + (was == is ? 0 : (is ? 1 : -1));
    int32_t s = inst.scheduler_of_node(arc.from);
    int64_t nb = burden[s] + (was == is ? 0 : (is ? 1 : -1));
    int64_t nz = 0, np = 0;
    for (int32_t t = 0; t < S; ++t) {
      int64_t bt = t == s ? nb : burden[t];
      nz = std::max(nz, bt);
    }
    if (spec.kind == ModelKind::Stage2Gini) {
      for (int32_t i = 0; i < S; ++i) {
        int64_t bi = i == s ? nb : burden[i];
        for (int32_t j = i + 1; j < S; ++j) {
          int64_t bj = j == s ? nb : burden[j];
          np += std::abs(bi - bj);
        }
      }
    }
    return {value_from(spec, ni, nd, nz, np), nd};
  }
};

}  // namespace

Solution solve_ils(const ModelSpec& spec, uint64_t seed, const IlsParams& params) {
  const Instance& inst = *spec.instance;
  int64_t t0 = now_ms();
  Rng rng(seed);
  bool capped = spec.kind != ModelKind::Stage1;
  IlsState st(inst, spec, Assignment::initial_of(inst));

  auto repair = [&](IlsState& s) {
    while (s.imbalance > spec.imbalance_cap) {
      int64_t best_gain = 0;
      int32_t ba = -1, br = -1;
      for (int32_t a = 0; a < inst.num_arcs(); ++a) {
        for (int32_t r : spec.candidates[a]) {
          if (r == s.cur[a]) continue;
          int64_t gain = s.peek_imbalance(a, r);
          if (gain < best_gain) {
            best_gain = gain;
            ba = a;
            br = r;
          }
        }
      }
      if (ba < 0) return false;
      s.apply(ba, br);
    }
    return true;
  };

  auto local_search = [&](IlsState& s) {
    while (true) {
      std::pair<int64_t, int64_t> cur_key{s.value(), s.delta};
      std::pair<int64_t, int64_t> best_key = cur_key;
      int32_t ba = -1, br = -1;
      for (int32_t a = 0; a < inst.num_arcs(); ++a) {
        for (int32_t r : spec.candidates[a]) {
          if (r == s.cur[a]) continue;
          if (capped && s.imbalance + s.peek_imbalance(a, r) > spec.imbalance_cap) continue;
          std::pair<int64_t, int64_t> key = s.peek_value(a, r);
          if (key < best_key) {
            best_key = key;
            ba = a;
            br = r;
          }
        }
      }
      if (ba < 0) break;
      s.apply(ba, br);
    }
  };

  if (capped && !repair(st)) {
    Solution sol;
    sol.status = SolveStatus::Infeasible;
    sol.seed = seed;
    sol.wall_ms = now_ms() - t0;
    sol.bound_den = spec.value_den();
    return sol;
  }
  local_search(st);

  std::vector<int32_t> best_assign = st.cur;
  std::pair<int64_t, int64_t> best_key{st.value(), st.delta};

  int32_t p = params.perturb_arcs > 0
                  ? params.perturb_arcs
                  : std::max<int32_t>(2, static_cast<int32_t>(
                                            (inst.num_arcs() + 49) / 50));  // ceil(0.02 |A|)
  p = std::min<int32_t>(p, inst.num_arcs());

  int32_t stall = 0;
  int64_t rounds = 0;
  while (stall < params.stall_rounds && rounds < params.max_rounds) {
    ++rounds;
    IlsState trial = st;
    std::vector<int32_t> picks = rng.sample_indices(inst.num_arcs(), p);
    for (int32_t a : picks) {
      const auto& cs = spec.candidates[a];
      trial.apply(a, cs[static_cast<size_t>(rng.next_below(cs.size()))]);
    }
    bool ok = !capped || trial.imbalance <= spec.imbalance_cap || repair(trial);
    if (ok && (!capped || trial.imbalance <= spec.imbalance_cap)) {
      local_search(trial);
      std::pair<int64_t, int64_t> key{trial.value(), trial.delta};
      if (key <= std::pair<int64_t, int64_t>{st.value(), st.delta}) st.adopt(trial);
      if (key < best_key) {
        best_key = key;
        best_assign = st.cur;
        stall = 0;
        continue;
      }
    }
    ++stall;
  }

  Assignment phi;
  phi.res = best_assign;
  EvalResult ev = evaluate(spec, phi);
  // The only optimality certificate a heuristic has is hitting the trivial
  // floor: the structural bound for stage 1, zero for the change objectives.
  int64_t trivial = spec.kind == ModelKind::Stage1 ? structural_lower_bound(inst) : 0;
  Solution sol;
  sol.status = ev.objective.value_num == trivial * ev.objective.value_den
                   ? SolveStatus::Optimal
                   : SolveStatus::Feasible;
  sol.assignment = std::move(phi);
  sol.objective = ev.objective;
  sol.bound_num = trivial * ev.objective.value_den;
  sol.bound_den = ev.objective.value_den;
  sol.nodes = rounds;
  sol.wall_ms = now_ms() - t0;
  sol.seed = seed;
  return sol;
}

json solution_to_json(const ModelSpec& spec, const Solution& sol) {
  json j;
  j["status"] = status_name(sol.status);
  j["kind"] = kind_name(spec.kind);
  if (sol.objective) {
    const ObjectiveValue& v = *sol.objective;
    j["objective"] = {{"imbalance", v.imbalance},
                      {"changes", v.changes},
                      {"max_burden", v.max_burden},
                      {"gini_pairwise", v.gini_pairwise},
                      {"value_num", v.value_num},
                      {"value_den", v.value_den},
                      {"value", v.value()}};
  } else {
    j["objective"] = nullptr;
  }
  j["bound"] = {{"num", sol.bound_num},
                {"den", sol.bound_den},
                {"value", static_cast<double>(sol.bound_num) / static_cast<double>(sol.bound_den)}};
  if (sol.assignment) {
    json m = json::object();
    for (const auto& [aid, rid] : sol.assignment->to_map(*spec.instance)) m[aid] = rid;
    j["assignment"] = m;
  } else {
    j["assignment"] = nullptr;
  }
  if (spec.kind != ModelKind::Stage1) j["imbalance_cap"] = spec.imbalance_cap;
  j["nodes"] = sol.nodes;
  j["wall_ms"] = sol.wall_ms;
  j["seed"] = sol.seed;
  return j;
}

}  // namespace resub
