#include "resub/instance_gen.hpp"

#include <algorithm>
#include <cmath>

#include "resub/solver.hpp"

namespace resub {

namespace {

std::string pad_id(const char* prefix, int32_t i, int32_t count) {
  size_t width = 1;
  for (int32_t c = count; c >= 10; c /= 10) ++width;
  std::string digits = std::to_string(i + 1);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

InstanceData generate_once(const ClassParams& p, const CompatMatrix& matrix, uint64_t attempt_seed) {
  Rng rng(attempt_seed);
  InstanceData d;

  for (int32_t n = 0; n < p.nodes; ++n) d.nodes.push_back(pad_id("n", n, p.nodes));

  // Contiguous scheduler blocks, sizes within one of each other.
  std::vector<std::vector<int32_t>> blocks(p.schedulers);
  int32_t node_at = 0;
  for (int32_t s = 0; s < p.schedulers; ++s) {
    int32_t size = p.nodes / p.schedulers + (s < p.nodes % p.schedulers ? 1 : 0);
    std::vector<std::string> members;
    for (int32_t i = 0; i < size; ++i) {
      blocks[s].push_back(node_at);
      members.push_back(d.nodes[node_at++]);
    }
    d.schedulers.emplace_back(pad_id("s", s, p.schedulers), members);
  }
  std::vector<int32_t> sched_of(p.nodes);
  for (int32_t s = 0; s < p.schedulers; ++s)
    for (int32_t n : blocks[s]) sched_of[n] = s;

  for (int32_t r = 0; r < p.resources; ++r) d.resources.push_back(matrix.resources[r]);

  // Size classes map to resource thirds: small volumes prefer the early
  // resource classes, large ones the late classes.
  auto band = [&](int32_t tercile) {
    int32_t third = (p.resources + 2) / 3;
    int32_t lo = tercile * third;
    int32_t hi = std::min(p.resources, lo + third);
    std::pair<int32_t, int32_t> out{lo, hi};
    if (lo >= hi) out = {0, p.resources};
    return out;
  };

  int64_t cross_target =
      p.schedulers > 1 ? std::llround(p.collaboration_ratio * p.arcs) : 0;
  int64_t internal_target = p.arcs - cross_target;

  // Connectivity attempt: chain every scheduler block internally, as far as
  // the internal budget allows.
  std::vector<std::pair<int32_t, int32_t>> ends;
  for (int32_t s = 0; s < p.schedulers && internal_target > static_cast<int64_t>(ends.size()); ++s)
    for (size_t i = 0; i + 1 < blocks[s].size() &&
                       internal_target > static_cast<int64_t>(ends.size());
         ++i)
      ends.emplace_back(blocks[s][i], blocks[s][i + 1]);

  std::vector<int32_t> fat;  // schedulers able to host internal arcs
  for (int32_t s = 0; s < p.schedulers; ++s)
    if (blocks[s].size() >= 2) fat.push_back(s);

  int64_t internal_left = internal_target - static_cast<int64_t>(ends.size());
  int64_t cross_left = cross_target;
  if (internal_left > 0 && fat.empty())
    throw Error("generate_instance: internal arcs requested but every scheduler has one node");

  std::vector<char> kind;  // 0 internal, 1 crossing, shuffled for arrival mix
  kind.insert(kind.end(), internal_left, 0);
  kind.insert(kind.end(), cross_left, 1);
  rng.shuffle(kind);
  for (char k : kind) {
    if (k == 0) {
      int32_t s = fat[static_cast<size_t>(rng.next_below(fat.size()))];
      const auto& b = blocks[s];
      int32_t u = b[static_cast<size_t>(rng.next_below(b.size()))];
      int32_t v;
      do {
        v = b[static_cast<size_t>(rng.next_below(b.size()))];
      } while (v == u);
      ends.emplace_back(u, v);
    } else {
      int32_t u = static_cast<int32_t>(rng.next_below(p.nodes));
      int32_t v;
      do {
        v = static_cast<int32_t>(rng.next_below(p.nodes));
      } while (sched_of[v] == sched_of[u]);
      ends.emplace_back(u, v);
    }
  }

  for (size_t a = 0; a < ends.size(); ++a) {
    ArcData arc;
    arc.id = pad_id("a", static_cast<int32_t>(a), p.arcs);
    arc.from = d.nodes[ends[a].first];
    arc.to = d.nodes[ends[a].second];
    arc.volume = rng.next_in(1.0, 100.0);
    arc.tod = rng.next_in(0.0, 24.0);
    arc.tow = rng.next_in(0.0, 168.0);
    arc.miles = std::exp(rng.next_in(std::log(10.0), std::log(2000.0)));
    int32_t tercile = arc.volume < 34.0 ? 0 : (arc.volume < 67.0 ? 1 : 2);
    arc.size_class = tercile == 0 ? "S" : (tercile == 1 ? "M" : "L");
    auto [lo, hi] = band(tercile);
    int32_t init = lo + static_cast<int32_t>(rng.next_below(hi - lo));
    arc.initial = d.resources[init];
    int32_t mrow = matrix.index_of(arc.initial);
    for (int32_t r = 0; r < p.resources; ++r)
      if (matrix.at(mrow, matrix.index_of(d.resources[r]))) arc.candidates.push_back(d.resources[r]);
    d.arcs.push_back(std::move(arc));
  }
  return d;
}

}  // namespace

Instance generate_instance(const ClassParams& params) {
  if (params.schedulers < 1 || params.nodes < 1 || params.arcs < 1 || params.resources < 1)
    throw Error("generate_instance: counts must be at least 1");
  if (params.collaboration_ratio < 0 || params.collaboration_ratio > 1)
    throw Error("generate_instance: collaboration ratio must lie in [0, 1]");
  if (params.arcs < params.nodes)
    throw Error("generate_instance: arc count must be at least the node count");
  if (params.schedulers > params.nodes)
    throw Error("generate_instance: more schedulers than nodes");
  const CompatMatrix matrix = params.matrix.resources.empty() ? builtin_matrix() : params.matrix;
  if (params.resources > matrix.size())
    throw Error("generate_instance: resource count exceeds the compatibility matrix");

  int64_t seen_lo = -1, seen_hi = -1;
  for (int32_t attempt = 0; attempt < params.retry_budget; ++attempt) {
    InstanceData data = generate_once(params, matrix, mix_seed(params.seed, attempt));
    data.meta = json{{"generator",
                      {{"class", params.label},
                       {"seed", params.seed},
                       {"attempt", attempt},
                       {"collaboration_ratio", params.collaboration_ratio}}}};
    Instance inst = Instance::from_data(std::move(data));
    int64_t i0 = total_imbalance(inst, Assignment::initial_of(inst)).total;
    if (seen_lo < 0 || i0 < seen_lo) seen_lo = i0;
    if (i0 > seen_hi) seen_hi = i0;
    bool ok_lo = i0 >= params.imbalance_lo;
    bool ok_hi = params.imbalance_hi < 0 || i0 <= params.imbalance_hi;
    if (ok_lo && ok_hi) return inst;
  }
  throw Error("generate_instance: initial imbalance band [" +
              std::to_string(params.imbalance_lo) + ", " +
              (params.imbalance_hi < 0 ? std::string("inf") : std::to_string(params.imbalance_hi)) +
              "] not reached in " + std::to_string(params.retry_budget) +
              " attempts (achieved range [" + std::to_string(seen_lo) + ", " +
              std::to_string(seen_hi) + "])");
}

std::vector<RefSolution> generate_reference_pool(const std::vector<ClassParams>& classes,
                                                 int32_t pool_size, uint64_t seed,
                                                 int32_t alternates) {
  if (classes.empty()) throw Error("generate_reference_pool: no class parameters");
  if (pool_size < 1) throw Error("generate_reference_pool: pool size must be at least 1");
  if (alternates < 1) throw Error("generate_reference_pool: alternates must be at least 1");

  std::vector<RefSolution> refs;
  int32_t index = 0;
  for (const ClassParams& base : classes) {
    for (int32_t week = 0; week < pool_size; ++week, ++index) {
      ClassParams p = base;
      p.seed = mix_seed(seed, static_cast<uint64_t>(index));
      auto inst = std::make_shared<const Instance>(generate_instance(p));

      ModelSpec s1 = build_stage1(*inst, full_candidates(*inst));
      Solution sol1 = solve_exact(s1);
      ModelSpec s2 = build_stage2_efficient(*inst, full_candidates(*inst),
                                            sol1.objective->imbalance);
      if (alternates == 1) {
        Solution sol2 = solve_exact(s2);
        refs.push_back({inst, *sol2.assignment});
      } else {
        EnumerateResult en = enumerate_optima(s2, alternates);
        for (const Assignment& phi : en.optima) refs.push_back({inst, phi});
      }
    }
  }
  return refs;
}

}  // namespace resub
