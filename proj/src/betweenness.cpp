#include "resub/betweenness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

namespace resub {

namespace {

struct Adjacency {
  std::vector<std::vector<int32_t>> out;  // arc indices per origin node
  explicit Adjacency(const Instance& inst) : out(inst.num_nodes()) {
    for (int32_t a = 0; a < inst.num_arcs(); ++a) out[inst.arcs()[a].from].push_back(a);
  }
};

// One Brandes pass from `source`, accumulating per-arc dependencies into acc.
void accumulate_from(const Instance& inst, const Adjacency& adj, int32_t source,
                     bool miles_weighted, std::vector<double>& acc) {
  int32_t n = inst.num_nodes();
  std::vector<double> sigma(n, 0.0);
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::vector<int32_t>> pred_arcs(n);
  std::vector<int32_t> order;  // settle order, nondecreasing distance
  order.reserve(n);
  sigma[source] = 1.0;
  dist[source] = 0.0;

  if (!miles_weighted) {
    std::queue<int32_t> q;
    q.push(source);
    order.push_back(source);
    while (!q.empty()) {
      int32_t v = q.front();
      q.pop();
      for (int32_t a : adj.out[v]) {
        int32_t w = inst.arcs()[a].to;
        if (std::isinf(dist[w])) {
          dist[w] = dist[v] + 1;
          q.push(w);
          order.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          pred_arcs[w].push_back(a);
        }
      }
    }
  } else {
    using Entry = std::pair<double, int32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
    std::vector<char> settled(n, 0);
    pq.emplace(0.0, source);
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (settled[v]) continue;
      settled[v] = 1;
      order.push_back(v);
      for (int32_t a : adj.out[v]) {
        int32_t w = inst.arcs()[a].to;
        double nd = d + inst.arcs()[a].miles;
        if (nd < dist[w]) {
          dist[w] = nd;
          sigma[w] = sigma[v];
          pred_arcs[w] = {a};
          pq.emplace(nd, w);
        } else if (nd == dist[w]) {
          sigma[w] += sigma[v];
          pred_arcs[w].push_back(a);
        }
      }
    }
  }

  std::vector<double> delta(n, 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int32_t w = *it;
    for (int32_t a : pred_arcs[w]) {
      int32_t v = inst.arcs()[a].from;
      double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
      acc[a] += c;
      delta[v] += c;
    }
  }
}

BetweennessReport run(const Instance& inst, const std::vector<int32_t>& sources, double scale,
                      bool miles_weighted) {
  Adjacency adj(inst);
  BetweennessReport rep;
  rep.values.assign(inst.num_arcs(), 0.0);
  rep.weighted = miles_weighted;
  for (int32_t s : sources) accumulate_from(inst, adj, s, miles_weighted, rep.values);
  if (scale != 1.0)
    for (double& v : rep.values) v *= scale;
  return rep;
}

}  // namespace

BetweennessReport edge_betweenness_exact(const Instance& inst, bool miles_weighted) {
  std::vector<int32_t> sources(inst.num_nodes());
  for (int32_t i = 0; i < inst.num_nodes(); ++i) sources[i] = i;
  BetweennessReport rep = run(inst, sources, 1.0, miles_weighted);
  rep.samples = inst.num_nodes();
  return rep;
}

BetweennessReport edge_betweenness_sampled(const Instance& inst, int32_t samples, uint64_t seed,
                                           bool miles_weighted) {
  if (samples < 1 || samples > inst.num_nodes())
    throw Error("edge_betweenness_sampled: samples must be in [1, |N|]");
  Rng rng(seed);
  std::vector<int32_t> sources = rng.sample_indices(inst.num_nodes(), samples);
  std::sort(sources.begin(), sources.end());
  double scale = static_cast<double>(inst.num_nodes()) / samples;
  BetweennessReport rep = run(inst, sources, scale, miles_weighted);
  rep.sampled = true;
  rep.samples = samples;
  rep.seed = seed;
  return rep;
}

std::pair<double, double> quantile_thresholds(const BetweennessReport& rep, double q1, double q2) {
  if (rep.values.empty()) throw Error("quantile_thresholds: empty betweenness report");
  if (q1 < 0 || q2 < 0 || q1 > 1 || q2 > 1 || q1 > q2)
    throw Error("quantile_thresholds: need 0 <= q1 <= q2 <= 1");
  std::vector<double> sorted = rep.values;
  std::sort(sorted.begin(), sorted.end());
  auto nearest_rank = [&](double q) {
    int64_t n = static_cast<int64_t>(sorted.size());
    int64_t rank = static_cast<int64_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<int64_t>(rank, 1, n);
    return sorted[rank - 1];
  };
  return {nearest_rank(q1), nearest_rank(q2)};
}

KappaAssignment assign_kappa(const BetweennessReport& rep, std::pair<double, double> taus,
                             std::array<int32_t, 3> class_kappas) {
  if (taus.first > taus.second) throw Error("assign_kappa: thresholds must satisfy tau1 <= tau2");
  if (class_kappas[0] < 1 || class_kappas[0] > class_kappas[1] || class_kappas[1] > class_kappas[2])
    throw Error("assign_kappa: class kappas must be nondecreasing and >= 1");
  KappaAssignment ka;
  ka.tau1 = taus.first;
  ka.tau2 = taus.second;
  ka.class_kappas = class_kappas;
  ka.bands.reserve(rep.values.size());
  ka.kappa.reserve(rep.values.size());
  for (double b : rep.values) {
    ArcBand band = b >= ka.tau2 ? ArcBand::High : (b >= ka.tau1 ? ArcBand::Medium : ArcBand::Low);
    ka.bands.push_back(band);
    ka.kappa.push_back(class_kappas[static_cast<int>(band)]);
  }
  return ka;
}

const char* band_name(ArcBand b) {
  switch (b) {
    case ArcBand::Low: return "low";
    case ArcBand::Medium: return "medium";
    case ArcBand::High: return "high";
  }
  return "?";
}

void write_kappa_csv(const Instance& inst, const BetweennessReport& rep,
                     const KappaAssignment& ka, std::ostream& out) {
  if (rep.values.size() != static_cast<size_t>(inst.num_arcs()) ||
      ka.kappa.size() != rep.values.size())
    throw Error("write_kappa_csv: report/assignment size mismatch");
  out << "arc_id,betweenness,class,kappa\n";
  for (int32_t a = 0; a < inst.num_arcs(); ++a)
    out << inst.arcs()[a].id << "," << format_double(rep.values[a]) << ","
        << band_name(ka.bands[a]) << "," << ka.kappa[a] << "\n";
}

}  // namespace resub
