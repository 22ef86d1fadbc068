#pragma once

#include <array>
#include <iosfwd>
#include <utility>
#include <vector>

#include "resub/core.hpp"

namespace resub {

// Directed edge betweenness: for each arc, the fraction of shortest paths
// (over all ordered node pairs with at least one path) that traverse it.
// Parallel arcs are distinct paths and accumulate separately.
struct BetweennessReport {
  std::vector<double> values;  // aligned with Instance::arcs()
  bool sampled = false;
  int32_t samples = 0;   // pivot count when sampled, |N| otherwise
  uint64_t seed = 0;
  bool weighted = false;  // miles-weighted distances instead of hop counts
};

BetweennessReport edge_betweenness_exact(const Instance& inst, bool miles_weighted = false);

// Pivot estimate: accumulate from `samples` distinct source nodes and scale
// by |N| / samples.  With samples == |N| this equals the exact report.
BetweennessReport edge_betweenness_sampled(const Instance& inst, int32_t samples, uint64_t seed,
                                           bool miles_weighted = false);

// Nearest-rank quantiles of the betweenness values (rank = ceil(q * n)).
std::pair<double, double> quantile_thresholds(const BetweennessReport& rep, double q1, double q2);

enum class ArcBand : int8_t { Low = 0, Medium = 1, High = 2 };

// Per-arc candidate budget derived from centrality: busier corridors get a
// deeper candidate list.
struct KappaAssignment {
  std::vector<ArcBand> bands;   // aligned with Instance::arcs()
  std::vector<int32_t> kappa;
  double tau1 = 0;
  double tau2 = 0;
  std::array<int32_t, 3> class_kappas = {1, 3, 5};
};

KappaAssignment assign_kappa(const BetweennessReport& rep, std::pair<double, double> taus,
                             std::array<int32_t, 3> class_kappas = {1, 3, 5});

void write_kappa_csv(const Instance& inst, const BetweennessReport& rep,
                     const KappaAssignment& ka, std::ostream& out);

const char* band_name(ArcBand b);

}  // namespace resub
