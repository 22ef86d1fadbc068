#pragma once

#include "resub/compat.hpp"
#include "resub/scorer.hpp"

namespace resub {

// Shape of one synthetic instance class.  The imbalance band is inclusive;
// set hi negative for "no upper limit" and lo to 0 for "no lower limit".
struct ClassParams {
  std::string label = "custom";
  int32_t schedulers = 2;
  int32_t nodes = 10;
  int32_t arcs = 20;
  int32_t resources = 4;
  int64_t imbalance_lo = 1;
  int64_t imbalance_hi = -1;
  double collaboration_ratio = 0.3;
  uint64_t seed = 1;
  CompatMatrix matrix;  // empty -> builtin fleet table
  int32_t retry_budget = 200;
};

Instance generate_instance(const ClassParams& params);

// Weekly history: pool_size instances per class with per-week seeds, each
// paired with its exactly solved minimal-change plan.  When alternates > 1,
// additional tied optima are enumerated as extra references.
std::vector<RefSolution> generate_reference_pool(const std::vector<ClassParams>& classes,
                                                 int32_t pool_size, uint64_t seed,
                                                 int32_t alternates = 2);

}  // namespace resub
