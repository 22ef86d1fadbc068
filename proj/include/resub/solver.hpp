#pragma once

#include <optional>

#include "resub/models.hpp"

namespace resub {

enum class SolveStatus { Optimal, Feasible, Infeasible, LimitReached };

const char* status_name(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<Assignment> assignment;
  std::optional<ObjectiveValue> objective;
  // Proven lower bound on the objective scalar (same denominator as the
  // objective).  Equals the objective when status is Optimal.
  int64_t bound_num = 0;
  int64_t bound_den = 1;
  int64_t nodes = 0;  // search nodes (exact/brute) or rounds (heuristic)
  int64_t wall_ms = 0;
  uint64_t seed = 0;
};

struct SolveLimits {
  int64_t time_limit_ms = -1;  // negative = unlimited
  int64_t node_limit = -1;
};

struct ExactOptions {
  SolveLimits limits;
  // Optional per-arc resource scores (outer index = arc, inner aligned with
  // the instance resource list).  Children are explored best-score first.
  const std::vector<std::vector<double>>* guidance = nullptr;
  // Optional feasible starting incumbent, e.g. from the local search.
  const Assignment* warm_start = nullptr;
};

// Exhaustive lexicographic scan over the candidate cross product.  Refuses
// products above the guard (default 1e7 assignments).
Solution solve_brute_force(const ModelSpec& spec, int64_t guard = 10'000'000);

struct EnumerateResult {
  std::vector<Assignment> optima;  // lexicographic order
  bool truncated = false;
  ObjectiveValue objective;  // shared optimum value (when any)
};

EnumerateResult enumerate_optima(const ModelSpec& spec, int64_t cap = 1000,
                                 int64_t guard = 10'000'000);

// Depth-first branch and bound with admissible per-kind bounds.  Returns the
// lexicographically smallest optimal assignment; pruning is strict-greater
// only, so value ties are always resolved by explicit comparison.
Solution solve_exact(const ModelSpec& spec, const ExactOptions& opts = {});
Solution solve_exact(const ModelSpec& spec, const SolveLimits& limits);

struct IlsParams {
  int32_t stall_rounds = 30;  // consecutive non-improving perturbations before stopping
  int32_t max_rounds = 10000;
  int32_t perturb_arcs = 0;  // 0: max(2, ceil(0.02 |A|))
};

// Iterated local search from phi0: repair into the imbalance cap, then
// alternate best-improvement single-arc moves with random perturbations.
Solution solve_ils(const ModelSpec& spec, uint64_t seed, const IlsParams& params = {});

json solution_to_json(const ModelSpec& spec, const Solution& sol);

}  // namespace resub
