#pragma once

#include "resub/solver.hpp"

namespace resub {

enum class Backend { Exact, Ils, Brute };

Backend backend_from_name(const std::string& name);
const char* backend_name(Backend b);

struct SolutionAnalytics {
  BurdenVector burdens;
  std::vector<double> shares;  // B_s / Delta, zeros when Delta == 0
  double gini = 0.0;
  int64_t internal_changes = 0;
  int64_t collaborative_changes = 0;
};

struct PortfolioEntry {
  std::string label;
  json params = json::object();
  Solution solution;
  std::optional<SolutionAnalytics> analytics;
  bool on_front = false;
};

struct Portfolio {
  std::vector<PortfolioEntry> entries;

  const PortfolioEntry* find(const std::string& label) const;
};

SolutionAnalytics analyze_solution(const Instance& inst, const Assignment& phi);

// One weighted model per alpha, solved with the chosen backend, then Pareto
// marking over (Delta, Z).  Non-optimal members are kept but never enter
// dominance comparisons.
Portfolio sweep_alpha(const Instance& inst, const CandidateSets& cands, int64_t istar,
                      const std::vector<Rational>& alphas, Backend backend,
                      const SolveLimits& limits, uint64_t seed);

Portfolio sweep_omega(const Instance& inst, const CandidateSets& cands, int64_t istar,
                      const std::vector<Rational>& omegas, Backend backend,
                      const SolveLimits& limits, uint64_t seed);

// Changed arcs split by whether both endpoints sit under one scheduler.
std::pair<int64_t, int64_t> classify_substitutions(const Instance& inst, const Assignment& phi);

double gini_coefficient(const BurdenVector& b);

// Greedy priority ranking of a plan's changes; each level reports the total
// imbalance after applying the first ceil(fraction * Delta) changes to phi0.
std::vector<std::pair<double, int64_t>> partial_implementation_curve(
    const Instance& inst, const Assignment& phi_star, const std::vector<double>& levels);

std::vector<std::pair<std::string, std::vector<double>>> burden_distribution(const Portfolio& pf);

void mark_pareto_front(Portfolio& pf);

json portfolio_to_json(const Instance& inst, const Portfolio& pf);

}  // namespace resub
