#pragma once

#include <string>
#include <vector>

#include "resub/core.hpp"

namespace resub {

// Per-arc admissible resources for one optimization run.  Always a subset of
// the arc's compatibility candidates and always containing phi0(a), so the
// initial plan stays feasible after filtering.
using CandidateSets = std::vector<std::vector<int32_t>>;

CandidateSets full_candidates(const Instance& inst);
uint64_t candidate_fingerprint(const Instance& inst, const CandidateSets& cands);
json candidates_to_json(const Instance& inst, const CandidateSets& cands);
CandidateSets candidates_from_json(const Instance& inst, const json& j);

enum class ModelKind {
  Stage1,           // minimize total imbalance I
  Stage2Efficient,  // minimize change count Delta subject to I <= I*
  Stage2Minimax,    // minimize max scheduler burden Z subject to I <= I*
  Stage2Weighted,   // minimize (1-alpha) Delta + alpha Z subject to I <= I*
  Stage2Gini,       // minimize (1-omega) Delta + omega * pairwise burden gap
};

const char* kind_name(ModelKind k);
ModelKind kind_from_name(const std::string& name);

// Exact objective breakdown.  value_num / value_den is the scalar the solver
// compares; integral kinds have value_den == 1.
struct ObjectiveValue {
  ModelKind kind = ModelKind::Stage1;
  int64_t imbalance = 0;      // I(phi)
  int64_t changes = 0;        // Delta
  int64_t max_burden = 0;     // Z
  int64_t gini_pairwise = 0;  // sum over scheduler pairs of |B_s1 - B_s2|
  int64_t value_num = 0;
  int64_t value_den = 1;

  double value() const { return static_cast<double>(value_num) / static_cast<double>(value_den); }
};

struct ModelSpec {
  const Instance* instance = nullptr;
  CandidateSets candidates;
  ModelKind kind = ModelKind::Stage1;
  int64_t imbalance_cap = -1;  // I*, stage-2 kinds only
  Rational alpha;              // Stage2Weighted
  Rational omega;              // Stage2Gini

  // Denominator of the objective scalar for this kind.
  int64_t value_den() const;
};

ModelSpec build_stage1(const Instance& inst, CandidateSets cands);
ModelSpec build_stage2_efficient(const Instance& inst, CandidateSets cands, int64_t istar);
ModelSpec build_stage2_minimax(const Instance& inst, CandidateSets cands, int64_t istar);
ModelSpec build_stage2_weighted(const Instance& inst, CandidateSets cands, int64_t istar,
                                Rational alpha);
ModelSpec build_stage2_gini(const Instance& inst, CandidateSets cands, int64_t istar,
                            Rational omega);

struct EvalResult {
  bool feasible = false;  // candidate membership is a precondition; this is the I <= I* check
  ObjectiveValue objective;
};

EvalResult evaluate(const ModelSpec& spec, const Assignment& phi);

// CPLEX-LP text for the model's integer program.  Weighted objectives are
// scaled to integers; a leading comment records the divisor.
std::string export_lp(const ModelSpec& spec);

json spec_summary(const ModelSpec& spec);

}  // namespace resub
