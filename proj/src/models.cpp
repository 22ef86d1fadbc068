#include "resub/models.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace resub {

namespace {

void validate_candidates(const Instance& inst, const CandidateSets& cands, const char* where) {
  if (cands.size() != static_cast<size_t>(inst.num_arcs()))
    throw Error(std::string(where) + ": candidate sets must cover every arc");
  for (int32_t a = 0; a < inst.num_arcs(); ++a) {
    const Arc& arc = inst.arcs()[a];
    const auto& cs = cands[a];
    if (cs.empty())
      throw Error(std::string(where) + ": empty candidate set for arc '" + arc.id + "'");
    if (!std::is_sorted(cs.begin(), cs.end()) || std::adjacent_find(cs.begin(), cs.end()) != cs.end())
      throw Error(std::string(where) + ": candidate set for arc '" + arc.id +
                  "' must be sorted and duplicate-free");
    for (int32_t r : cs)
      if (!std::binary_search(arc.candidates.begin(), arc.candidates.end(), r))
        throw Error(std::string(where) + ": arc '" + arc.id +
                    "' candidate outside its compatibility set");
    if (!std::binary_search(cs.begin(), cs.end(), arc.initial))
      throw Error(std::string(where) + ": candidate set for arc '" + arc.id +
                  "' must contain the initial resource");
  }
}

ModelSpec make(const Instance& inst, CandidateSets cands, ModelKind kind, const char* where) {
  validate_candidates(inst, cands, where);
  ModelSpec spec;
  spec.instance = &inst;
  spec.candidates = std::move(cands);
  spec.kind = kind;
  return spec;
}

std::string lp_name(const std::string& id) {
  std::string out;
  for (char c : id) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

}  // namespace

CandidateSets full_candidates(const Instance& inst) {
  CandidateSets cs;
  cs.reserve(inst.num_arcs());
  for (const Arc& a : inst.arcs()) cs.push_back(a.candidates);
  return cs;
}

json candidates_to_json(const Instance& inst, const CandidateSets& cands) {
  validate_candidates(inst, cands, "candidates_to_json");
  json j = json::object();
  for (int32_t a = 0; a < inst.num_arcs(); ++a) {
    std::vector<std::string> ids;
    for (int32_t r : cands[a]) ids.push_back(inst.resources()[r]);
    j[inst.arcs()[a].id] = ids;
  }
  return j;
}

CandidateSets candidates_from_json(const Instance& inst, const json& j) {
  if (!j.is_object()) throw Error("candidates json: expected an object keyed by arc id");
  CandidateSets cs(inst.num_arcs());
  std::vector<char> seen(inst.num_arcs(), 0);
  for (auto it = j.begin(); it != j.end(); ++it) {
    int32_t a = inst.arc_index(it.key());
    if (a < 0) throw Error("candidates json: unknown arc '" + it.key() + "'");
    seen[a] = 1;
    for (const json& rid : it.value()) {
      int32_t r = inst.resource_index(rid.get<std::string>());
      if (r < 0)
        throw Error("candidates json: unknown resource '" + rid.get<std::string>() +
                    "' for arc '" + it.key() + "'");
      cs[a].push_back(r);
    }
    std::sort(cs[a].begin(), cs[a].end());
  }
  for (int32_t a = 0; a < inst.num_arcs(); ++a)
    if (!seen[a]) throw Error("candidates json: missing arc '" + inst.arcs()[a].id + "'");
  validate_candidates(inst, cs, "candidates json");
  return cs;
}

uint64_t candidate_fingerprint(const Instance& inst, const CandidateSets& cands) {
  return fnv1a64(candidates_to_json(inst, cands).dump());
}

const char* kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Stage1: return "stage1";
    case ModelKind::Stage2Efficient: return "stage2-efficient";
    case ModelKind::Stage2Minimax: return "stage2-minimax";
    case ModelKind::Stage2Weighted: return "stage2-weighted";
    case ModelKind::Stage2Gini: return "stage2-gini";
  }
  return "?";
}

ModelKind kind_from_name(const std::string& name) {
  if (name == "stage1") return ModelKind::Stage1;
  if (name == "stage2-efficient") return ModelKind::Stage2Efficient;
  if (name == "stage2-minimax") return ModelKind::Stage2Minimax;
  if (name == "stage2-weighted") return ModelKind::Stage2Weighted;
  if (name == "stage2-gini") return ModelKind::Stage2Gini;
  throw Error("unknown model kind '" + name + "'");
}

int64_t ModelSpec::value_den() const {
  if (kind == ModelKind::Stage2Weighted) return alpha.den;
  if (kind == ModelKind::Stage2Gini) return omega.den;
  return 1;
}

ModelSpec build_stage1(const Instance& inst, CandidateSets cands) {
  return make(inst, std::move(cands), ModelKind::Stage1, "build_stage1");
}

ModelSpec build_stage2_efficient(const Instance& inst, CandidateSets cands, int64_t istar) {
  ModelSpec s = make(inst, std::move(cands), ModelKind::Stage2Efficient, "build_stage2_efficient");
  s.imbalance_cap = istar;
  return s;
}

ModelSpec build_stage2_minimax(const Instance& inst, CandidateSets cands, int64_t istar) {
  ModelSpec s = make(inst, std::move(cands), ModelKind::Stage2Minimax, "build_stage2_minimax");
  s.imbalance_cap = istar;
  return s;
}

ModelSpec build_stage2_weighted(const Instance& inst, CandidateSets cands, int64_t istar,
                                Rational alpha) {
  ModelSpec s = make(inst, std::move(cands), ModelKind::Stage2Weighted, "build_stage2_weighted");
  s.imbalance_cap = istar;
  if (alpha.num > alpha.den) throw Error("build_stage2_weighted: alpha must lie in [0, 1]");
  s.alpha = alpha;
  return s;
}

ModelSpec build_stage2_gini(const Instance& inst, CandidateSets cands, int64_t istar,
                            Rational omega) {
  ModelSpec s = make(inst, std::move(cands), ModelKind::Stage2Gini, "build_stage2_gini");
  s.imbalance_cap = istar;
  if (omega.num > omega.den) throw Error("build_stage2_gini: omega must lie in [0, 1]");
  s.omega = omega;
  return s;
}

EvalResult evaluate(const ModelSpec& spec, const Assignment& phi) {
  const Instance& inst = *spec.instance;
  if (phi.res.size() != static_cast<size_t>(inst.num_arcs()))
    throw Error("evaluate: assignment does not cover every arc");
  for (int32_t a = 0; a < inst.num_arcs(); ++a)
    if (!std::binary_search(spec.candidates[a].begin(), spec.candidates[a].end(), phi.res[a]))
      throw Error("evaluate: arc '" + inst.arcs()[a].id +
                  "' assigned a resource outside the model's candidate set");

  ObjectiveValue v;
  v.kind = spec.kind;
  v.imbalance = total_imbalance(inst, phi).total;
  BurdenVector b = burdens(inst, phi);
  v.changes = b.total_changes;
  v.max_burden = b.max_burden;
  for (size_t i = 0; i < b.per_scheduler.size(); ++i)
    for (size_t j = i + 1; j < b.per_scheduler.size(); ++j)
      v.gini_pairwise += std::abs(b.per_scheduler[i] - b.per_scheduler[j]);

  v.value_den = spec.value_den();
  switch (spec.kind) {
    case ModelKind::Stage1: v.value_num = v.imbalance; break;
    case ModelKind::Stage2Efficient: v.value_num = v.changes; break;
    case ModelKind::Stage2Minimax: v.value_num = v.max_burden; break;
    case ModelKind::Stage2Weighted:
      v.value_num = (spec.alpha.den - spec.alpha.num) * v.changes + spec.alpha.num * v.max_burden;
      break;
    case ModelKind::Stage2Gini:
      v.value_num = (spec.omega.den - spec.omega.num) * v.changes + spec.omega.num * v.gini_pairwise;
      break;
  }

  EvalResult res;
  res.objective = v;
  res.feasible = spec.kind == ModelKind::Stage1 || v.imbalance <= spec.imbalance_cap;
  return res;
}

std::string export_lp(const ModelSpec& spec) {
  const Instance& inst = *spec.instance;
  std::ostringstream out;

  std::set<int32_t> union_res;
  for (const auto& cs : spec.candidates) union_res.insert(cs.begin(), cs.end());

  auto xvar = [&](int32_t a, int32_t r) {
    return "x_" + lp_name(inst.arcs()[a].id) + "_" + lp_name(inst.resources()[r]);
  };
  auto ivar = [&](int32_t n, int32_t r) {
    return "I_" + lp_name(inst.nodes()[n]) + "_" + lp_name(inst.resources()[r]);
  };

  // Change-count expression per scheduler: |A_s|*one - sum of kept-initial vars.
  std::vector<std::vector<int32_t>> sched_arcs(inst.num_schedulers());
  for (int32_t a = 0; a < inst.num_arcs(); ++a)
    sched_arcs[inst.scheduler_of_node(inst.arcs()[a].from)].push_back(a);

  out << "\\ " << kind_name(spec.kind) << " model, " << inst.num_arcs() << " arcs, "
      << inst.num_resources() << " resources\n";
  int64_t den = spec.value_den();
  if (den != 1)
    out << "\\ objective scaled by " << den << "; divide the optimal value by " << den << "\n";
  if (spec.kind != ModelKind::Stage1)
    out << "\\ imbalance cap I* = " << spec.imbalance_cap << "\n";

  out << "Minimize\n obj:";
  bool lead = true;
  auto term = [&](int64_t coef, const std::string& var) {
    if (coef == 0) return;
    if (lead) {
      out << " " << (coef < 0 ? "- " : "") << (std::abs(coef) == 1 ? "" : std::to_string(std::abs(coef)) + " ") << var;
      lead = false;
    } else {
      out << (coef < 0 ? " - " : " + ") << (std::abs(coef) == 1 ? "" : std::to_string(std::abs(coef)) + " ") << var;
    }
  };

  switch (spec.kind) {
    case ModelKind::Stage1:
      for (int32_t n = 0; n < inst.num_nodes(); ++n)
        for (int32_t r : union_res) term(1, ivar(n, r));
      break;
    case ModelKind::Stage2Efficient:
      term(inst.num_arcs(), "one");
      for (int32_t a = 0; a < inst.num_arcs(); ++a) term(-1, xvar(a, inst.arcs()[a].initial));
      break;
    case ModelKind::Stage2Minimax:
      term(1, "Z");
      break;
    case ModelKind::Stage2Weighted: {
      int64_t wd = spec.alpha.den - spec.alpha.num;
      term(wd * inst.num_arcs(), "one");
      for (int32_t a = 0; a < inst.num_arcs(); ++a) term(-wd, xvar(a, inst.arcs()[a].initial));
      term(spec.alpha.num, "Z");
      break;
    }
    case ModelKind::Stage2Gini: {
      int64_t wd = spec.omega.den - spec.omega.num;
      term(wd * inst.num_arcs(), "one");
      for (int32_t a = 0; a < inst.num_arcs(); ++a) term(-wd, xvar(a, inst.arcs()[a].initial));
      for (int32_t s1 = 0; s1 < inst.num_schedulers(); ++s1)
        for (int32_t s2 = s1 + 1; s2 < inst.num_schedulers(); ++s2)
          term(spec.omega.num,
               "D_" + lp_name(inst.schedulers()[s1]) + "_" + lp_name(inst.schedulers()[s2]));
      break;
    }
  }
  if (lead) out << " 0 one";
  out << "\n";

  out << "Subject To\n";
  // One resource per arc.
  for (int32_t a = 0; a < inst.num_arcs(); ++a) {
    out << " assign_" << lp_name(inst.arcs()[a].id) << ":";
    lead = true;
    for (int32_t r : spec.candidates[a]) term(1, xvar(a, r));
    out << " = 1\n";
  }
  // Two-sided imbalance bounds per node and resource.
  for (int32_t n = 0; n < inst.num_nodes(); ++n) {
    for (int32_t r : union_res) {
      for (int sign = 0; sign < 2; ++sign) {
        out << (sign == 0 ? " bal_p_" : " bal_m_") << lp_name(inst.nodes()[n]) << "_"
            << lp_name(inst.resources()[r]) << ":";
        lead = true;
        for (int32_t a = 0; a < inst.num_arcs(); ++a) {
          if (!std::binary_search(spec.candidates[a].begin(), spec.candidates[a].end(), r)) continue;
          int in = inst.arcs()[a].to == n ? 1 : 0;
          int outc = inst.arcs()[a].from == n ? 1 : 0;
          int c = sign == 0 ? in - outc : outc - in;
          term(c, xvar(a, r));
        }
        term(-1, ivar(n, r));
        out << " <= 0\n";
      }
    }
  }
  if (spec.kind != ModelKind::Stage1) {
    out << " imbalance_cap:";
    lead = true;
    for (int32_t n = 0; n < inst.num_nodes(); ++n)
      for (int32_t r : union_res) term(1, ivar(n, r));
    out << " <= " << spec.imbalance_cap << "\n";
  }
  if (spec.kind == ModelKind::Stage2Minimax || spec.kind == ModelKind::Stage2Weighted) {
    for (int32_t s = 0; s < inst.num_schedulers(); ++s) {
      out << " burden_" << lp_name(inst.schedulers()[s]) << ":";
      lead = true;
      term(static_cast<int64_t>(sched_arcs[s].size()), "one");
      for (int32_t a : sched_arcs[s]) term(-1, xvar(a, inst.arcs()[a].initial));
      term(-1, "Z");
      out << " <= 0\n";
    }
  }
  if (spec.kind == ModelKind::Stage2Gini) {
    for (int32_t s1 = 0; s1 < inst.num_schedulers(); ++s1) {
      for (int32_t s2 = s1 + 1; s2 < inst.num_schedulers(); ++s2) {
        std::string dv =
            "D_" + lp_name(inst.schedulers()[s1]) + "_" + lp_name(inst.schedulers()[s2]);
        for (int sign = 0; sign < 2; ++sign) {
          int32_t hi = sign == 0 ? s1 : s2, lo = sign == 0 ? s2 : s1;
          out << (sign == 0 ? " gap_p_" : " gap_m_") << lp_name(inst.schedulers()[s1]) << "_"
              << lp_name(inst.schedulers()[s2]) << ":";
          lead = true;
          term(static_cast<int64_t>(sched_arcs[hi].size()) -
                   static_cast<int64_t>(sched_arcs[lo].size()),
               "one");
          for (int32_t a : sched_arcs[hi]) term(-1, xvar(a, inst.arcs()[a].initial));
          for (int32_t a : sched_arcs[lo]) term(1, xvar(a, inst.arcs()[a].initial));
          term(-1, dv);
          out << " <= 0\n";
        }
      }
    }
  }

  out << "Bounds\n one = 1\n";
  out << "Binaries\n";
  for (int32_t a = 0; a < inst.num_arcs(); ++a)
    for (int32_t r : spec.candidates[a]) out << " " << xvar(a, r) << "\n";
  out << "End\n";
  return out.str();
}

json spec_summary(const ModelSpec& spec) {
  const Instance& inst = *spec.instance;
  json j;
  j["kind"] = kind_name(spec.kind);
  j["arcs"] = inst.num_arcs();
  j["schedulers"] = inst.num_schedulers();
  size_t binaries = 0;
  for (const auto& cs : spec.candidates) binaries += cs.size();
  j["binaries"] = binaries;
  j["candidate_fingerprint"] = to_hex(candidate_fingerprint(inst, spec.candidates));
  if (spec.kind != ModelKind::Stage1) j["imbalance_cap"] = spec.imbalance_cap;
  if (spec.kind == ModelKind::Stage2Weighted)
    j["alpha"] = {{"num", spec.alpha.num}, {"den", spec.alpha.den}};
  if (spec.kind == ModelKind::Stage2Gini)
    j["omega"] = {{"num", spec.omega.num}, {"den", spec.omega.den}};
  return j;
}

}  // namespace resub
