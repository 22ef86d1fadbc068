#include "resub/core.hpp"

#include <algorithm>
#include <fstream>

namespace resub {

namespace {

void check_unique(const std::vector<std::string>& ids, const char* what) {
  for (size_t i = 0; i + 1 < ids.size(); ++i)
    if (ids[i] == ids[i + 1])
      throw Error(std::string("instance: duplicate ") + what + " id '" + ids[i] + "'");
}

const json& field(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw Error("instance json: missing '" + std::string(key) + "' in " + ctx);
  return *it;
}

}  // namespace

Instance Instance::from_data(InstanceData data) {
  Instance inst;
  inst.nodes_ = std::move(data.nodes);
  inst.resources_ = std::move(data.resources);
  inst.meta_ = std::move(data.meta);
  std::sort(inst.nodes_.begin(), inst.nodes_.end());
  std::sort(inst.resources_.begin(), inst.resources_.end());
  if (inst.nodes_.empty()) throw Error("instance: node set is empty");
  if (inst.resources_.empty()) throw Error("instance: resource set is empty");
  check_unique(inst.nodes_, "node");
  check_unique(inst.resources_, "resource");
  for (int32_t i = 0; i < inst.num_nodes(); ++i) inst.node_idx_[inst.nodes_[i]] = i;
  for (int32_t i = 0; i < inst.num_resources(); ++i) inst.resource_idx_[inst.resources_[i]] = i;

  std::sort(data.schedulers.begin(), data.schedulers.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  inst.node_scheduler_.assign(inst.nodes_.size(), -1);
  for (auto& [sid, members] : data.schedulers) {
    if (inst.scheduler_idx_.count(sid))
      throw Error("instance: duplicate scheduler id '" + sid + "'");
    int32_t s = static_cast<int32_t>(inst.schedulers_.size());
    inst.scheduler_idx_[sid] = s;
    inst.schedulers_.push_back(sid);
    std::vector<int32_t> idxs;
    for (const std::string& nid : members) {
      int32_t n = inst.node_index(nid);
      if (n < 0) throw Error("instance: scheduler '" + sid + "' lists unknown node '" + nid + "'");
      if (inst.node_scheduler_[n] != -1)
        throw Error("instance: node '" + nid + "' assigned to more than one scheduler");
      inst.node_scheduler_[n] = s;
      idxs.push_back(n);
    }
    std::sort(idxs.begin(), idxs.end());
    inst.scheduler_nodes_.push_back(std::move(idxs));
  }
  for (int32_t n = 0; n < inst.num_nodes(); ++n)
    if (inst.node_scheduler_[n] == -1)
      throw Error("instance: node '" + inst.nodes_[n] + "' not covered by any scheduler");

  std::sort(data.arcs.begin(), data.arcs.end(),
            [](const ArcData& a, const ArcData& b) { return a.id < b.id; });
  for (ArcData& ad : data.arcs) {
    Arc arc;
    arc.id = ad.id;
    if (inst.arc_idx_.count(arc.id)) throw Error("instance: duplicate arc id '" + arc.id + "'");
    arc.from = inst.node_index(ad.from);
    arc.to = inst.node_index(ad.to);
    if (arc.from < 0) throw Error("instance: arc '" + arc.id + "' has unknown origin '" + ad.from + "'");
    if (arc.to < 0) throw Error("instance: arc '" + arc.id + "' has unknown destination '" + ad.to + "'");
    arc.volume = ad.volume;
    arc.tod = ad.tod;
    arc.tow = ad.tow;
    arc.miles = ad.miles;
    arc.size_class = ad.size_class;
    if (ad.candidates.empty())
      throw Error("instance: arc '" + arc.id + "' has an empty candidate set");
    for (const std::string& rid : ad.candidates) {
      int32_t r = inst.resource_index(rid);
      if (r < 0) throw Error("instance: arc '" + arc.id + "' lists unknown resource '" + rid + "'");
      arc.candidates.push_back(r);
    }
    std::sort(arc.candidates.begin(), arc.candidates.end());
    arc.candidates.erase(std::unique(arc.candidates.begin(), arc.candidates.end()),
                         arc.candidates.end());
    arc.initial = inst.resource_index(ad.initial);
    if (arc.initial < 0)
      throw Error("instance: arc '" + arc.id + "' has unknown initial resource '" + ad.initial + "'");
    if (!std::binary_search(arc.candidates.begin(), arc.candidates.end(), arc.initial))
      throw Error("instance: arc '" + arc.id + "' initial assignment incompatible ('" + ad.initial +
                  "' not in candidates)");
    inst.arc_idx_[arc.id] = static_cast<int32_t>(inst.arcs_.size());
    inst.arcs_.push_back(std::move(arc));
  }
  return inst;
}

Instance Instance::from_json(const json& j) {
  if (!j.is_object()) throw Error("instance json: top level must be an object");
  InstanceData d;
  d.nodes = field(j, "nodes", "top level").get<std::vector<std::string>>();
  d.resources = field(j, "resources", "top level").get<std::vector<std::string>>();
  const json& sch = field(j, "schedulers", "top level");
  if (!sch.is_object()) throw Error("instance json: 'schedulers' must map ids to node lists");
  for (auto it = sch.begin(); it != sch.end(); ++it)
    d.schedulers.emplace_back(it.key(), it.value().get<std::vector<std::string>>());
  for (const json& aj : field(j, "arcs", "top level")) {
    ArcData a;
    std::string ctx = "arc " + std::string(aj.value("id", "?"));
    a.id = field(aj, "id", "arcs[]").get<std::string>();
    a.from = field(aj, "from", ctx).get<std::string>();
    a.to = field(aj, "to", ctx).get<std::string>();
    a.volume = aj.value("volume", 1.0);
    a.tod = aj.value("tod", 0.0);
    a.tow = aj.value("tow", 0.0);
    a.miles = aj.value("miles", 0.0);
    a.size_class = aj.value("size_class", "M");
    a.candidates = field(aj, "candidates", ctx).get<std::vector<std::string>>();
    a.initial = field(aj, "initial", ctx).get<std::string>();
    d.arcs.push_back(std::move(a));
  }
  if (j.contains("meta")) d.meta = j.at("meta");
  return from_data(std::move(d));
}

Instance Instance::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open instance file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("instance json parse failed for " + path + ": " + e.what());
  }
  return from_json(j);
}

json Instance::to_json() const {
  json j;
  j["nodes"] = nodes_;
  j["resources"] = resources_;
  json sch = json::object();
  for (int32_t s = 0; s < num_schedulers(); ++s) {
    std::vector<std::string> members;
    for (int32_t n : scheduler_nodes_[s]) members.push_back(nodes_[n]);
    sch[schedulers_[s]] = members;
  }
  j["schedulers"] = sch;
  json arr = json::array();
  for (const Arc& a : arcs_) {
    json aj;
    aj["id"] = a.id;
    aj["from"] = nodes_[a.from];
    aj["to"] = nodes_[a.to];
    aj["volume"] = a.volume;
    aj["tod"] = a.tod;
    aj["tow"] = a.tow;
    aj["miles"] = a.miles;
    aj["size_class"] = a.size_class;
    std::vector<std::string> cand;
    for (int32_t r : a.candidates) cand.push_back(resources_[r]);
    aj["candidates"] = cand;
    aj["initial"] = resources_[a.initial];
    arr.push_back(std::move(aj));
  }
  j["arcs"] = arr;
  j["meta"] = meta_;
  return j;
}

void Instance::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write instance file: " + path);
  out << to_json().dump(2) << "\n";
}

int32_t Instance::node_index(const std::string& id) const {
  auto it = node_idx_.find(id);
  return it == node_idx_.end() ? -1 : it->second;
}
int32_t Instance::resource_index(const std::string& id) const {
  auto it = resource_idx_.find(id);
  return it == resource_idx_.end() ? -1 : it->second;
}
int32_t Instance::scheduler_index(const std::string& id) const {
  auto it = scheduler_idx_.find(id);
  return it == scheduler_idx_.end() ? -1 : it->second;
}
int32_t Instance::arc_index(const std::string& id) const {
  auto it = arc_idx_.find(id);
  return it == arc_idx_.end() ? -1 : it->second;
}

uint64_t Instance::content_hash() const {
  json j = to_json();
  j.erase("meta");  // annotations are not part of the network's identity
  return fnv1a64(j.dump());
}

Assignment Assignment::initial_of(const Instance& inst) {
  Assignment phi;
  phi.res.reserve(inst.arcs().size());
  for (const Arc& a : inst.arcs()) phi.res.push_back(a.initial);
  return phi;
}

Assignment Assignment::from_map(const Instance& inst,
                                const std::map<std::string, std::string>& m) {
  Assignment phi;
  phi.res.assign(inst.arcs().size(), -1);
  for (const auto& [aid, rid] : m) {
    int32_t a = inst.arc_index(aid);
    if (a < 0) throw Error("assignment: unknown arc '" + aid + "'");
    int32_t r = inst.resource_index(rid);
    if (r < 0) throw Error("assignment: unknown resource '" + rid + "' for arc '" + aid + "'");
    const auto& cand = inst.arcs()[a].candidates;
    if (!std::binary_search(cand.begin(), cand.end(), r))
      throw Error("assignment: arc '" + aid + "' mapped to incompatible resource '" + rid + "'");
    phi.res[a] = r;
  }
  for (size_t a = 0; a < phi.res.size(); ++a)
    if (phi.res[a] < 0)
      throw Error("assignment: missing arc '" + inst.arcs()[a].id + "' (assignment must be total)");
  return phi;
}

std::map<std::string, std::string> Assignment::to_map(const Instance& inst) const {
  std::map<std::string, std::string> m;
  for (size_t a = 0; a < res.size(); ++a)
    m[inst.arcs()[a].id] = inst.resources()[res[a]];
  return m;
}

ImbalanceReport total_imbalance(const Instance& inst, const Assignment& phi) {
  if (phi.res.size() != inst.arcs().size())
    throw Error("total_imbalance: assignment does not cover every arc");
  ImbalanceReport rep;
  rep.num_nodes = inst.num_nodes();
  rep.num_resources = inst.num_resources();
  rep.in_counts.assign(static_cast<size_t>(rep.num_nodes) * rep.num_resources, 0);
  rep.out_counts.assign(static_cast<size_t>(rep.num_nodes) * rep.num_resources, 0);
  for (size_t a = 0; a < phi.res.size(); ++a) {
    int32_t r = phi.res[a];
    if (r < 0 || r >= rep.num_resources)
      throw Error("total_imbalance: arc '" + inst.arcs()[a].id + "' has no assigned resource");
    rep.out_counts[inst.arcs()[a].from * rep.num_resources + r]++;
    rep.in_counts[inst.arcs()[a].to * rep.num_resources + r]++;
  }
  for (size_t i = 0; i < rep.in_counts.size(); ++i)
    rep.total += std::abs(rep.in_counts[i] - rep.out_counts[i]);
  return rep;
}

std::vector<int32_t> scheduler_arc_indices(const Instance& inst, int32_t scheduler) {
  if (scheduler < 0 || scheduler >= inst.num_schedulers())
    throw Error("scheduler_arc_indices: scheduler index out of range");
  std::vector<int32_t> out;
  for (int32_t a = 0; a < inst.num_arcs(); ++a)
    if (inst.scheduler_of_node(inst.arcs()[a].from) == scheduler) out.push_back(a);
  return out;
}

std::vector<std::string> scheduler_arcs(const Instance& inst, const std::string& scheduler_id) {
  int32_t s = inst.scheduler_index(scheduler_id);
  if (s < 0) throw Error("scheduler_arcs: unknown scheduler '" + scheduler_id + "'");
  std::vector<std::string> ids;
  for (int32_t a : scheduler_arc_indices(inst, s)) ids.push_back(inst.arcs()[a].id);
  return ids;
}

BurdenVector burdens(const Instance& inst, const Assignment& phi) {
  if (phi.res.size() != inst.arcs().size())
    throw Error("burdens: assignment does not cover every arc");
  BurdenVector b;
  b.per_scheduler.assign(inst.num_schedulers(), 0);
  for (int32_t a = 0; a < inst.num_arcs(); ++a) {
    if (phi.res[a] != inst.arcs()[a].initial) {
      b.total_changes++;
      b.per_scheduler[inst.scheduler_of_node(inst.arcs()[a].from)]++;
    }
  }
  for (int64_t v : b.per_scheduler) b.max_burden = std::max(b.max_burden, v);
  return b;
}

int64_t structural_lower_bound(const Instance& inst) {
  std::vector<int64_t> deg(inst.num_nodes(), 0);
  for (const Arc& a : inst.arcs()) {
    deg[a.from]--;
    deg[a.to]++;
  }
  int64_t sum = 0;
  for (int64_t d : deg) sum += std::abs(d);
  return sum;
}

}  // namespace resub
