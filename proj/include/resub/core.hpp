#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "resub/common.hpp"

namespace resub {

using json = nlohmann::json;

// Raw, unvalidated instance description as it appears on disk.
struct ArcData {
  std::string id;
  std::string from;
  std::string to;
  double volume = 1.0;
  double tod = 0.0;    // departure time of day, hours [0, 24)
  double tow = 0.0;    // departure time of week, hours [0, 168)
  double miles = 0.0;
  std::string size_class = "M";
  std::vector<std::string> candidates;  // compatible resources R_a
  std::string initial;                  // phi0(a), must be in candidates
};

struct InstanceData {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::vector<std::string>>> schedulers;
  std::vector<std::string> resources;
  std::vector<ArcData> arcs;
  json meta = json::object();
};

// Indexed arc.  All cross references are indices into the instance's sorted
// node / resource tables; candidate lists are sorted ascending.
struct Arc {
  std::string id;
  int32_t from = -1;
  int32_t to = -1;
  double volume = 1.0;
  double tod = 0.0;
  double tow = 0.0;
  double miles = 0.0;
  std::string size_class = "M";
  std::vector<int32_t> candidates;
  int32_t initial = -1;
};

// Validated task network.  Immutable after construction; ids are unique and
// every lookup table is sorted so iteration order is reproducible.
class Instance {
 public:
  static Instance from_data(InstanceData data);
  static Instance from_json(const json& j);
  static Instance load_file(const std::string& path);

  json to_json() const;
  void save_file(const std::string& path) const;

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<std::string>& resources() const { return resources_; }
  const std::vector<std::string>& schedulers() const { return schedulers_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const json& meta() const { return meta_; }

  int32_t num_nodes() const { return static_cast<int32_t>(nodes_.size()); }
  int32_t num_resources() const { return static_cast<int32_t>(resources_.size()); }
  int32_t num_schedulers() const { return static_cast<int32_t>(schedulers_.size()); }
  int32_t num_arcs() const { return static_cast<int32_t>(arcs_.size()); }

  // Index lookups return -1 when the id is unknown.
  int32_t node_index(const std::string& id) const;
  int32_t resource_index(const std::string& id) const;
  int32_t scheduler_index(const std::string& id) const;
  int32_t arc_index(const std::string& id) const;

  int32_t scheduler_of_node(int32_t node) const { return node_scheduler_[node]; }
  const std::vector<int32_t>& scheduler_nodes(int32_t s) const { return scheduler_nodes_[s]; }

  // A short content digest (instance identity for grouping and fingerprints).
  uint64_t content_hash() const;

 private:
  std::vector<std::string> nodes_;
  std::vector<std::string> resources_;
  std::vector<std::string> schedulers_;
  std::vector<std::vector<int32_t>> scheduler_nodes_;
  std::vector<int32_t> node_scheduler_;
  std::vector<Arc> arcs_;
  json meta_;
  std::map<std::string, int32_t> node_idx_, resource_idx_, scheduler_idx_, arc_idx_;
};

// Total assignment phi: one resource index per arc index.
struct Assignment {
  std::vector<int32_t> res;

  static Assignment initial_of(const Instance& inst);
  static Assignment from_map(const Instance& inst, const std::map<std::string, std::string>& m);

  int32_t operator[](size_t arc) const { return res[arc]; }
  std::map<std::string, std::string> to_map(const Instance& inst) const;
  bool operator==(const Assignment& o) const { return res == o.res; }
};

// Per node/resource in-out accounting for one assignment.
struct ImbalanceReport {
  int32_t num_nodes = 0;
  int32_t num_resources = 0;
  std::vector<int32_t> in_counts;    // row-major [node][resource]
  std::vector<int32_t> out_counts;
  int64_t total = 0;                 // I(phi)

  int32_t in_at(int32_t n, int32_t r) const { return in_counts[n * num_resources + r]; }
  int32_t out_at(int32_t n, int32_t r) const { return out_counts[n * num_resources + r]; }
  int32_t imbalance_at(int32_t n, int32_t r) const {
    return std::abs(in_at(n, r) - out_at(n, r));
  }
};

// Change burden per scheduler relative to phi0.
struct BurdenVector {
  std::vector<int64_t> per_scheduler;  // B_s, indexed like Instance::schedulers()
  int64_t total_changes = 0;           // Delta
  int64_t max_burden = 0;              // Z
};

ImbalanceReport total_imbalance(const Instance& inst, const Assignment& phi);

// Arcs owned by a scheduler: origin inside its node set.  Sorted arc indices.
std::vector<int32_t> scheduler_arc_indices(const Instance& inst, int32_t scheduler);
std::vector<std::string> scheduler_arcs(const Instance& inst, const std::string& scheduler_id);

BurdenVector burdens(const Instance& inst, const Assignment& phi);

// Assignment-independent floor on I(phi): sum of |indegree - outdegree|.
int64_t structural_lower_bound(const Instance& inst);

}  // namespace resub
