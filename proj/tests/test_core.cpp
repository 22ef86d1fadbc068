#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "resub/core.hpp"
#include "support/fixtures.hpp"

using namespace resub;

TEST_CASE("fixture construction and lookups") {
  Instance t1 = fixtures::make_t1();
  CHECK(t1.num_nodes() == 2);
  CHECK(t1.num_arcs() == 2);
  CHECK(t1.num_resources() == 2);
  CHECK(t1.num_schedulers() == 1);
  CHECK(t1.node_index("n2") == 1);
  CHECK(t1.node_index("nope") == -1);
  CHECK(t1.arc_index("a1") == 0);
  CHECK(t1.scheduler_of_node(t1.node_index("n1")) == 0);

  Instance d1 = fixtures::make_d1();
  CHECK(d1.num_schedulers() == 2);
  CHECK(d1.scheduler_of_node(d1.node_index("n3")) == d1.scheduler_index("s2"));
}

TEST_CASE("json round trip preserves everything") {
  for (const Instance& inst : {fixtures::make_t1(), fixtures::make_d1(), fixtures::make_e1()}) {
    Instance back = Instance::from_json(inst.to_json());
    CHECK(back.to_json() == inst.to_json());
    CHECK(back.num_arcs() == inst.num_arcs());
    CHECK(back.content_hash() == inst.content_hash());
  }
}

TEST_CASE("initial imbalance of the desk fixtures") {
  Instance t1 = fixtures::make_t1();
  CHECK(total_imbalance(t1, Assignment::initial_of(t1)).total == 4);
  Instance d1 = fixtures::make_d1();
  CHECK(total_imbalance(d1, Assignment::initial_of(d1)).total == 4);
  Instance e1 = fixtures::make_e1();
  CHECK(total_imbalance(e1, Assignment::initial_of(e1)).total == 12);
}

TEST_CASE("imbalance report per-cell accounting") {
  Instance t1 = fixtures::make_t1();
  ImbalanceReport rep = total_imbalance(t1, Assignment::initial_of(t1));
  int32_t n1 = t1.node_index("n1"), r1 = t1.resource_index("r1"), r2 = t1.resource_index("r2");
  CHECK(rep.out_at(n1, r1) == 1);
  CHECK(rep.in_at(n1, r2) == 1);
  CHECK(rep.imbalance_at(n1, r1) == 1);
  CHECK(rep.imbalance_at(n1, r2) == 1);

  // uniform resource balances the two-cycle
  Assignment uni;
  uni.res = {r1, r1};
  CHECK(total_imbalance(t1, uni).total == 0);
}

TEST_CASE("imbalance matches an independent recount on random instances") {
  Rng rng(41);
  for (int it = 0; it < 60; ++it) {
    Instance inst = fixtures::random_instance(rng, 7, 14, 4, 3);
    Assignment phi = Assignment::initial_of(inst);
    for (auto& r : phi.res) {
      const auto& cands = inst.arcs()[&r - phi.res.data()].candidates;
      r = cands[rng.next_below(cands.size())];
    }
    CHECK(total_imbalance(inst, phi).total == fixtures::oracle_imbalance(inst, phi));
  }
}

TEST_CASE("imbalance is invariant under resource relabeling") {
  Rng rng(99);
  for (int it = 0; it < 20; ++it) {
    Instance inst = fixtures::random_instance(rng, 6, 12, 4, 2);
    json j = inst.to_json();
    // swap the names of the first two resources everywhere
    std::string ra = inst.resources()[0], rb = inst.resources()[1];
    auto swap_name = [&](std::string& s) {
      if (s == ra)
        s = rb;
      else if (s == rb)
        s = ra;
    };
    for (auto& a : j["arcs"]) {
      std::string ini = a["initial"].get<std::string>();
      swap_name(ini);
      a["initial"] = ini;
      for (auto& c : a["candidates"]) {
        std::string s = c.get<std::string>();
        swap_name(s);
        c = s;
      }
    }
    Instance swapped = Instance::from_json(j);
    CHECK(total_imbalance(swapped, Assignment::initial_of(swapped)).total ==
          total_imbalance(inst, Assignment::initial_of(inst)).total);
  }
}

TEST_CASE("scheduler arc ownership follows the origin node") {
  Instance d1 = fixtures::make_d1();
  CHECK(scheduler_arcs(d1, "s1") == std::vector<std::string>{"a1", "a2"});
  CHECK(scheduler_arcs(d1, "s2") == std::vector<std::string>{"a3"});
  CHECK_THROWS_AS(scheduler_arcs(d1, "s9"), Error);
}

TEST_CASE("burdens count changed arcs per owning scheduler") {
  Instance d1 = fixtures::make_d1();
  int32_t r1 = d1.resource_index("r1"), r2 = d1.resource_index("r2");

  Assignment only_a2;  // a2: r2 -> r1
  only_a2.res = {r1, r1, r1};
  BurdenVector b = burdens(d1, only_a2);
  CHECK(b.total_changes == 1);
  CHECK(b.per_scheduler == std::vector<int64_t>{1, 0});
  CHECK(b.max_burden == 1);

  Assignment a1_a3;  // a1: r1 -> r2, a3: r1 -> r2
  a1_a3.res = {r2, r2, r2};
  b = burdens(d1, a1_a3);
  CHECK(b.total_changes == 2);
  CHECK(b.per_scheduler == std::vector<int64_t>{1, 1});
  CHECK(b.max_burden == 1);

  b = burdens(d1, Assignment::initial_of(d1));
  CHECK(b.total_changes == 0);
  CHECK(b.max_burden == 0);
}

TEST_CASE("burdens partition the change count on random instances") {
  Rng rng(7);
  for (int it = 0; it < 40; ++it) {
    Instance inst = fixtures::random_instance(rng, 8, 16, 4, 4);
    Assignment phi = Assignment::initial_of(inst);
    for (size_t a = 0; a < phi.res.size(); ++a) {
      const auto& cands = inst.arcs()[a].candidates;
      phi.res[a] = cands[rng.next_below(cands.size())];
    }
    BurdenVector b = burdens(inst, phi);
    int64_t sum = 0, mx = 0;
    for (int64_t v : b.per_scheduler) {
      sum += v;
      mx = std::max(mx, v);
    }
    CHECK(sum == b.total_changes);
    CHECK(mx == b.max_burden);
  }
}

TEST_CASE("structural lower bound") {
  CHECK(structural_lower_bound(fixtures::make_t1()) == 0);
  CHECK(structural_lower_bound(fixtures::make_d1()) == 0);

  // single arc: both endpoints have degree mismatch 1
  InstanceData d;
  d.nodes = {"n1", "n2"};
  d.resources = {"r1", "r2"};
  d.schedulers = {{"s1", {"n1", "n2"}}};
  d.arcs = {fixtures::arc("a1", "n1", "n2", "r1", {"r1", "r2"})};
  Instance inst = Instance::from_data(std::move(d));
  CHECK(structural_lower_bound(inst) == 2);
  // no assignment can do better than the structural floor
  Assignment phi = Assignment::initial_of(inst);
  CHECK(total_imbalance(inst, phi).total >= 2);
}

TEST_CASE("validation rejects malformed instances") {
  auto base = [] {
    InstanceData d;
    d.nodes = {"n1", "n2"};
    d.resources = {"r1"};
    d.schedulers = {{"s1", {"n1", "n2"}}};
    d.arcs = {fixtures::arc("a1", "n1", "n2", "r1", {"r1"})};
    return d;
  };

  {
    InstanceData d = base();
    d.nodes.push_back("n1");
    CHECK_THROWS_AS(Instance::from_data(std::move(d)), Error);
  }
  {
    InstanceData d = base();
    d.schedulers = {{"s1", {"n1"}}};  // n2 uncovered
    CHECK_THROWS_WITH_AS(Instance::from_data(std::move(d)),
                         doctest::Contains("not covered"), Error);
  }
  {
    InstanceData d = base();
    d.schedulers.push_back({"s2", {"n2"}});  // n2 covered twice
    CHECK_THROWS_WITH_AS(Instance::from_data(std::move(d)),
                         doctest::Contains("more than one"), Error);
  }
  {
    InstanceData d = base();
    d.arcs[0].from = "zz";
    CHECK_THROWS_AS(Instance::from_data(std::move(d)), Error);
  }
  {
    InstanceData d = base();
    d.arcs[0].candidates.clear();
    CHECK_THROWS_AS(Instance::from_data(std::move(d)), Error);
  }
  {
    InstanceData d = base();
    d.arcs[0].initial = "r9";  // not a declared resource at all
    CHECK_THROWS_WITH_AS(Instance::from_data(std::move(d)),
                         doctest::Contains("unknown initial resource"), Error);
  }
  {
    InstanceData d = base();
    d.resources.push_back("r2");
    d.arcs[0].initial = "r2";  // declared, but outside the candidate list
    CHECK_THROWS_WITH_AS(Instance::from_data(std::move(d)),
                         doctest::Contains("incompatible"), Error);
  }
  {
    InstanceData d = base();
    d.arcs.push_back(d.arcs[0]);  // duplicate arc id
    CHECK_THROWS_AS(Instance::from_data(std::move(d)), Error);
  }
}

TEST_CASE("assignment map round trip and validation") {
  Instance d1 = fixtures::make_d1();
  Assignment phi = Assignment::initial_of(d1);
  auto m = phi.to_map(d1);
  CHECK(m.at("a2") == "r2");
  CHECK(Assignment::from_map(d1, m) == phi);

  m.erase("a3");
  CHECK_THROWS_AS(Assignment::from_map(d1, m), Error);  // not total
  m["a3"] = "r1";
  m["a1"] = "r9";
  CHECK_THROWS_AS(Assignment::from_map(d1, m), Error);  // unknown resource
}

TEST_CASE("content hash tracks the network, not the metadata") {
  Instance a = fixtures::make_d1();
  json j = a.to_json();
  j["meta"]["note"] = "x";
  Instance b = Instance::from_json(j);
  CHECK(a.content_hash() == b.content_hash());

  j["arcs"][0]["initial"] = "r2";
  Instance c = Instance::from_json(j);
  CHECK(a.content_hash() != c.content_hash());
}
