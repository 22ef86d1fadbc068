#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "resub/solver.hpp"
#include "support/fixtures.hpp"

using namespace resub;

namespace {

// All five kinds over one candidate set, with a mid-range cap for stage 2.
std::vector<ModelSpec> spec_suite(const Instance& inst, int64_t istar) {
  CandidateSets cs = full_candidates(inst);
  return {build_stage1(inst, cs),
          build_stage2_efficient(inst, cs, istar),
          build_stage2_minimax(inst, cs, istar),
          build_stage2_weighted(inst, cs, istar, Rational(1, 3)),
          build_stage2_gini(inst, cs, istar, Rational(2, 5))};
}

}  // namespace

TEST_CASE("brute force on the desk fixtures") {
  Instance t1 = fixtures::make_t1();
  Solution s = solve_brute_force(build_stage1(t1, full_candidates(t1)));
  CHECK(s.status == SolveStatus::Optimal);
  CHECK(s.objective->imbalance == 0);

  EnumerateResult en = enumerate_optima(build_stage1(t1, full_candidates(t1)), 10);
  REQUIRE(en.optima.size() == 2);  // uniform r1 and uniform r2
  CHECK_FALSE(en.truncated);
  CHECK(en.optima[0].res == std::vector<int32_t>{0, 0});
  CHECK(en.optima[1].res == std::vector<int32_t>{1, 1});

  EnumerateResult capped = enumerate_optima(build_stage1(t1, full_candidates(t1)), 1);
  CHECK(capped.optima.size() == 1);
  CHECK(capped.truncated);

  Solution eff = solve_brute_force(build_stage2_efficient(t1, full_candidates(t1), 0));
  CHECK(eff.objective->changes == 1);

  Instance d1 = fixtures::make_d1();
  Solution d_eff = solve_brute_force(build_stage2_efficient(d1, full_candidates(d1), 0));
  CHECK(d_eff.objective->changes == 1);
  Solution d_mm = solve_brute_force(build_stage2_minimax(d1, full_candidates(d1), 0));
  CHECK(d_mm.objective->max_burden == 1);
}

TEST_CASE("infeasible caps are reported, not mis-solved") {
  Instance t1 = fixtures::make_t1();
  for (auto* solve : {+[](const ModelSpec& s) { return solve_brute_force(s); },
                      +[](const ModelSpec& s) { return solve_exact(s); }}) {
    Solution s = solve(build_stage2_efficient(t1, full_candidates(t1), -1));
    CHECK(s.status == SolveStatus::Infeasible);
    CHECK_FALSE(s.assignment.has_value());
  }
}

TEST_CASE("brute force guard refuses oversized products") {
  // 24 arcs with 2 candidates each: product 2^24 > 1e7
  InstanceData d;
  d.nodes = {"n1", "n2"};
  d.resources = {"r1", "r2"};
  d.schedulers = {{"s1", {"n1", "n2"}}};
  for (int a = 0; a < 24; ++a)
    d.arcs.push_back(fixtures::arc("a" + std::to_string(a + 1), a % 2 ? "n2" : "n1",
                                   a % 2 ? "n1" : "n2", "r1", {"r1", "r2"}));
  Instance inst = Instance::from_data(std::move(d));
  CHECK_THROWS_WITH_AS(solve_brute_force(build_stage1(inst, full_candidates(inst))),
                       doctest::Contains("guard"), Error);
  CHECK_THROWS_WITH_AS(enumerate_optima(build_stage1(inst, full_candidates(inst))),
                       doctest::Contains("guard"), Error);
}

TEST_CASE("exact search matches brute force on random instances, all kinds") {
  Rng rng(2024);
  int instances = 0;
  while (instances < 120) {
    Instance inst = fixtures::random_instance(rng, 6, 9, 4, 3);
    Assignment phi0 = Assignment::initial_of(inst);
    int64_t i0 = total_imbalance(inst, phi0).total;
    Solution floor = solve_brute_force(build_stage1(inst, full_candidates(inst)));
    // cap midway between the optimum and the initial value
    int64_t istar = floor.objective->imbalance + (i0 - floor.objective->imbalance) / 2;
    ++instances;
    for (const ModelSpec& spec : spec_suite(inst, istar)) {
      Solution want = solve_brute_force(spec);
      Solution got = solve_exact(spec);
      REQUIRE(want.status == got.status);
      if (want.status != SolveStatus::Optimal) continue;
      CHECK(want.objective->value_num == got.objective->value_num);
      CHECK(want.objective->value_den == got.objective->value_den);
      // identical tie-breaking: both return the lexicographically least optimum
      CHECK(want.assignment->res == got.assignment->res);
      CHECK(got.bound_num * want.objective->value_den ==
            want.objective->value_num * got.bound_den);
    }
  }
}

TEST_CASE("exact bound is admissible at the root") {
  Rng rng(55);
  for (int it = 0; it < 30; ++it) {
    Instance inst = fixtures::random_instance(rng, 6, 8, 3, 2);
    ModelSpec spec = build_stage1(inst, full_candidates(inst));
    Solution opt = solve_brute_force(spec);

    SolveLimits cut;
    cut.node_limit = 1;  // stop immediately: solution carries the root bound
    Solution probe = solve_exact(spec, cut);
    if (probe.status == SolveStatus::Optimal) continue;  // solved within one node
    CHECK(probe.bound_num * opt.objective->value_den <=
          opt.objective->value_num * probe.bound_den);
  }
}

TEST_CASE("warm starts never worsen the result") {
  Rng rng(91);
  for (int it = 0; it < 25; ++it) {
    Instance inst = fixtures::random_instance(rng, 5, 8, 3, 2);
    ModelSpec spec = build_stage1(inst, full_candidates(inst));
    Solution plain = solve_exact(spec);

    Assignment phi0 = Assignment::initial_of(inst);
    ExactOptions opts;
    opts.warm_start = &phi0;
    Solution warm = solve_exact(spec, opts);
    REQUIRE(warm.status == SolveStatus::Optimal);
    CHECK(warm.objective->value_num == plain.objective->value_num);
    CHECK(warm.assignment->res == plain.assignment->res);  // tie-break preserved
  }
}

TEST_CASE("warm start must satisfy the imbalance cap") {
  Instance d1 = fixtures::make_d1();
  ModelSpec spec = build_stage2_efficient(d1, full_candidates(d1), 0);
  Assignment phi0 = Assignment::initial_of(d1);  // I = 4 > 0
  ExactOptions opts;
  opts.warm_start = &phi0;
  CHECK_THROWS_AS(solve_exact(spec, opts), Error);
}

TEST_CASE("node limit produces a limit status with a valid bound") {
  Instance e1 = fixtures::make_e1();
  ModelSpec spec = build_stage1(e1, full_candidates(e1));
  SolveLimits limits;
  limits.node_limit = 3;
  Solution s = solve_exact(spec, limits);
  CHECK(s.status == SolveStatus::LimitReached);
  CHECK(s.bound_num <= 0);  // stage-1 optimum of this fixture is 0
}

TEST_CASE("guided child order changes the path, not the answer") {
  Rng rng(17);
  for (int it = 0; it < 15; ++it) {
    Instance inst = fixtures::random_instance(rng, 5, 7, 3, 2);
    ModelSpec spec = build_stage1(inst, full_candidates(inst));
    Solution plain = solve_exact(spec);

    std::vector<std::vector<double>> scores(inst.num_arcs(),
                                            std::vector<double>(inst.num_resources()));
    for (auto& row : scores)
      for (double& v : row) v = rng.next_unit();
    ExactOptions opts;
    opts.guidance = &scores;
    Solution guided = solve_exact(spec, opts);
    CHECK(guided.objective->value_num == plain.objective->value_num);
    CHECK(guided.assignment->res == plain.assignment->res);
  }
}

TEST_CASE("local search reaches the exact stage-1 optimum on the cycle fixture") {
  Instance d1 = fixtures::make_d1();
  ModelSpec spec = build_stage1(d1, full_candidates(d1));
  for (uint64_t seed : {1, 7, 42}) {
    Solution s = solve_ils(spec, seed);
    REQUIRE(s.assignment.has_value());
    CHECK(s.objective->imbalance == 0);
    CHECK(s.status == SolveStatus::Optimal);  // structural floor reached, so provably optimal
  }
}

TEST_CASE("local search stays feasible and above the exact optimum") {
  Rng rng(303);
  for (int it = 0; it < 20; ++it) {
    Instance inst = fixtures::random_instance(rng, 6, 10, 4, 3);
    Assignment phi0 = Assignment::initial_of(inst);
    int64_t i0 = total_imbalance(inst, phi0).total;
    Solution floor = solve_exact(build_stage1(inst, full_candidates(inst)));
    int64_t istar = floor.objective->imbalance + (i0 - floor.objective->imbalance) / 2;

    for (const ModelSpec& spec : spec_suite(inst, istar)) {
      Solution exact = solve_exact(spec);
      Solution heur = solve_ils(spec, 5);
      REQUIRE(exact.status == SolveStatus::Optimal);
      REQUIRE(heur.assignment.has_value());
      EvalResult ev = evaluate(spec, *heur.assignment);
      CHECK(ev.feasible);  // cap respected after repair
      CHECK(ev.objective.value_num == heur.objective->value_num);
      CHECK(heur.objective->value_num * exact.objective->value_den >=
            exact.objective->value_num * heur.objective->value_den);
    }
  }
}

TEST_CASE("local search is deterministic per seed") {
  Instance e1 = fixtures::make_e1();
  ModelSpec spec = build_stage2_minimax(e1, full_candidates(e1), 0);
  Solution a = solve_ils(spec, 11);
  Solution b = solve_ils(spec, 11);
  REQUIRE(a.assignment.has_value());
  CHECK(a.assignment->res == b.assignment->res);
  CHECK(a.objective->value_num == b.objective->value_num);
}

TEST_CASE("solution json carries the objective breakdown") {
  Instance d1 = fixtures::make_d1();
  ModelSpec spec = build_stage2_efficient(d1, full_candidates(d1), 0);
  Solution s = solve_exact(spec);
  json j = solution_to_json(spec, s);
  CHECK(j["status"] == "optimal");
  CHECK(j["kind"] == "stage2-efficient");
  CHECK(j["objective"]["changes"] == 1);
  CHECK(j["imbalance_cap"] == 0);
  CHECK(j["assignment"].is_object());
  CHECK(j["assignment"]["a2"] == "r1");
}
