#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include <capsac/oracle.hpp>
#include <capsac/validate.hpp>
#include <capsac/vns.hpp>

#include "testutil.hpp"

using namespace capsac;
using testutil::column_tree;
using testutil::load_fixture;
using testutil::with_fields;

namespace {

SearchState make_state(const Instance& inst, const GeoSums& gs, const std::vector<int>& splits,
                       std::vector<std::vector<int>> assign) {
  SearchState st;
  st.tree = column_tree(inst, gs, splits);
  st.assign = std::move(assign);
  return st;
}

}  // namespace

TEST_CASE("evaluation reports makespan and deadline overrun", "[vns]") {
  const Instance t4 = load_fixture("t4.json");
  GeoSums gs(t4);
  VnsContext cx(t4, gs);
  SearchState st = make_state(t4, gs, {0}, {{0}, {1}});
  Evaluation ev = evaluate(cx, st);
  REQUIRE(ev.makespan_s == 20.0);
  REQUIRE(ev.violation_s == 0.0);
  REQUIRE(ev.feasible());

  // Crossed assignment ships every photo over the one link, both ways.
  const Instance tight = with_fields(t4, 1, 15.0);
  GeoSums gs2(tight);
  VnsContext cx2(tight, gs2);
  SearchState crossed = make_state(tight, gs2, {0}, {{1}, {0}});
  Evaluation ev2 = evaluate(cx2, crossed);
  REQUIRE(ev2.makespan_s == 20.0);
  REQUIRE(ev2.violation_s == 5.0);
  REQUIRE_FALSE(ev2.feasible());
}

TEST_CASE("initial state covers every drone with distinct replicas", "[vns]") {
  const Instance t9 = with_fields(load_fixture("t9.json"), 2,
                                  std::numeric_limits<double>::infinity());
  GeoSums gs(t9);
  VnsContext cx(t9, gs);
  Rng rng(7);
  SearchState st = initial_state(cx, rng);
  REQUIRE(st.assign.size() == 3);
  std::set<int> seen;
  for (const auto& list : st.assign) {
    REQUIRE(list.size() == 2);
    REQUIRE(list[0] != list[1]);
    seen.insert(list.begin(), list.end());
  }
  REQUIRE(seen == std::set<int>{0, 1, 2});
}

TEST_CASE("transfer pass unloads the busiest drone", "[vns]") {
  const Instance t9 = with_fields(load_fixture("t9.json"), 2,
                                  std::numeric_limits<double>::infinity());
  GeoSums gs(t9);
  VnsContext cx(t9, gs);
  // Three columns of 30 s each; drone 0 carries all three.
  SearchState st = make_state(t9, gs, {0, 1}, {{0, 1}, {0, 1}, {0, 2}});
  Evaluation ev = evaluate(cx, st);
  REQUIRE(ev.makespan_s == 90.0);

  REQUIRE(local_search(cx, 1, st, ev));
  REQUIRE(ev.makespan_s == 60.0);
  REQUIRE(st.assign[0] == std::vector<int>{1, 2});
  REQUIRE(st.assign[1] == std::vector<int>{0, 1});
  REQUIRE(st.assign[2] == std::vector<int>{0, 2});
}

TEST_CASE("transfer pass chains until no busiest drone can shed work", "[vns]") {
  const Instance s4 = load_fixture("strip4.json");
  GeoSums gs(s4);
  VnsContext cx(s4, gs);
  SearchState st = make_state(s4, gs, {0, 1, 2}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  Evaluation ev = evaluate(cx, st);
  REQUIRE(ev.makespan_s == 80.0);

  REQUIRE(local_search(cx, 1, st, ev));
  REQUIRE(ev.makespan_s == 60.0);
  REQUIRE(st.assign[0] == std::vector<int>{1, 3});
  REQUIRE(st.assign[1] == std::vector<int>{0, 2});
  REQUIRE(st.assign[2] == std::vector<int>{0, 1});
  REQUIRE(st.assign[3] == std::vector<int>{2, 3});
  REQUIRE_FALSE(local_search(cx, 1, st, ev));
}

TEST_CASE("swap pass trades a heavy region for a light one", "[vns]") {
  const Instance s4 = load_fixture("strip4.json");
  GeoSums gs(s4);
  VnsContext cx(s4, gs);
  SearchState st = make_state(s4, gs, {0, 1, 2}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  Evaluation ev = evaluate(cx, st);

  REQUIRE(local_search(cx, 2, st, ev));
  REQUIRE(ev.makespan_s == 60.0);
  REQUIRE(st.assign[0] == std::vector<int>{1, 3});
  REQUIRE(st.assign[1] == std::vector<int>{0, 2});
  REQUIRE(st.assign[2] == std::vector<int>{0, 1});
  REQUIRE(st.assign[3] == std::vector<int>{2, 3});
}

TEST_CASE("hyperplane pass rebalances a lopsided split", "[vns]") {
  const Instance s3 = load_fixture("strip3.json");
  GeoSums gs(s3);
  VnsContext cx(s3, gs);
  SearchState st = make_state(s3, gs, {1}, {{0}, {1}});
  Evaluation ev = evaluate(cx, st);
  REQUIRE(ev.makespan_s == 50.0);

  REQUIRE(local_search(cx, 3, st, ev));
  REQUIRE(ev.makespan_s == 40.0);
  REQUIRE_FALSE(local_search(cx, 3, st, ev));
  // The drone lists ride along untouched.
  REQUIRE(st.assign[0] == std::vector<int>{0});
  REQUIRE(st.assign[1] == std::vector<int>{1});
}

TEST_CASE("transfers are inert without replicas", "[vns]") {
  const Instance s3 = load_fixture("strip3.json");
  GeoSums gs(s3);
  VnsContext cx(s3, gs);
  SearchState st = make_state(s3, gs, {1}, {{0}, {1}});
  Evaluation ev = evaluate(cx, st);
  REQUIRE_FALSE(local_search(cx, 1, st, ev));
  REQUIRE(ev.makespan_s == 50.0);
}

TEST_CASE("descent runs its neighborhoods to a joint fixed point", "[vns]") {
  const Instance s4 = load_fixture("strip4.json");
  GeoSums gs(s4);
  VnsContext cx(s4, gs);
  SearchState st = make_state(s4, gs, {0, 1, 2}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  Evaluation ev = evaluate(cx, st);

  REQUIRE(vnd(cx, {1, 2, 3}, st, ev));
  REQUIRE(ev.makespan_s == 60.0);
  REQUIRE_FALSE(vnd(cx, {1, 2, 3}, st, ev));
}

TEST_CASE("solver settles balanced instances immediately", "[vns]") {
  const Instance t4 = load_fixture("t4.json");
  VnsConfig cfg;
  cfg.seed = 3;
  cfg.max_iterations = 10;
  VnsResult r1 = vns_solve(t4, cfg);
  REQUIRE(r1.eval.makespan_s == 20.0);
  REQUIRE(r1.eval.feasible());
  REQUIRE(r1.solution.feasible);
  REQUIRE(validate_solution(t4, r1.solution).empty());
  REQUIRE(r1.solution.makespan_s == makespan(t4, r1.solution));

  // Same seed, same run, byte for byte.
  VnsResult r2 = vns_solve(t4, cfg);
  REQUIRE(serialize_solution(r1.solution) == serialize_solution(r2.solution));
  REQUIRE(r1.iterations == r2.iterations);
}

TEST_CASE("solver reaches a known target and stops", "[vns]") {
  const Instance t9 = load_fixture("t9.json");
  VnsConfig cfg;
  cfg.seed = 1;
  cfg.max_iterations = 100;
  cfg.target_makespan = 30.0;
  VnsResult r = vns_solve(t9, cfg);
  REQUIRE(r.reached_target);
  REQUIRE(r.eval.makespan_s == 30.0);
  REQUIRE(validate_solution(t9, r.solution).empty());
}

TEST_CASE("solver straightens a lopsided strip", "[vns]") {
  const Instance s3 = load_fixture("strip3.json");
  VnsConfig cfg;
  cfg.seed = 5;
  cfg.max_iterations = 5;
  VnsResult r = vns_solve(s3, cfg);
  REQUIRE(r.eval.makespan_s == 40.0);
  REQUIRE(validate_solution(s3, r.solution).empty());
}

TEST_CASE("deadline pressure outranks a smaller makespan", "[vns]") {
  // Balanced halves finish in 20 s but choke the relay; the feasible
  // optimum hands over one photo and reconstructs in 30 s.
  const Instance band = with_fields(load_fixture("band4.json"), 1, 15.0);
  VnsConfig cfg;
  cfg.seed = 1;
  cfg.max_iterations = 60;
  cfg.target_makespan = 30.0;
  VnsResult r = vns_solve(band, cfg);
  REQUIRE(r.reached_target);
  REQUIRE(r.eval.makespan_s == 30.0);
  REQUIRE(r.eval.violation_s == 0.0);
  REQUIRE(r.solution.feasible);
  REQUIRE(validate_solution(band, r.solution).empty());
}

TEST_CASE("hopeless deadlines minimize the overrun first", "[vns]") {
  const Instance band = with_fields(load_fixture("band4.json"), 1, 5.0);
  VnsConfig cfg;
  cfg.seed = 1;
  cfg.max_iterations = 60;
  VnsResult r = vns_solve(band, cfg);
  REQUIRE_FALSE(r.solution.feasible);
  REQUIRE(r.eval.violation_s == 5.0);
  REQUIRE(r.eval.makespan_s == 30.0);
  REQUIRE(r.iterations == 60);
  REQUIRE_FALSE(r.reached_target);
}

TEST_CASE("iteration cap of zero keeps only the first descent", "[vns]") {
  const Instance t4 = load_fixture("t4.json");
  VnsConfig cfg;
  cfg.seed = 2;
  cfg.max_iterations = 0;
  VnsResult r = vns_solve(t4, cfg);
  REQUIRE(r.iterations == 0);
  REQUIRE(r.eval.makespan_s == 20.0);
  REQUIRE(validate_solution(t4, r.solution).empty());
}

TEST_CASE("neighborhood selection is validated and patched", "[vns]") {
  const Instance t4 = load_fixture("t4.json");
  VnsConfig cfg;
  cfg.seed = 2;
  cfg.max_iterations = 4;
  cfg.neighborhoods = {1};  // inert without replicas
  VnsResult r = vns_solve(t4, cfg);
  REQUIRE(std::find(r.warnings.begin(), r.warnings.end(), "n1 inactive at sigma=1") !=
          r.warnings.end());
  REQUIRE(r.eval.makespan_s == 20.0);

  cfg.neighborhoods = {4};
  REQUIRE_THROWS_AS(vns_solve(t4, cfg), std::invalid_argument);
}

TEST_CASE("random instances solve valid and never beat the oracle", "[vns]") {
  testutil::RandomInstanceOpts opts;
  Rng rng(4242);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 20; ++trial) {
    Instance inst;
    try {
      inst = testutil::make_random_instance(rng, opts);
    } catch (const std::exception&) {
      continue;
    }
    OracleResult ref;
    try {
      ref = oracle_solve(inst);
    } catch (const std::exception&) {
      continue;
    }
    if (!ref.feasible) continue;
    ++checked;

    VnsConfig cfg;
    cfg.seed = 100 + trial;
    cfg.max_iterations = 40;
    VnsResult r = vns_solve(inst, cfg);
    CAPTURE(trial, serialize_instance(inst));
    REQUIRE(validate_solution(inst, r.solution).empty());
    REQUIRE(r.solution.makespan_s == makespan(inst, r.solution));
    REQUIRE(r.eval.makespan_s == r.solution.makespan_s);
    REQUIRE(r.eval.makespan_s >= lower_bound(inst) - 1e-9);
    REQUIRE(r.eval.makespan_s >= ref.makespan_s - 1e-9);
  }
  REQUIRE(checked >= 15);
}
