#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include <capsac/enumdecomp.hpp>
#include <capsac/oracle.hpp>
#include <capsac/validate.hpp>

#include "testutil.hpp"

using namespace capsac;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Cross-check a geometry-sum catalog against the photo-set route.
void check_catalog(const Instance& inst, const SubRegionCatalog& cat) {
  const std::vector<CatalogEntry> naive = naive_catalog(inst);
  REQUIRE(cat.regions.size() == naive.size());
  for (std::size_t i = 0; i < naive.size(); ++i) {
    const SubRegion& s = cat.regions[i];
    const CatalogEntry& e = naive[i];
    REQUIRE(s.rect == e.rect);
    REQUIRE(s.cardinality == static_cast<long long>(e.photo_idx.size()));
    double t = 0.0;
    std::map<int, double> mb;
    for (int p : e.photo_idx) {
      t += inst.photos[p].lambda_s;
      for (int h : inst.photos[p].holders) mb[h] += inst.photos[p].mu_mb;
    }
    REQUIRE(s.time_s == t);
    std::map<int, double> got(s.holder_mb.begin(), s.holder_mb.end());
    for (auto it = mb.begin(); it != mb.end();)
      it = it->second == 0.0 ? mb.erase(it) : std::next(it);
    REQUIRE(got == mb);
  }
}

std::vector<int> indices_with_cardinality(const SubRegionCatalog& cat, long long n) {
  auto it = cat.omega_map.find(n);
  REQUIRE(it != cat.omega_map.end());
  return it->second;
}

std::vector<int> all_indices(const SubRegionCatalog& cat) {
  std::vector<int> idx(cat.regions.size());
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

int count_sub(const std::string& s, const std::string& sub) {
  int n = 0;
  for (auto p = s.find(sub); p != std::string::npos; p = s.find(sub, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("rectangle catalog on the two by two grid", "[enumdecomp]") {
  const Instance inst = testutil::load_fixture("t4.json");
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  build_cardinality_index(cat);

  REQUIRE(cat.regions.size() == 9);
  std::map<long long, int> by_card;
  for (const SubRegion& s : cat.regions) ++by_card[s.cardinality];
  REQUIRE(by_card == std::map<long long, int>{{1, 4}, {2, 4}, {4, 1}});
  REQUIRE(cat.omega == std::vector<long long>{1, 2, 4});
  REQUIRE(indices_with_cardinality(cat, 2).size() == 4);

  // The full rectangle aggregates everything.
  const SubRegion& full = cat.regions[4];
  REQUIRE(full.rect == Rect{0, 1, 0, 1});
  REQUIRE(full.time_s == 40.0);
  REQUIRE(full.holder_mb == std::vector<std::pair<int, double>>{{0, 10.0}, {1, 10.0}});

  check_catalog(inst, cat);
}

TEST_CASE("rectangle catalog on the three by three grid", "[enumdecomp]") {
  const Instance inst = testutil::load_fixture("t9.json");
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  build_cardinality_index(cat);

  REQUIRE(cat.regions.size() == 36);
  REQUIRE(cat.omega == std::vector<long long>{1, 2, 3, 4, 6, 9});
  const std::map<long long, std::size_t> expect{{1, 9}, {2, 12}, {3, 6}, {4, 4}, {6, 4}, {9, 1}};
  for (const auto& [card, cnt] : expect)
    REQUIRE(indices_with_cardinality(cat, card).size() == cnt);

  // Every region index shows up under exactly its own cardinality.
  std::size_t covered = 0;
  for (const auto& [card, idx] : cat.omega_map) {
    covered += idx.size();
    for (int i : idx) REQUIRE(cat.regions[i].cardinality == card);
  }
  REQUIRE(covered == cat.regions.size());

  check_catalog(inst, cat);
}

TEST_CASE("rectangle catalog matches the photo-set route on fixtures", "[enumdecomp]") {
  for (const char* name : {"band4.json", "strip3.json", "strip4.json"}) {
    const Instance inst = testutil::load_fixture(name);
    GeoSums gs(inst);
    SubRegionCatalog cat = enumerate_rects(inst, gs);
    INFO(name);
    check_catalog(inst, cat);
  }
}

TEST_CASE("rectangle catalog matches the photo-set route on random grids", "[enumdecomp]") {
  Rng rng(7001);
  for (int trial = 0; trial < 25; ++trial) {
    const Instance inst = testutil::make_random_instance(rng);
    CAPTURE(trial, serialize_instance(inst));
    GeoSums gs(inst);
    SubRegionCatalog cat = enumerate_rects(inst, gs);
    check_catalog(inst, cat);
  }
}

TEST_CASE("restricted solve over dominoes finds the even split", "[enumdecomp]") {
  const Instance inst = testutil::load_fixture("t4.json");
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  build_cardinality_index(cat);

  RestrictedProblem pr(inst, cat, indices_with_cardinality(cat, 2));
  RestrictedResult rr = solve_restricted(pr);
  REQUIRE(rr.status == RestrictedStatus::Optimal);
  REQUIRE(rr.makespan_s == 20.0);
  REQUIRE(rr.nodes > 0);
  REQUIRE(validate_solution(inst, rr.solution).empty());
  REQUIRE(makespan(inst, rr.solution) == 20.0);
}

TEST_CASE("restricted solve over singletons alone is infeasible", "[enumdecomp]") {
  const Instance inst = testutil::load_fixture("t4.json");
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  build_cardinality_index(cat);

  RestrictedProblem pr(inst, cat, indices_with_cardinality(cat, 1));
  RestrictedResult rr = solve_restricted(pr);
  REQUIRE(rr.status == RestrictedStatus::Infeasible);
  REQUIRE(std::isinf(rr.makespan_s));
  REQUIRE_FALSE(rr.solution.feasible);
}

TEST_CASE("restricted solve over row and column strips", "[enumdecomp]") {
  const Instance inst = testutil::load_fixture("t9.json");
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  build_cardinality_index(cat);

  RestrictedProblem pr(inst, cat, indices_with_cardinality(cat, 3));
  RestrictedResult rr = solve_restricted(pr);
  REQUIRE(rr.status == RestrictedStatus::Optimal);
  REQUIRE(rr.makespan_s == 30.0);
  REQUIRE(validate_solution(inst, rr.solution).empty());

  // Doubling the replication doubles the per-drone load on three strips.
  const Instance twice = testutil::with_fields(inst, 2, kInf);
  GeoSums gs2(twice);
  SubRegionCatalog cat2 = enumerate_rects(twice, gs2);
  build_cardinality_index(cat2);
  RestrictedProblem pr2(twice, cat2, indices_with_cardinality(cat2, 3));
  RestrictedResult rr2 = solve_restricted(pr2);
  REQUIRE(rr2.status == RestrictedStatus::Optimal);
  REQUIRE(rr2.makespan_s == 60.0);
  REQUIRE(validate_solution(twice, rr2.solution).empty());
}

TEST_CASE("restricted solve with full replication stacks both dominoes", "[enumdecomp]") {
  const Instance inst = testutil::with_fields(testutil::load_fixture("t4.json"), 2, kInf);
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  build_cardinality_index(cat);

  RestrictedProblem pr(inst, cat, indices_with_cardinality(cat, 2));
  RestrictedResult rr = solve_restricted(pr);
  REQUIRE(rr.status == RestrictedStatus::Optimal);
  REQUIRE(rr.makespan_s == 40.0);
  REQUIRE(validate_solution(inst, rr.solution).empty());
}

TEST_CASE("restricted solve under a loose deadline keeps the local pairing", "[enumdecomp]") {
  const Instance inst = testutil::with_fields(testutil::load_fixture("t4.json"), 1, 100.0);
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  build_cardinality_index(cat);

  RestrictedProblem pr(inst, cat, indices_with_cardinality(cat, 2));
  RestrictedResult rr = solve_restricted(pr);
  REQUIRE(rr.status == RestrictedStatus::Optimal);
  REQUIRE(rr.makespan_s == 20.0);
  REQUIRE(validate_solution(inst, rr.solution).empty());
  // Each drone composes the photos it already holds, so nothing moves.
  REQUIRE(rr.solution.delays.empty());
}

TEST_CASE("restricted solve reports a budget cut", "[enumdecomp]") {
  const Instance inst = testutil::load_fixture("t9.json");
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  build_cardinality_index(cat);

  RestrictedProblem pr(inst, cat, all_indices(cat));
  RestrictedBudget bg;
  bg.max_nodes = 3;
  RestrictedResult rr = solve_restricted(pr, bg);
  REQUIRE(rr.status == RestrictedStatus::Budget);
  REQUIRE(rr.nodes >= 3);
}

TEST_CASE("restricted solve accepts only strict warm-start improvements", "[enumdecomp]") {
  const Instance inst = testutil::load_fixture("t4.json");
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  build_cardinality_index(cat);
  const std::vector<int> dominoes = indices_with_cardinality(cat, 2);

  RestrictedBudget tie;
  tie.warm_makespan_s = 20.0;
  RestrictedResult rr = solve_restricted(RestrictedProblem(inst, cat, dominoes), tie);
  REQUIRE(rr.status == RestrictedStatus::Optimal);
  REQUIRE(std::isinf(rr.makespan_s));
  REQUIRE(rr.solution.regions.empty());

  RestrictedBudget slack;
  slack.warm_makespan_s = 25.0;
  rr = solve_restricted(RestrictedProblem(inst, cat, dominoes), slack);
  REQUIRE(rr.status == RestrictedStatus::Optimal);
  REQUIRE(rr.makespan_s == 20.0);
  REQUIRE(validate_solution(inst, rr.solution).empty());
}

TEST_CASE("restricted solve rejects out-of-range candidates", "[enumdecomp]") {
  const Instance inst = testutil::load_fixture("t4.json");
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  REQUIRE_THROWS_AS(solve_restricted(RestrictedProblem(inst, cat, {99})),
                    std::invalid_argument);
}

TEST_CASE("interval widening on the two by two grid", "[enumdecomp]") {
  const Instance inst = testutil::load_fixture("t4.json");
  DecomposeResult dr = decompose_solve(inst);

  REQUIRE(dr.feasible);
  REQUIRE(dr.makespan_s == 20.0);
  REQUIRE(validate_solution(inst, dr.solution).empty());
  REQUIRE(dr.trace.size() == 2);

  // First pass: only the four two-photo rectangles are in play.
  REQUIRE(dr.trace[0].iteration == 1);
  REQUIRE(dr.trace[0].n_lo == 2);
  REQUIRE(dr.trace[0].n_hi == 2);
  REQUIRE(dr.trace[0].candidate_count == 4);
  REQUIRE(dr.trace[0].makespan_s == 20.0);
  REQUIRE(dr.trace[0].feasible);
  REQUIRE(dr.trace[0].proven);

  // Second pass widens to the whole catalog, repeats the value, stops.
  REQUIRE(dr.trace[1].iteration == 2);
  REQUIRE(dr.trace[1].n_lo == 1);
  REQUIRE(dr.trace[1].n_hi == 4);
  REQUIRE(dr.trace[1].candidate_count == 9);
  REQUIRE(dr.trace[1].makespan_s == 20.0);
}

TEST_CASE("interval widening on the three by three grid", "[enumdecomp]") {
  const Instance inst = testutil::load_fixture("t9.json");
  DecomposeResult dr = decompose_solve(inst);

  REQUIRE(dr.feasible);
  REQUIRE(dr.makespan_s == 30.0);
  REQUIRE(validate_solution(inst, dr.solution).empty());
  REQUIRE(dr.trace.size() == 2);
  REQUIRE(dr.trace[0].n_lo == 3);
  REQUIRE(dr.trace[0].n_hi == 3);
  REQUIRE(dr.trace[0].candidate_count == 6);
  REQUIRE(dr.trace[1].n_lo == 2);
  REQUIRE(dr.trace[1].n_hi == 4);
}

TEST_CASE("interval widening proves a hopeless deadline infeasible", "[enumdecomp]") {
  // Photos all start on drone 1; serving drone 2 costs at least one second of
  // transfer, so no plan fits under half a second.
  const Instance inst = testutil::with_fields(testutil::load_fixture("strip3.json"), 1, 0.5);
  DecomposeResult dr = decompose_solve(inst);
  REQUIRE_FALSE(dr.feasible);
  REQUIRE(dr.proven_infeasible);
  REQUIRE(std::isinf(dr.makespan_s));
  REQUIRE(dr.trace.size() == 2);
  REQUIRE_FALSE(dr.trace.back().feasible);
}

TEST_CASE("interval widening without the repeat stop matches brute force", "[enumdecomp]") {
  Rng rng(9100);
  DecomposeConfig sweep;
  sweep.stop_on_repeat = false;
  int feasible_seen = 0;
  int infeasible_seen = 0;

  for (int trial = 0; trial < 30; ++trial) {
    Instance inst = testutil::make_random_instance(rng);
    if (trial % 3 == 1) inst = testutil::with_fields(inst, inst.sigma, 0.75);
    if (trial % 3 == 2) inst = testutil::with_fields(inst, inst.sigma, 2.5);
    CAPTURE(trial, serialize_instance(inst));

    const OracleResult expect = oracle_solve(inst);
    const DecomposeResult got = decompose_solve(inst, sweep);

    if (expect.feasible) {
      ++feasible_seen;
      REQUIRE(got.feasible);
      REQUIRE(got.makespan_s == expect.makespan_s);
      REQUIRE(validate_solution(inst, got.solution).empty());
      REQUIRE(makespan(inst, got.solution) == got.makespan_s);
    } else {
      ++infeasible_seen;
      REQUIRE_FALSE(got.feasible);
      REQUIRE(got.proven_infeasible);
    }

    // The early-stopping variant can never beat brute force and never lies.
    const DecomposeResult early = decompose_solve(inst);
    if (early.feasible) {
      REQUIRE(expect.feasible);
      REQUIRE(early.makespan_s >= expect.makespan_s - 1e-9);
      REQUIRE(validate_solution(inst, early.solution).empty());
    }
    for (std::size_t i = 1; i < early.trace.size(); ++i)
      REQUIRE(early.trace[i].makespan_s <= early.trace[i - 1].makespan_s);
  }
  REQUIRE(feasible_seen >= 8);
  REQUIRE(infeasible_seen >= 3);
}

TEST_CASE("model export lists every constraint family", "[enumdecomp]") {
  const Instance inst = testutil::with_fields(testutil::load_fixture("t4.json"), 1, 100.0);
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  const std::vector<int> idx = all_indices(cat);

  const std::string lp = export_milp(inst, cat, idx, {});
  REQUIRE(lp.rfind("\\ covering-assignment model\nMinimize\n obj: 1 Tmax\n", 0) == 0);
  REQUIRE(lp.find("Subject To\n") != std::string::npos);
  REQUIRE(lp.substr(lp.size() - 4) == "End\n");

  REQUIRE(count_sub(lp, " time_d") == 2);
  REQUIRE(count_sub(lp, " lat_") == 2);
  REQUIRE(count_sub(lp, " rel_S") == 9);
  REQUIRE(count_sub(lp, " cover_p") == 4);
  REQUIRE(count_sub(lp, " count:") == 1);
  REQUIRE(lp.find("= 2\n", lp.find(" count:")) != std::string::npos);
  REQUIRE(count_sub(lp, " act_") == 2);
  REQUIRE(count_sub(lp, " rate_") == 2);
  REQUIRE(count_sub(lp, " btl_") == 2);
  REQUIRE(count_sub(lp, " cap_") == 1);
  REQUIRE(count_sub(lp, " sat_") == 2);
  REQUIRE(count_sub(lp, " umax_") == 2);
  REQUIRE(count_sub(lp, " wsel_") == 2);
  REQUIRE(count_sub(lp, " used_d") == 0);

  const std::string bin = lp.substr(lp.find("Binaries\n"));
  REQUIRE(count_sub(bin, " q_S") == 18);
  REQUIRE(count_sub(bin, " o_S") == 9);
  REQUIRE(count_sub(bin, " z_") == 2);
  REQUIRE(count_sub(bin, " w_") == 2);

  // Same inputs, same bytes.
  REQUIRE(export_milp(inst, cat, idx, {}) == lp);

  // No deadline, no rate floors; the traffic bookkeeping stays.
  const Instance open = testutil::load_fixture("t4.json");
  GeoSums gso(open);
  SubRegionCatalog cato = enumerate_rects(open, gso);
  const std::string lpo = export_milp(open, cato, all_indices(cato), {});
  REQUIRE(count_sub(lpo, " lat_") == 0);
  REQUIRE(count_sub(lpo, " act_") == 2);

  // Optional per-drone employment rows.
  MilpFlags flags;
  flags.require_drone_coverage = true;
  const std::string lpu = export_milp(inst, cat, idx, flags);
  REQUIRE(count_sub(lpu, " used_d") == 2);

  REQUIRE_THROWS_AS(export_milp(inst, cat, {}, {}), std::invalid_argument);
}

TEST_CASE("model export golden bytes", "[enumdecomp]") {
  const Instance inst = testutil::with_fields(testutil::load_fixture("t4.json"), 1, 100.0);
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  const std::string lp = export_milp(inst, cat, all_indices(cat), {});
  REQUIRE(lp == testutil::read_file(testutil::data_path("t4_export.lp")));
}

TEST_CASE("catalog csv lists one row per rectangle", "[enumdecomp]") {
  const Instance inst = testutil::load_fixture("t4.json");
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  const std::string csv = catalog_csv(cat);

  REQUIRE(csv ==
          "col_lo,col_hi,row_lo,row_hi,photos,time_s\n"
          "0,0,0,0,1,10\n"
          "0,0,0,1,2,20\n"
          "0,0,1,1,1,10\n"
          "0,1,0,0,2,20\n"
          "0,1,0,1,4,40\n"
          "0,1,1,1,2,20\n"
          "1,1,0,0,1,10\n"
          "1,1,0,1,2,20\n"
          "1,1,1,1,1,10\n");
}
