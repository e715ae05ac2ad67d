#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <capsac/geosum.hpp>
#include <capsac/mmf.hpp>
#include <capsac/model.hpp>
#include <capsac/ptree.hpp>
#include <capsac/rng.hpp>

namespace capsac {

// A covering under construction: tree leaves are the regions, and the drone
// lists ride along by leaf position in pre-order. num_capable() leaves, each
// with exactly sigma distinct capable drones (dense indices, sorted).
struct SearchState {
  PartitionTree tree;
  std::vector<std::vector<int>> assign;
};

struct Evaluation {
  double makespan_s = std::numeric_limits<double>::infinity();
  double violation_s = 0.0;  // worst deadline overrun, 0 when none

  bool feasible() const { return violation_s <= 0.0; }
};

// Strict lexicographic order: fix the deadline overrun first, then the
// makespan.
inline bool lex_better(const Evaluation& a, const Evaluation& b) {
  if (a.violation_s != b.violation_s) return a.violation_s < b.violation_s;
  return a.makespan_s < b.makespan_s;
}

// Shared per-instance working set for one search.
struct VnsContext {
  const Instance& inst;
  const GeoSums& gs;
  DemandPlan plan;
  MmfMemo memo;
  bool bounded;

  VnsContext(const Instance& i, const GeoSums& g)
      : inst(i), gs(g), plan(i), bounded(std::isfinite(i.t_hat_s)) {}
};

namespace detail {

inline std::vector<Rect> leaf_rects(const PartitionTree& t) {
  std::vector<Rect> out;
  for (int idx : leaf_list(t)) out.push_back(t.nodes[idx].rect);
  return out;
}

inline std::vector<double> drone_times(VnsContext& cx, const std::vector<Rect>& rects,
                                       const std::vector<std::vector<int>>& assign) {
  std::vector<double> time(cx.inst.drones.size(), 0.0);
  for (std::size_t li = 0; li < rects.size(); ++li) {
    const double t = cx.gs.region_time(rects[li]);
    for (int d : assign[li]) time[d] += t;
  }
  return time;
}

inline double max_time(const std::vector<double>& time) {
  double mk = 0.0;
  for (double v : time) mk = std::max(mk, v);
  return mk;
}

inline double state_violation(VnsContext& cx, const std::vector<Rect>& rects,
                              const std::vector<std::vector<int>>& assign) {
  if (!cx.bounded) return 0.0;
  std::vector<double> loads = demand_loads(cx.inst, cx.plan, cx.gs, rects, assign);
  return delay_violation(plan_delays(loads, cx.inst.links, cx.plan, cx.memo), cx.inst.t_hat_s);
}

// Replace `from` with `to` in a sorted drone list.
inline void swap_member(std::vector<int>& list, int from, int to) {
  for (int& d : list)
    if (d == from) d = to;
  std::sort(list.begin(), list.end());
}

}  // namespace detail

inline Evaluation evaluate(VnsContext& cx, const SearchState& st) {
  const std::vector<Rect> rects = detail::leaf_rects(st.tree);
  Evaluation ev;
  ev.makespan_s = detail::max_time(detail::drone_times(cx, rects, st.assign));
  ev.violation_s = detail::state_violation(cx, rects, st.assign);
  return ev;
}

// Random tree plus a rotating drone window per leaf: every region gets sigma
// distinct drones and every capable drone at least one region.
inline SearchState initial_state(VnsContext& cx, Rng& rng) {
  const int m = cx.inst.num_capable();
  SearchState st;
  st.tree = random_tree(cx.inst, cx.gs, m, rng);
  st.assign.resize(m);
  for (int li = 0; li < m; ++li) {
    for (int j = 0; j < cx.inst.sigma; ++j)
      st.assign[li].push_back(cx.inst.capable[(li * cx.inst.sigma + j) % m]);
    std::sort(st.assign[li].begin(), st.assign[li].end());
  }
  return st;
}

namespace detail {

// One first-improvement pass. A candidate wins when its makespan strictly
// drops; the deadline check runs only then, and only a clean candidate is
// taken. Returns whether a move was applied.
inline bool step_transfer(VnsContext& cx, SearchState& st, Evaluation& ev) {
  const std::vector<Rect> rects = leaf_rects(st.tree);
  const int m = static_cast<int>(rects.size());
  std::vector<double> time = drone_times(cx, rects, st.assign);
  const double mk = max_time(time);
  std::vector<int> region_cnt(cx.inst.drones.size(), 0);
  for (const auto& list : st.assign)
    for (int d : list) ++region_cnt[d];

  for (int li = 0; li < m; ++li) {
    const double t = cx.gs.region_time(rects[li]);
    for (int di : st.assign[li]) {
      if (time[di] != mk || region_cnt[di] <= 1) continue;
      for (int dj : cx.inst.capable) {
        if (time[dj] == mk) continue;
        if (std::find(st.assign[li].begin(), st.assign[li].end(), dj) != st.assign[li].end())
          continue;
        std::vector<double> cand = time;
        cand[di] -= t;
        cand[dj] += t;
        if (max_time(cand) >= mk) continue;
        std::vector<std::vector<int>> next = st.assign;
        swap_member(next[li], di, dj);
        // the patched vector is only a screen: accept on the same summation
        // route the next pass will measure, or rounding noise can cycle
        const double cand_mk = max_time(drone_times(cx, rects, next));
        if (cand_mk >= mk) continue;
        const double viol = state_violation(cx, rects, next);
        if (viol > 0.0) continue;
        st.assign = std::move(next);
        ev.makespan_s = cand_mk;
        ev.violation_s = viol;
        return true;
      }
    }
  }
  return false;
}

inline bool step_swap(VnsContext& cx, SearchState& st, Evaluation& ev) {
  const std::vector<Rect> rects = leaf_rects(st.tree);
  const int m = static_cast<int>(rects.size());
  std::vector<double> time = drone_times(cx, rects, st.assign);
  const double mk = max_time(time);

  for (int li = 0; li < m; ++li) {
    const double ti = cx.gs.region_time(rects[li]);
    for (int di : st.assign[li]) {
      if (time[di] != mk) continue;
      for (int lj = 0; lj < m; ++lj) {
        if (lj == li) continue;
        const double tj = cx.gs.region_time(rects[lj]);
        for (int dj : st.assign[lj]) {
          if (time[dj] == mk) continue;
          if (std::find(st.assign[li].begin(), st.assign[li].end(), dj) != st.assign[li].end())
            continue;
          if (std::find(st.assign[lj].begin(), st.assign[lj].end(), di) != st.assign[lj].end())
            continue;
          std::vector<double> cand = time;
          cand[di] += tj - ti;
          cand[dj] += ti - tj;
          if (max_time(cand) >= mk) continue;
          std::vector<std::vector<int>> next = st.assign;
          swap_member(next[li], di, dj);
          swap_member(next[lj], dj, di);
          // same screen-then-measure split as the transfer step
          const double cand_mk = max_time(drone_times(cx, rects, next));
          if (cand_mk >= mk) continue;
          const double viol = state_violation(cx, rects, next);
          if (viol > 0.0) continue;
          st.assign = std::move(next);
          ev.makespan_s = cand_mk;
          ev.violation_s = viol;
          return true;
        }
      }
    }
  }
  return false;
}

inline bool step_hyperplane(VnsContext& cx, SearchState& st, Evaluation& ev) {
  const std::vector<int> leaves = leaf_list(st.tree);
  const std::vector<Rect> rects = leaf_rects(st.tree);
  std::vector<double> time = drone_times(cx, rects, st.assign);
  const double mk = max_time(time);
  const std::vector<int> parent = parent_of(st.tree);

  std::vector<int> hot;  // parents of busiest-drone leaves, first seen order
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    bool busy = false;
    for (int d : st.assign[li])
      if (time[d] == mk) busy = true;
    if (!busy) continue;
    const int p = parent[leaves[li]];
    if (p >= 0 && std::find(hot.begin(), hot.end(), p) == hot.end()) hot.push_back(p);
  }

  for (int p : hot) {
    for (const HyperplaneMove& mv : enumerate_hyperplane_moves(st.tree, cx.gs, p)) {
      PartitionTree cand_tree = apply_hyperplane_move(st.tree, cx.gs, mv);
      const std::vector<Rect> cand_rects = leaf_rects(cand_tree);
      const double cand_mk = max_time(drone_times(cx, cand_rects, st.assign));
      if (cand_mk >= mk) continue;
      const double viol = state_violation(cx, cand_rects, st.assign);
      if (viol > 0.0) continue;
      st.tree = std::move(cand_tree);
      ev.makespan_s = cand_mk;
      ev.violation_s = viol;
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Exhausts one neighborhood: 1 moves a region off a busiest drone, 2 trades
// regions between a busiest drone and a calmer one, 3 relocates a splitting
// hyperplane near the busiest drones' leaves.
inline bool local_search(VnsContext& cx, int neighborhood, SearchState& st, Evaluation& ev) {
  bool any = false;
  for (;;) {
    bool hit = false;
    switch (neighborhood) {
      case 1: hit = detail::step_transfer(cx, st, ev); break;
      case 2: hit = detail::step_swap(cx, st, ev); break;
      case 3: hit = detail::step_hyperplane(cx, st, ev); break;
      default: throw std::invalid_argument("unknown neighborhood " + std::to_string(neighborhood));
    }
    if (!hit) break;
    any = true;
  }
  return any;
}

// Cycles through the active neighborhoods, returning to the first after
// every improvement, until none of them moves.
inline bool vnd(VnsContext& cx, const std::vector<int>& active, SearchState& st, Evaluation& ev) {
  bool any = false;
  std::size_t t = 0;
  while (t < active.size()) {
    if (local_search(cx, active[t], st, ev)) {
      any = true;
      t = 0;
    } else {
      ++t;
    }
  }
  return any;
}

// Diversification: regrow a random subtree whose root sits k levels above
// the deepest leaves (or as close as the tree allows). The drone lists stay
// put: a regrown subtree replaces exactly its own leaf positions.
inline SearchState shake(VnsContext& cx, const SearchState& st, int k, Rng& rng) {
  const int depth_target = std::max(0, tree_depth(st.tree) - k);
  const std::vector<int> depths = node_depths(st.tree);
  std::vector<int> cands;
  for (int d = depth_target; d >= 0 && cands.empty(); --d)
    for (int idx : preorder(st.tree))
      if (!st.tree.nodes[idx].is_leaf() && depths[idx] == d) cands.push_back(idx);
  if (cands.empty()) return st;  // single-leaf tree, nothing to regrow
  const int node = cands[rng.uniform_index(cands.size())];
  return SearchState{reconstruct_subtree(st.tree, cx.gs, node, rng), st.assign};
}

struct VnsConfig {
  double time_limit_s = 5.0;
  long long max_iterations = -1;  // negative: no cap
  double target_makespan = std::numeric_limits<double>::quiet_NaN();  // stop when reached
  std::uint64_t seed = 1;
  std::vector<int> neighborhoods = {1, 2, 3};
  std::function<void(long long, int, const Evaluation&)> on_iteration;
};

struct VnsResult {
  Solution solution;
  Evaluation eval;
  long long iterations = 0;
  double elapsed_s = 0.0;
  double best_found_s = 0.0;  // elapsed when the reported incumbent appeared
  bool reached_target = false;
  std::vector<std::string> warnings;
};

namespace detail {

inline bool hit_target(const Evaluation& ev, double target) {
  return !std::isnan(target) && ev.feasible() && ev.makespan_s <= target + 1e-9;
}

inline Solution to_solution(VnsContext& cx, const SearchState& st, const Evaluation& ev) {
  Solution sol;
  sol.makespan_s = ev.makespan_s;
  sol.feasible = ev.feasible();
  const std::vector<Rect> rects = leaf_rects(st.tree);
  for (std::size_t li = 0; li < rects.size(); ++li) {
    Region reg;
    reg.rect = rects[li];
    for (int d : st.assign[li]) reg.drone_ids.push_back(cx.inst.drones[d].id);
    sol.regions.push_back(std::move(reg));
  }
  std::vector<double> loads = demand_loads(cx.inst, cx.plan, cx.gs, rects, st.assign);
  std::vector<double> ds = plan_delays(loads, cx.inst.links, cx.plan, cx.memo);
  for (std::size_t i = 0; i < loads.size(); ++i) {
    if (loads[i] <= 0.0) continue;
    sol.delays.push_back(DelayEntry{cx.inst.drones[cx.plan.demands[i].from].id,
                                    cx.inst.drones[cx.plan.demands[i].to].id, ds[i]});
  }
  return sol;
}

}  // namespace detail

// Shake, descend, keep what helps: repeated subtree reconstruction at a
// depth that widens on every failure, with a nested neighborhood descent
// after each shake. A candidate replaces the incumbent only when strictly
// better, deadline overrun before makespan.
inline VnsResult vns_solve(const Instance& inst, const VnsConfig& cfg = {}) {
  VnsResult res;

  std::vector<int> active;
  for (int n : cfg.neighborhoods) {
    if (n < 1 || n > 3) throw std::invalid_argument("unknown neighborhood " + std::to_string(n));
    if (n == 1 && inst.sigma == 1) continue;  // transfers always empty their source
    if (std::find(active.begin(), active.end(), n) == active.end()) active.push_back(n);
  }
  if (active.empty()) {
    res.warnings.push_back("n1 inactive at sigma=1");
    active.push_back(2);
  }

  GeoSums gs(inst);
  VnsContext cx(inst, gs);
  Rng rng(cfg.seed);

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  SearchState best = initial_state(cx, rng);
  Evaluation best_ev = evaluate(cx, best);
  vnd(cx, active, best, best_ev);
  res.best_found_s = elapsed();

  int k = 1;
  int k_max = std::max(1, tree_depth(best.tree));
  const bool can_shake = inst.num_capable() >= 2;

  while (can_shake && !detail::hit_target(best_ev, cfg.target_makespan)) {
    if (cfg.max_iterations >= 0 && res.iterations >= cfg.max_iterations) break;
    if (elapsed() >= cfg.time_limit_s) break;
    ++res.iterations;

    SearchState cand = shake(cx, best, k, rng);
    Evaluation cand_ev = evaluate(cx, cand);
    vnd(cx, active, cand, cand_ev);

    if (lex_better(cand_ev, best_ev)) {
      best = std::move(cand);
      best_ev = cand_ev;
      res.best_found_s = elapsed();
      k = 1;
      k_max = std::max(1, tree_depth(best.tree));
    } else {
      ++k;
      if (k > k_max) k = 1;
    }
    if (cfg.on_iteration) cfg.on_iteration(res.iterations, k, best_ev);
  }

  res.solution = detail::to_solution(cx, best, best_ev);
  if (!res.solution.regions.empty()) {
    // report through the reference evaluation; the search's prefix sums can
    // sit a few ulps away from a photo-by-photo recheck
    res.solution.makespan_s = makespan(cx.inst, res.solution);
    best_ev.makespan_s = res.solution.makespan_s;
  }
  res.eval = best_ev;
  res.elapsed_s = elapsed();
  res.reached_target = detail::hit_target(best_ev, cfg.target_makespan);
  return res;
}

}  // namespace capsac
