#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <capsac/geosum.hpp>
#include <capsac/mmf.hpp>
#include <capsac/model.hpp>

namespace capsac {

// One enumerated rectangle: tight borders, photo count, processing time,
// and the data each drone would have to ship if it were not the assignee.
struct SubRegion {
  Rect rect;
  long long cardinality = 0;
  double time_s = 0.0;
  std::vector<std::pair<int, double>> holder_mb;  // (dense drone, MB), only nonzero
};

struct SubRegionCatalog {
  std::vector<SubRegion> regions;  // sorted by rect
  std::vector<long long> omega;    // sorted distinct cardinalities
  std::map<long long, std::vector<int>> omega_map;
};

// Every tight rectangle with at least one photo, deduplicated. Border pairs
// are scanned over the coordinate grid and shrunk onto occupied strips, so
// the count comes out in O(grid^2) prefix-sum queries.
inline SubRegionCatalog enumerate_rects(const Instance& inst, const GeoSums& gs) {
  const int nc = gs.num_cols();
  const int nl = gs.num_rows();
  std::set<Rect> seen;
  for (int c0 = 0; c0 < nc; ++c0)
    for (int c1 = c0; c1 < nc; ++c1)
      for (int l0 = 0; l0 < nl; ++l0)
        for (int l1 = l0; l1 < nl; ++l1) {
          Rect r{c0, c1, l0, l1};
          if (gs.region_count(r) == 0) continue;
          while (gs.region_count(Rect{r.c_lt, r.c_lt, r.l_lo, r.l_hi}) == 0) ++r.c_lt;
          while (gs.region_count(Rect{r.c_gt, r.c_gt, r.l_lo, r.l_hi}) == 0) --r.c_gt;
          while (gs.region_count(Rect{r.c_lt, r.c_gt, r.l_lo, r.l_lo}) == 0) ++r.l_lo;
          while (gs.region_count(Rect{r.c_lt, r.c_gt, r.l_hi, r.l_hi}) == 0) --r.l_hi;
          seen.insert(r);
        }

  SubRegionCatalog cat;
  for (const Rect& r : seen) {
    SubRegion s;
    s.rect = r;
    s.cardinality = gs.region_count(r);
    s.time_s = gs.region_time(r);
    for (std::size_t h = 0; h < inst.drones.size(); ++h) {
      const double mb = gs.region_data(static_cast<int>(h), r);
      if (mb > 0.0) s.holder_mb.push_back({static_cast<int>(h), mb});
    }
    cat.regions.push_back(std::move(s));
  }
  return cat;
}

inline void build_cardinality_index(SubRegionCatalog& cat) {
  cat.omega.clear();
  cat.omega_map.clear();
  for (std::size_t i = 0; i < cat.regions.size(); ++i)
    cat.omega_map[cat.regions[i].cardinality].push_back(static_cast<int>(i));
  for (const auto& kv : cat.omega_map) cat.omega.push_back(kv.first);
}

// A solve over a slice of the catalog.
struct RestrictedProblem {
  const Instance& inst;
  const SubRegionCatalog& catalog;
  std::vector<int> candidates;  // indices into catalog.regions
  int sigma;
  double t_hat_s;

  RestrictedProblem(const Instance& in, const SubRegionCatalog& cat, std::vector<int> cand)
      : inst(in), catalog(cat), candidates(std::move(cand)), sigma(in.sigma),
        t_hat_s(in.t_hat_s) {}
};

enum class RestrictedStatus {
  Optimal,     // search completed; makespan inf means the warm bound already wins
  Budget,      // node budget exhausted, best-found returned, optimality unproven
  Infeasible,  // search completed without a warm bound and found no covering
};

struct RestrictedResult {
  RestrictedStatus status = RestrictedStatus::Infeasible;
  double makespan_s = std::numeric_limits<double>::infinity();
  Solution solution;
  long long nodes = 0;
};

struct RestrictedBudget {
  long long max_nodes = 2000000;
  // Incumbent makespan from an earlier solve; only strictly better coverings
  // are accepted and reported.
  double warm_makespan_s = std::numeric_limits<double>::infinity();
};

namespace detail {

// Exact branch-and-bound: cover photos by branching on the first uncovered
// one, forbid tried candidates so each covering appears once, pad with
// index-increasing picks to exactly m regions, then assign drones by
// depth-first search over replica sets.
struct RestrictedSearch {
  const Instance& inst;
  const SubRegionCatalog& cat;
  std::vector<int> cand;  // catalog indices, time-sorted
  int sigma;
  double t_hat;
  bool bounded;
  int m;
  long long max_nodes;

  DemandPlan plan;
  MmfMemo memo;

  std::vector<double> ctime;
  std::vector<std::vector<int>> photos_of;       // candidate pos -> photo indices
  std::vector<std::vector<int>> cands_of_photo;  // photo -> candidate positions, ascending

  std::vector<int> cover_cnt;
  int uncovered = 0;
  double unc_lambda = 0.0;
  double chosen_time = 0.0;
  std::vector<int> chosen;
  std::vector<char> forbidden;

  long long nodes = 0;
  bool budget_hit = false;

  double ub;
  bool found = false;
  std::vector<std::pair<int, std::uint64_t>> best;  // (candidate pos, drone mask)

  std::vector<std::uint64_t> subset_masks;  // allowed replica sets per region
  std::vector<double> dtime;
  std::vector<std::uint64_t> cur_masks;  // by chosen-list index
  std::vector<int> order;
  std::vector<double> loads;
  std::uint64_t all_used;

  RestrictedSearch(const RestrictedProblem& pr, const RestrictedBudget& bg)
      : inst(pr.inst), cat(pr.catalog), sigma(pr.sigma), t_hat(pr.t_hat_s),
        bounded(std::isfinite(pr.t_hat_s)), m(pr.inst.num_capable()),
        max_nodes(bg.max_nodes), plan(pr.inst), ub(bg.warm_makespan_s) {
    if (m > 64) throw std::runtime_error("restricted solver supports at most 64 capable drones");
    const bool bijective = sigma == 1 && !bounded;
    if (!bijective && m > 20)
      throw std::runtime_error("restricted solver refuses: too many capable drones");

    cand = pr.candidates;
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (int idx : cand)
      if (idx < 0 || idx >= static_cast<int>(cat.regions.size()))
        throw std::invalid_argument("candidate index outside catalog");
    std::sort(cand.begin(), cand.end(), [&](int a, int b) {
      if (cat.regions[a].time_s != cat.regions[b].time_s)
        return cat.regions[a].time_s < cat.regions[b].time_s;
      return cat.regions[a].rect < cat.regions[b].rect;
    });

    const int np = static_cast<int>(inst.photos.size());
    ctime.resize(cand.size());
    photos_of.resize(cand.size());
    cands_of_photo.resize(np);
    for (std::size_t k = 0; k < cand.size(); ++k) {
      const SubRegion& s = cat.regions[cand[k]];
      ctime[k] = s.time_s;
      for (int p = 0; p < np; ++p)
        if (s.rect.contains(inst.photos[p].col, inst.photos[p].row)) {
          photos_of[k].push_back(p);
          cands_of_photo[p].push_back(static_cast<int>(k));
        }
    }

    cover_cnt.assign(np, 0);
    uncovered = np;
    for (const Photo& p : inst.photos) unc_lambda += p.lambda_s;
    forbidden.assign(cand.size(), 0);

    if (!bijective) {
      const std::uint64_t top = std::uint64_t{1} << m;
      for (std::uint64_t mk = 1; mk < top; ++mk) {
        const int bits = std::popcount(mk);
        if (bounded ? bits >= sigma : bits == sigma) subset_masks.push_back(mk);
      }
    }
    all_used = (m == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
    dtime.assign(m, 0.0);
    cur_masks.assign(m, 0);
    loads.assign(plan.demands.size(), 0.0);
  }

  double partial_bound() const { return sigma * (chosen_time + unc_lambda) / m; }

  void choose(int k) {
    chosen.push_back(k);
    chosen_time += ctime[k];
    for (int p : photos_of[k])
      if (cover_cnt[p]++ == 0) {
        --uncovered;
        unc_lambda -= inst.photos[p].lambda_s;
      }
  }

  void unchoose(int k) {
    chosen.pop_back();
    chosen_time -= ctime[k];
    for (int p : photos_of[k])
      if (--cover_cnt[p] == 0) {
        ++uncovered;
        unc_lambda += inst.photos[p].lambda_s;
      }
  }

  bool tick() {
    if (budget_hit) return false;
    if (++nodes > max_nodes) {
      budget_hit = true;
      return false;
    }
    return true;
  }

  void cover_step() {
    if (!tick()) return;
    if (uncovered == 0) {
      if (static_cast<int>(chosen.size()) == m)
        complete_covering();
      else
        pad_step(0);
      return;
    }
    if (static_cast<int>(chosen.size()) == m) return;

    int p = 0;
    while (cover_cnt[p] > 0) ++p;
    std::vector<int> banned;
    for (int k : cands_of_photo[p]) {
      if (forbidden[k]) continue;
      if (ctime[k] >= ub) break;  // positions are time-sorted
      choose(k);
      if (partial_bound() < ub) cover_step();
      unchoose(k);
      forbidden[k] = 1;
      banned.push_back(k);
      if (budget_hit) break;
    }
    for (int k : banned) forbidden[k] = 0;
  }

  void pad_step(int start) {
    if (!tick()) return;
    if (static_cast<int>(chosen.size()) == m) {
      complete_covering();
      return;
    }
    for (int k = start; k < static_cast<int>(cand.size()); ++k) {
      if (forbidden[k]) continue;
      if (std::find(chosen.begin(), chosen.end(), k) != chosen.end()) continue;
      if (ctime[k] >= ub) break;
      choose(k);
      if (partial_bound() < ub) pad_step(k + 1);
      unchoose(k);
      if (budget_hit) return;
    }
  }

  void complete_covering() {
    if (sigma == 1 && !bounded) {
      // Each drone takes exactly one region, so only the largest one counts.
      double t = 0.0;
      for (int k : chosen) t = std::max(t, ctime[k]);
      if (t >= ub) return;
      ub = t;
      found = true;
      record_bijection();
      return;
    }
    std::fill(dtime.begin(), dtime.end(), 0.0);
    order.resize(chosen.size());
    for (std::size_t i = 0; i < chosen.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return ctime[chosen[a]] > ctime[chosen[b]]; });
    assign_step(0, 0.0, 0);
  }

  void record_bijection() {
    best.clear();
    std::vector<int> sorted = chosen;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      best.push_back({sorted[i], std::uint64_t{1} << i});
  }

  void assign_step(int depth, double cur_max, std::uint64_t used) {
    if (!tick()) return;
    if (cur_max >= ub) return;
    if (depth == m) {
      if (used != all_used) return;
      if (bounded && !deadline_ok()) return;
      ub = cur_max;
      found = true;
      best.clear();
      for (std::size_t i = 0; i < chosen.size(); ++i) best.push_back({chosen[i], cur_masks[i]});
      std::sort(best.begin(), best.end());
      return;
    }
    const int unused = m - std::popcount(used);
    const int cap = bounded ? m : sigma;
    if (unused > (m - depth) * cap) return;

    const int ci = order[depth];
    const double t = ctime[chosen[ci]];
    for (std::uint64_t mk : subset_masks) {
      double mx = cur_max;
      for (std::uint64_t b = mk; b; b &= b - 1) {
        const int d = std::countr_zero(b);
        dtime[d] += t;
        mx = std::max(mx, dtime[d]);
      }
      cur_masks[ci] = mk;
      if (mx < ub) assign_step(depth + 1, mx, used | mk);
      for (std::uint64_t b = mk; b; b &= b - 1) dtime[std::countr_zero(b)] -= t;
      if (budget_hit) return;
    }
    cur_masks[ci] = 0;
  }

  bool deadline_ok() {
    std::fill(loads.begin(), loads.end(), 0.0);
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      const SubRegion& s = cat.regions[cand[chosen[i]]];
      for (std::uint64_t b = cur_masks[i]; b; b &= b - 1) {
        const int d = inst.capable[std::countr_zero(b)];
        for (const auto& hm : s.holder_mb) {
          const int pos = plan.index[hm.first][d];
          if (pos >= 0) loads[pos] += hm.second;
        }
      }
    }
    return check_feasible(plan_delays(loads, inst.links, plan, memo), t_hat);
  }

  Solution build_solution() {
    Solution sol;
    sol.feasible = true;
    std::fill(loads.begin(), loads.end(), 0.0);
    for (const auto& pr : best) {
      const SubRegion& s = cat.regions[cand[pr.first]];
      Region reg;
      reg.rect = s.rect;
      for (std::uint64_t b = pr.second; b; b &= b - 1) {
        const int d = inst.capable[std::countr_zero(b)];
        reg.drone_ids.push_back(inst.drones[d].id);
        for (const auto& hm : s.holder_mb) {
          const int pos = plan.index[hm.first][d];
          if (pos >= 0) loads[pos] += hm.second;
        }
      }
      sol.regions.push_back(std::move(reg));
    }
    // report through the reference evaluation, not the incremental bound
    sol.makespan_s = makespan(inst, sol);
    std::vector<double> ds = plan_delays(loads, inst.links, plan, memo);
    for (std::size_t i = 0; i < loads.size(); ++i) {
      if (loads[i] <= 0.0) continue;
      sol.delays.push_back(DelayEntry{inst.drones[plan.demands[i].from].id,
                                      inst.drones[plan.demands[i].to].id, ds[i]});
    }
    return sol;
  }
};

}  // namespace detail

// Exact optimum over coverings drawn from the candidate slice: exactly m
// regions covering every photo, each region replicated on sigma drones (more
// allowed under a finite deadline), every capable drone employed, water-fill
// delays within the deadline.
inline RestrictedResult solve_restricted(const RestrictedProblem& pr,
                                         const RestrictedBudget& budget = {}) {
  const bool had_warm = std::isfinite(budget.warm_makespan_s);
  detail::RestrictedSearch search(pr, budget);
  search.cover_step();

  RestrictedResult res;
  res.nodes = search.nodes;
  res.solution.feasible = false;
  if (search.found) {
    res.solution = search.build_solution();
    res.makespan_s = res.solution.makespan_s;
  }
  if (search.budget_hit)
    res.status = RestrictedStatus::Budget;
  else if (search.found || had_warm)
    res.status = RestrictedStatus::Optimal;
  else
    res.status = RestrictedStatus::Infeasible;
  return res;
}

struct DecomposeConfig {
  long long max_nodes_per_iter = 2000000;
  // Algorithm stop on an unchanged objective between consecutive feasible
  // iterations; disable to keep widening until the whole catalog is in play.
  bool stop_on_repeat = true;
};

struct DecomposeIteration {
  int iteration = 0;
  long long n_lo = 0;
  long long n_hi = 0;
  int candidate_count = 0;
  double makespan_s = std::numeric_limits<double>::infinity();
  bool feasible = false;
  bool proven = true;  // false when the node budget cut the solve short
};

struct DecomposeResult {
  Solution solution;
  double makespan_s = std::numeric_limits<double>::infinity();
  bool feasible = false;
  bool proven_infeasible = false;
  std::vector<DecomposeIteration> trace;
};

// Interval-widening heuristic: start from sub-regions whose photo counts sit
// at the per-drone average, solve the restricted problem, and widen towards
// the full catalog until the objective stalls or everything is included.
inline DecomposeResult decompose_solve(const Instance& inst, const DecomposeConfig& cfg = {}) {
  const double inf = std::numeric_limits<double>::infinity();
  GeoSums gs(inst);
  SubRegionCatalog cat = enumerate_rects(inst, gs);
  build_cardinality_index(cat);
  const int total = static_cast<int>(cat.regions.size());
  const int m = inst.num_capable();
  const double nbar = static_cast<double>(inst.photos.size()) / m;

  // Snap the starting interval onto existing cardinalities.
  const long long fl = static_cast<long long>(std::floor(nbar));
  const long long ce = static_cast<long long>(std::ceil(nbar));
  int lo = -1, hi = -1;
  for (std::size_t i = 0; i < cat.omega.size(); ++i) {
    if (cat.omega[i] <= fl) lo = static_cast<int>(i);
    if (hi < 0 && cat.omega[i] >= ce) hi = static_cast<int>(i);
  }
  if (lo < 0) lo = 0;
  if (hi < 0) hi = static_cast<int>(cat.omega.size()) - 1;

  DecomposeResult res;
  res.solution.feasible = false;
  std::vector<int> candidates;
  std::vector<char> in_set(total, 0);
  double t_prev = inf;
  int iter = 0;

  for (;;) {
    ++iter;
    for (int side : {lo, hi})
      for (int idx : cat.omega_map[cat.omega[side]])
        if (!in_set[idx]) {
          in_set[idx] = 1;
          candidates.push_back(idx);
        }

    RestrictedProblem pr(inst, cat, candidates);
    RestrictedBudget bg;
    bg.max_nodes = cfg.max_nodes_per_iter;
    bg.warm_makespan_s = t_prev;
    RestrictedResult rr = solve_restricted(pr, bg);

    const double t_cur = std::min(t_prev, rr.makespan_s);
    if (rr.makespan_s < t_prev && !rr.solution.regions.empty()) {
      res.solution = rr.solution;
      res.makespan_s = rr.makespan_s;
      res.feasible = true;
    }

    DecomposeIteration row;
    row.iteration = iter;
    row.n_lo = cat.omega[lo];
    row.n_hi = cat.omega[hi];
    row.candidate_count = static_cast<int>(candidates.size());
    row.makespan_s = t_cur;
    row.feasible = std::isfinite(t_cur);
    row.proven = rr.status != RestrictedStatus::Budget;
    res.trace.push_back(row);

    const bool full = static_cast<int>(candidates.size()) == total;
    if (cfg.stop_on_repeat && std::isfinite(t_cur) && std::isfinite(t_prev) && t_cur == t_prev)
      break;
    if (full) {
      if (!res.feasible) res.proven_infeasible = rr.status == RestrictedStatus::Infeasible;
      break;
    }
    t_prev = t_cur;
    if (lo > 0) --lo;
    if (hi < static_cast<int>(cat.omega.size()) - 1) ++hi;
  }
  return res;
}

struct MilpFlags {
  bool require_drone_coverage = false;  // add "each capable drone takes a region"
};

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct LpRow {
  std::string name;
  std::vector<std::pair<double, std::string>> terms;
  char sense;  // '<', '>', '='
  double rhs;
};

inline void write_row(std::string& out, const LpRow& row) {
  out += " " + row.name + ":";
  bool first = true;
  for (const auto& t : row.terms) {
    if (t.first == 0.0) continue;
    if (first) {
      out += (t.first < 0 ? " - " : " ") + num(std::fabs(t.first)) + " " + t.second;
      first = false;
    } else {
      out += (t.first < 0 ? " - " : " + ") + num(std::fabs(t.first)) + " " + t.second;
    }
  }
  if (first) out += " 0 dummy";  // degenerate empty row, kept parseable
  out += std::string(" ") + (row.sense == '<' ? "<=" : row.sense == '>' ? ">=" : "=") + " " +
         num(row.rhs) + "\n";
}

}  // namespace detail

// Full mixed-integer model over the given candidate sub-regions, in LP text:
// region selection and replica assignment, photo coverage, the region-count
// cap, and the bottleneck-based fair-rate system that prices transfers
// against the deadline. An infinite deadline drops the latency rows; the
// rate system stays, it is harmless and keeps the export uniform.
inline std::string export_milp(const Instance& inst, const SubRegionCatalog& cat,
                               const std::vector<int>& candidates, const MilpFlags& flags = {}) {
  if (candidates.empty()) throw std::invalid_argument("export needs at least one candidate");
  using detail::LpRow;
  using detail::num;

  const bool bounded = std::isfinite(inst.t_hat_s);
  DemandPlan plan(inst);
  const int nd = static_cast<int>(plan.demands.size());

  auto qname = [&](int k, int d) {
    return "q_S" + std::to_string(k) + "_d" + std::to_string(inst.drones[d].id);
  };
  auto oname = [&](int k) { return "o_S" + std::to_string(k); };
  auto dsuffix = [&](int i) {
    return std::to_string(inst.drones[plan.demands[i].from].id) + "_" +
           std::to_string(inst.drones[plan.demands[i].to].id);
  };
  auto lsuffix = [&](int li) {
    return std::to_string(inst.drones[inst.links[li].u].id) + "_" +
           std::to_string(inst.drones[inst.links[li].v].id);
  };

  // Per-demand data coefficient for each candidate, and path bottleneck caps.
  std::vector<std::vector<double>> mu(nd, std::vector<double>(candidates.size(), 0.0));
  std::vector<double> cbar(nd, 0.0);
  std::vector<std::vector<int>> on_link(inst.links.size());
  for (int i = 0; i < nd; ++i) {
    const Demand& f = plan.demands[i];
    double mn = std::numeric_limits<double>::infinity();
    for (int li : f.links) {
      mn = std::min(mn, inst.links[li].capacity_mbps);
      on_link[li].push_back(i);
    }
    cbar[i] = mn;
  }
  for (std::size_t k = 0; k < candidates.size(); ++k)
    for (const auto& hm : cat.regions[candidates[k]].holder_mb)
      for (int d : inst.capable) {
        const int i = plan.index[hm.first][d];
        if (i >= 0) mu[i][k] = hm.second;
      }

  std::vector<LpRow> rows;
  for (int d : inst.capable) {
    LpRow r{"time_d" + std::to_string(inst.drones[d].id), {}, '<', 0.0};
    for (std::size_t k = 0; k < candidates.size(); ++k)
      r.terms.push_back({cat.regions[candidates[k]].time_s, qname(static_cast<int>(k), d)});
    r.terms.push_back({-1.0, "Tmax"});
    rows.push_back(std::move(r));
  }
  if (bounded)
    for (int i = 0; i < nd; ++i) {
      LpRow r{"lat_" + dsuffix(i), {}, '<', 0.0};
      for (std::size_t k = 0; k < candidates.size(); ++k)
        r.terms.push_back({mu[i][k], qname(static_cast<int>(k), plan.demands[i].to)});
      r.terms.push_back({-inst.t_hat_s, "phi_" + dsuffix(i)});
      rows.push_back(std::move(r));
    }
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    LpRow r{"rel_S" + std::to_string(k), {}, '>', 0.0};
    for (int d : inst.capable) r.terms.push_back({1.0, qname(static_cast<int>(k), d)});
    r.terms.push_back({-static_cast<double>(inst.sigma), oname(static_cast<int>(k))});
    rows.push_back(std::move(r));
  }
  for (std::size_t p = 0; p < inst.photos.size(); ++p) {
    LpRow r{"cover_p" + std::to_string(inst.photos[p].id), {}, '>', 1.0};
    for (std::size_t k = 0; k < candidates.size(); ++k)
      if (cat.regions[candidates[k]].rect.contains(inst.photos[p].col, inst.photos[p].row))
        r.terms.push_back({1.0, oname(static_cast<int>(k))});
    rows.push_back(std::move(r));
  }
  {
    LpRow r{"count", {}, '=', static_cast<double>(inst.num_capable())};
    for (std::size_t k = 0; k < candidates.size(); ++k)
      r.terms.push_back({1.0, oname(static_cast<int>(k))});
    rows.push_back(std::move(r));
  }
  for (int i = 0; i < nd; ++i) {
    LpRow r{"act_" + dsuffix(i), {}, '<', 0.0};
    r.terms.push_back({1.0, "z_" + dsuffix(i)});
    for (std::size_t k = 0; k < candidates.size(); ++k)
      r.terms.push_back({-mu[i][k], qname(static_cast<int>(k), plan.demands[i].to)});
    rows.push_back(std::move(r));
  }
  for (int i = 0; i < nd; ++i) {
    LpRow r{"rate_" + dsuffix(i), {}, '<', 0.0};
    r.terms.push_back({1.0, "phi_" + dsuffix(i)});
    r.terms.push_back({-cbar[i], "z_" + dsuffix(i)});
    rows.push_back(std::move(r));
  }
  for (int i = 0; i < nd; ++i) {
    LpRow r{"btl_" + dsuffix(i), {}, '>', 0.0};
    for (int li : plan.demands[i].links)
      r.terms.push_back({1.0, "w_" + dsuffix(i) + "_" + lsuffix(li)});
    r.terms.push_back({-1.0, "z_" + dsuffix(i)});
    rows.push_back(std::move(r));
  }
  for (std::size_t li = 0; li < inst.links.size(); ++li) {
    LpRow r{"cap_" + lsuffix(static_cast<int>(li)), {}, '<', inst.links[li].capacity_mbps};
    for (int i : on_link[li]) r.terms.push_back({1.0, "phi_" + dsuffix(i)});
    rows.push_back(std::move(r));
  }
  for (std::size_t li = 0; li < inst.links.size(); ++li)
    for (int i : on_link[li]) {
      LpRow r{"sat_" + lsuffix(static_cast<int>(li)) + "_" + dsuffix(i), {}, '>', 0.0};
      for (int j : on_link[li]) r.terms.push_back({1.0, "phi_" + dsuffix(j)});
      r.terms.push_back(
          {-inst.links[li].capacity_mbps, "w_" + dsuffix(i) + "_" + lsuffix(static_cast<int>(li))});
      rows.push_back(std::move(r));
    }
  for (std::size_t li = 0; li < inst.links.size(); ++li)
    for (int i : on_link[li]) {
      LpRow r{"umax_" + lsuffix(static_cast<int>(li)) + "_" + dsuffix(i), {}, '>', 0.0};
      r.terms.push_back({1.0, "u_" + lsuffix(static_cast<int>(li))});
      r.terms.push_back({-1.0, "phi_" + dsuffix(i)});
      rows.push_back(std::move(r));
    }
  for (std::size_t li = 0; li < inst.links.size(); ++li)
    for (int i : on_link[li]) {
      const double c = inst.links[li].capacity_mbps;
      LpRow r{"wsel_" + lsuffix(static_cast<int>(li)) + "_" + dsuffix(i), {}, '>', -c};
      r.terms.push_back({1.0, "phi_" + dsuffix(i)});
      r.terms.push_back({-1.0, "u_" + lsuffix(static_cast<int>(li))});
      r.terms.push_back({-c, "w_" + dsuffix(i) + "_" + lsuffix(static_cast<int>(li))});
      rows.push_back(std::move(r));
    }
  if (flags.require_drone_coverage)
    for (int d : inst.capable) {
      LpRow r{"used_d" + std::to_string(inst.drones[d].id), {}, '>', 1.0};
      for (std::size_t k = 0; k < candidates.size(); ++k)
        r.terms.push_back({1.0, qname(static_cast<int>(k), d)});
      rows.push_back(std::move(r));
    }

  std::string out = "\\ covering-assignment model\nMinimize\n obj: 1 Tmax\nSubject To\n";
  for (const LpRow& r : rows) detail::write_row(out, r);

  out += "Binaries\n";
  std::vector<std::string> bins;
  for (std::size_t k = 0; k < candidates.size(); ++k) bins.push_back(oname(static_cast<int>(k)));
  for (std::size_t k = 0; k < candidates.size(); ++k)
    for (int d : inst.capable) bins.push_back(qname(static_cast<int>(k), d));
  for (int i = 0; i < nd; ++i) bins.push_back("z_" + dsuffix(i));
  for (int i = 0; i < nd; ++i)
    for (int li : plan.demands[i].links)
      bins.push_back("w_" + dsuffix(i) + "_" + lsuffix(li));
  for (std::size_t i = 0; i < bins.size(); ++i)
    out += " " + bins[i] + ((i % 8 == 7 || i + 1 == bins.size()) ? "\n" : "");
  out += "End\n";
  return out;
}

// Debug listing of the catalog, one region per row.
inline std::string catalog_csv(const SubRegionCatalog& cat) {
  std::string out = "col_lo,col_hi,row_lo,row_hi,photos,time_s\n";
  char buf[96];
  for (const SubRegion& s : cat.regions) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%lld,%.12g\n", s.rect.c_lt, s.rect.c_gt,
                  s.rect.l_lo, s.rect.l_hi, s.cardinality, s.time_s);
    out += buf;
  }
  return out;
}

}  // namespace capsac
