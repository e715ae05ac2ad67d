#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <capsac/mmf.hpp>
#include <capsac/model.hpp>

namespace capsac {

struct CatalogEntry {
  Rect rect;                   // tightened borders
  std::vector<int> photo_idx;  // dense photo indices, ascending
};

// Every distinct photo group that a pair of column borders and a pair of row
// borders can cut out, one entry per group. Built by direct scans.
inline std::vector<CatalogEntry> naive_catalog(const Instance& inst) {
  const int nc = static_cast<int>(inst.lngs.size());
  const int nl = static_cast<int>(inst.lats.size());
  const int np = static_cast<int>(inst.photos.size());
  std::map<std::vector<int>, Rect> groups;
  for (int c0 = 0; c0 < nc; ++c0)
    for (int c1 = c0; c1 < nc; ++c1)
      for (int l0 = 0; l0 < nl; ++l0)
        for (int l1 = l0; l1 < nl; ++l1) {
          const Rect r{c0, c1, l0, l1};
          std::vector<int> ph;
          Rect tight{nc, -1, nl, -1};
          for (int i = 0; i < np; ++i) {
            const Photo& p = inst.photos[i];
            if (!r.contains(p.col, p.row)) continue;
            ph.push_back(i);
            tight.c_lt = std::min(tight.c_lt, p.col);
            tight.c_gt = std::max(tight.c_gt, p.col);
            tight.l_lo = std::min(tight.l_lo, p.row);
            tight.l_hi = std::max(tight.l_hi, p.row);
          }
          if (ph.empty()) continue;
          groups.emplace(std::move(ph), tight);
        }
  std::vector<CatalogEntry> out;
  out.reserve(groups.size());
  for (auto& [ph, r] : groups) out.push_back(CatalogEntry{r, ph});
  std::sort(out.begin(), out.end(),
            [](const CatalogEntry& a, const CatalogEntry& b) { return a.rect < b.rect; });
  return out;
}

struct OracleOptions {
  double max_coverings = 1e6;    // distinct m-subsets of the catalog
  double max_assignments = 1e6;  // drone subset combinations per covering
};

struct OracleResult {
  bool feasible = false;
  double makespan_s = std::numeric_limits<double>::infinity();
  Solution solution;
  long long optimal_coverings = 0;  // coverings whose best assignment hits the optimum
};

namespace detail {

// Assignment search for one fixed covering: give every selected group a
// subset of capable drones, at least sigma strong, using every drone at
// least once. Per-drone times grow monotonically down the branch, so a
// partial maximum at or above the incumbent prunes.
struct OracleAssign {
  const Instance& inst;
  const std::vector<double>& rtime;
  const std::vector<std::vector<double>>& rdata;
  const std::vector<std::uint32_t>& choices;
  const DemandPlan& plan;
  MmfMemo& memo;
  int m;
  bool bounded;
  std::uint32_t all_used;

  const std::vector<int>* comb = nullptr;
  std::vector<std::uint32_t> masks;
  std::vector<double> dtime;
  std::vector<double> loads;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> best_masks;

  OracleAssign(const Instance& in, const std::vector<double>& rt,
               const std::vector<std::vector<double>>& rd,
               const std::vector<std::uint32_t>& ch, const DemandPlan& pl, MmfMemo& me, int mm,
               bool bd)
      : inst(in), rtime(rt), rdata(rd), choices(ch), plan(pl), memo(me), m(mm), bounded(bd),
        all_used((1u << in.num_capable()) - 1), masks(mm, 0), dtime(in.drones.size(), 0.0),
        loads(pl.demands.size(), 0.0), best_masks(mm, 0) {}

  void solve(const std::vector<int>& c) {
    comb = &c;
    best = std::numeric_limits<double>::infinity();
    run(0, 0.0, 0);
  }

  bool deadline_ok(const std::vector<std::uint32_t>& mk) {
    std::fill(loads.begin(), loads.end(), 0.0);
    const int nd = static_cast<int>(inst.drones.size());
    for (int ri = 0; ri < m; ++ri) {
      const std::vector<double>& data = rdata[(*comb)[ri]];
      for (std::uint32_t b = mk[ri]; b; b &= b - 1) {
        const int d = inst.capable[std::countr_zero(b)];
        for (int h = 0; h < nd; ++h)
          if (h != d && data[h] > 0.0) loads[plan.index[h][d]] += data[h];
      }
    }
    return check_feasible(plan_delays(loads, inst.links, plan, memo), inst.t_hat_s);
  }

  void run(int ri, double cur_max, std::uint32_t used) {
    if (cur_max >= best) return;
    if (ri == m) {
      if (used != all_used) return;
      if (bounded && !deadline_ok(masks)) return;
      best = cur_max;
      best_masks = masks;
      return;
    }
    const double t = rtime[(*comb)[ri]];
    for (std::uint32_t mk : choices) {
      masks[ri] = mk;
      double saved[32];
      int nbits = 0;
      double new_max = cur_max;
      for (std::uint32_t b = mk; b; b &= b - 1) {
        const int d = inst.capable[std::countr_zero(b)];
        saved[nbits++] = dtime[d];
        dtime[d] += t;
        new_max = std::max(new_max, dtime[d]);
      }
      run(ri + 1, new_max, used | mk);
      nbits = 0;
      for (std::uint32_t b = mk; b; b &= b - 1)
        dtime[inst.capable[std::countr_zero(b)]] = saved[nbits++];
    }
  }
};

}  // namespace detail

// Exhaustive reference solver. Tries every selection of num_capable() catalog
// groups that covers all photos and every admissible drone assignment, with
// direct sums throughout. Guarded against instances too large to enumerate.
inline OracleResult oracle_solve(const Instance& inst, const OracleOptions& opt = {}) {
  const int m = inst.num_capable();
  const int np = static_cast<int>(inst.photos.size());
  if (np > 62) throw std::runtime_error("oracle refuses: too many photos");
  if (m > 20) throw std::runtime_error("oracle refuses: assignment enumeration too large");

  const std::vector<CatalogEntry> catalog = naive_catalog(inst);
  const int R = static_cast<int>(catalog.size());

  OracleResult res;
  res.solution.feasible = false;
  if (R < m) return res;

  double n_comb = 1.0;
  for (int i = 0; i < m; ++i) n_comb = n_comb * (R - i) / (i + 1);
  if (n_comb > opt.max_coverings)
    throw std::runtime_error("oracle refuses: covering enumeration too large");

  std::vector<std::uint32_t> choices;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask)
    if (std::popcount(mask) >= inst.sigma) choices.push_back(mask);
  if (std::pow(static_cast<double>(choices.size()), m) > opt.max_assignments)
    throw std::runtime_error("oracle refuses: assignment enumeration too large");

  const int nd = static_cast<int>(inst.drones.size());
  std::vector<double> rtime(R);
  std::vector<std::uint64_t> rmask(R, 0);
  std::vector<std::vector<double>> rdata(R, std::vector<double>(nd, 0.0));
  for (int i = 0; i < R; ++i) {
    rtime[i] = naive_region_time(inst, catalog[i].rect);
    for (int pi : catalog[i].photo_idx) rmask[i] |= 1ull << pi;
    for (int h = 0; h < nd; ++h) rdata[i][h] = naive_region_data(inst, h, catalog[i].rect);
  }
  const std::uint64_t full = (1ull << np) - 1;

  DemandPlan plan(inst);
  MmfMemo memo;
  detail::OracleAssign assign(inst, rtime, rdata, choices, plan, memo, m,
                              std::isfinite(inst.t_hat_s));

  std::vector<int> comb(m);
  for (int i = 0; i < m; ++i) comb[i] = i;
  std::vector<int> best_comb;
  std::vector<std::uint32_t> best_masks;

  while (true) {
    std::uint64_t cov = 0;
    for (int i : comb) cov |= rmask[i];
    if (cov == full) {
      assign.solve(comb);
      if (std::isfinite(assign.best)) {
        if (assign.best < res.makespan_s) {
          res.makespan_s = assign.best;
          best_comb = comb;
          best_masks = assign.best_masks;
          res.optimal_coverings = 1;
        } else if (assign.best == res.makespan_s) {
          ++res.optimal_coverings;
        }
      }
    }
    int i = m - 1;
    while (i >= 0 && comb[i] == R - m + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < m; ++j) comb[j] = comb[j - 1] + 1;
  }

  if (!std::isfinite(res.makespan_s)) return res;

  res.feasible = true;
  res.solution.feasible = true;
  std::vector<double> loads(plan.demands.size(), 0.0);
  for (int ri = 0; ri < m; ++ri) {
    Region reg;
    reg.rect = catalog[best_comb[ri]].rect;
    for (std::uint32_t b = best_masks[ri]; b; b &= b - 1) {
      const int d = inst.capable[std::countr_zero(b)];
      reg.drone_ids.push_back(inst.drones[d].id);
      for (int h = 0; h < nd; ++h)
        if (h != d && rdata[best_comb[ri]][h] > 0.0)
          loads[plan.index[h][d]] += rdata[best_comb[ri]][h];
    }
    res.solution.regions.push_back(std::move(reg));
  }
  // report through the reference evaluation so a recheck of the emitted
  // regions reproduces the number bit for bit
  res.makespan_s = makespan(inst, res.solution);
  res.solution.makespan_s = res.makespan_s;
  std::vector<double> ds = plan_delays(loads, inst.links, plan, memo);
  for (std::size_t i = 0; i < loads.size(); ++i) {
    if (loads[i] <= 0.0) continue;
    res.solution.delays.push_back(DelayEntry{inst.drones[plan.demands[i].from].id,
                                             inst.drones[plan.demands[i].to].id, ds[i]});
  }
  return res;
}

}  // namespace capsac
