#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <capsac/geosum.hpp>
#include <capsac/model.hpp>

namespace capsac {

// One transfer flow: every photo of a region assigned to drone `to` that is
// held by drone `from` travels along the fixed tree path between them.
struct Demand {
  int from = 0;  // holder, dense drone index
  int to = 0;    // destination, dense drone index
  std::vector<int> links;  // path link indices, source to destination
  double load_mb = 0.0;
};

struct RateAllocation {
  std::vector<double> rate_mbps;   // per demand
  std::vector<int> bottleneck;     // per demand: witness link index, -1 if none found
  std::vector<double> link_usage;  // per link: sum of crossing rates
};

inline constexpr double kSaturationTol = 1e-9;

// Progressive filling: all unfrozen demands grow at the same rate until some
// link runs out, which freezes every unfrozen demand crossing it at the fair
// share. Ties freeze all minimal links in the same step; the final rates do
// not depend on how ties are broken.
inline RateAllocation water_fill(const std::vector<Link>& links,
                                 const std::vector<Demand>& demands) {
  const int nl = static_cast<int>(links.size());
  const int nd = static_cast<int>(demands.size());
  for (const auto& d : demands)
    if (d.links.empty()) throw std::runtime_error("demand with empty path");
  for (const auto& l : links)
    if (!(l.capacity_mbps > 0.0)) throw std::runtime_error("link capacity must be positive");

  std::vector<std::vector<int>> on_link(nl);
  for (int i = 0; i < nd; ++i)
    for (int li : demands[i].links) on_link[li].push_back(i);

  RateAllocation alloc;
  alloc.rate_mbps.assign(nd, 0.0);
  alloc.bottleneck.assign(nd, -1);
  alloc.link_usage.assign(nl, 0.0);

  std::vector<char> frozen(nd, 0);
  std::vector<double> frozen_usage(nl, 0.0);
  std::vector<int> unfrozen_cnt(nl, 0);
  for (int li = 0; li < nl; ++li) unfrozen_cnt[li] = static_cast<int>(on_link[li].size());

  int remaining = nd;
  while (remaining > 0) {
    double best = -1.0;
    for (int li = 0; li < nl; ++li) {
      if (unfrozen_cnt[li] == 0) continue;
      double share = (links[li].capacity_mbps - frozen_usage[li]) / unfrozen_cnt[li];
      if (best < 0.0 || share < best) best = share;
    }
    if (best < 0.0) break;  // demands left but none crosses a link: impossible here
    for (int li = 0; li < nl; ++li) {
      if (unfrozen_cnt[li] == 0) continue;
      double share = (links[li].capacity_mbps - frozen_usage[li]) / unfrozen_cnt[li];
      if (share != best) continue;
      for (int di : on_link[li]) {
        if (frozen[di]) continue;
        frozen[di] = 1;
        alloc.rate_mbps[di] = best;
        --remaining;
        for (int lj : demands[di].links) {
          frozen_usage[lj] += best;
          --unfrozen_cnt[lj];
        }
      }
    }
  }

  for (int i = 0; i < nd; ++i)
    for (int li : demands[i].links) alloc.link_usage[li] += alloc.rate_mbps[i];

  // Witness: first link along the path that is saturated and on which this
  // demand's rate is maximal.
  std::vector<double> max_rate(nl, 0.0);
  for (int li = 0; li < nl; ++li)
    for (int di : on_link[li]) max_rate[li] = std::max(max_rate[li], alloc.rate_mbps[di]);
  for (int i = 0; i < nd; ++i) {
    for (int li : demands[i].links) {
      if (links[li].capacity_mbps - alloc.link_usage[li] <= kSaturationTol &&
          alloc.rate_mbps[i] >= max_rate[li] - kSaturationTol) {
        alloc.bottleneck[i] = li;
        break;
      }
    }
  }
  return alloc;
}

// Transfer completion times. Demands with no load finish instantly.
inline std::vector<double> delays(const std::vector<Demand>& demands,
                                  const RateAllocation& alloc) {
  std::vector<double> out(demands.size(), 0.0);
  for (std::size_t i = 0; i < demands.size(); ++i) {
    if (demands[i].load_mb <= 0.0) continue;
    if (!(alloc.rate_mbps[i] > 0.0))
      throw std::logic_error("active demand received zero rate");
    out[i] = demands[i].load_mb / alloc.rate_mbps[i];
  }
  return out;
}

inline bool check_feasible(const std::vector<double>& delay_s, double t_hat_s) {
  for (double t : delay_s)
    if (t > t_hat_s) return false;
  return true;
}

// Largest deadline overrun across demands; 0 when the deadline holds.
inline double delay_violation(const std::vector<double>& delay_s, double t_hat_s) {
  double v = 0.0;
  for (double t : delay_s) v = std::max(v, t - t_hat_s);
  return std::max(v, 0.0);
}

// Certificate checks: capacities respected, and every demand sees a saturated
// link on which no other demand outranks it. Violations come back as data.
inline std::vector<std::string> verify_mmf(const std::vector<Link>& links,
                                           const std::vector<Demand>& demands,
                                           const RateAllocation& alloc) {
  std::vector<std::string> out;
  const int nl = static_cast<int>(links.size());
  std::vector<double> usage(nl, 0.0);
  std::vector<double> max_rate(nl, 0.0);
  for (std::size_t i = 0; i < demands.size(); ++i)
    for (int li : demands[i].links) {
      usage[li] += alloc.rate_mbps[i];
      max_rate[li] = std::max(max_rate[li], alloc.rate_mbps[i]);
    }
  for (int li = 0; li < nl; ++li)
    if (usage[li] > links[li].capacity_mbps + kSaturationTol)
      out.push_back("link " + std::to_string(li) + " oversubscribed: " +
                    std::to_string(usage[li]) + " exceeds " +
                    std::to_string(links[li].capacity_mbps));
  for (std::size_t i = 0; i < demands.size(); ++i) {
    const std::string name =
        "demand " + std::to_string(demands[i].from) + "->" + std::to_string(demands[i].to);
    if (!(alloc.rate_mbps[i] > 0.0)) {
      out.push_back(name + " has nonpositive rate");
      continue;
    }
    bool found = false;
    for (int li : demands[i].links) {
      if (links[li].capacity_mbps - usage[li] <= kSaturationTol &&
          alloc.rate_mbps[i] >= max_rate[li] - kSaturationTol) {
        found = true;
        break;
      }
    }
    if (!found) out.push_back(name + " has no bottleneck link");
  }
  return out;
}

// Every potential flow of an instance: ordered pairs (holder, destination)
// over all drones x capable drones. A drone never transfers to itself.
struct DemandPlan {
  std::vector<Demand> demands;  // ordered by (from, to), loads left at zero
  std::vector<std::vector<int>> index;  // index[from][to] -> demand position, -1 if none

  explicit DemandPlan(const Instance& inst) {
    const int n = static_cast<int>(inst.drones.size());
    index.assign(n, std::vector<int>(n, -1));
    for (int h = 0; h < n; ++h) {
      for (int d : inst.capable) {
        if (h == d) continue;
        Demand dm;
        dm.from = h;
        dm.to = d;
        dm.links = inst.paths[h][d].links;
        index[h][d] = static_cast<int>(demands.size());
        demands.push_back(std::move(dm));
      }
    }
  }
};

// Per-demand loads of a covering: data every holder must move for each
// region its destination reconstructs. Overlapping regions count separately.
inline std::vector<double> demand_loads(const Instance& inst, const DemandPlan& plan,
                                        const GeoSums& gs, const std::vector<Rect>& rects,
                                        const std::vector<std::vector<int>>& assigned) {
  std::vector<double> loads(plan.demands.size(), 0.0);
  const int n = static_cast<int>(inst.drones.size());
  for (std::size_t r = 0; r < rects.size(); ++r) {
    for (int d : assigned[r]) {
      for (int h = 0; h < n; ++h) {
        if (h == d) continue;
        double mb = gs.region_data(h, rects[r]);
        if (mb > 0.0) loads[plan.index[h][d]] += mb;
      }
    }
  }
  return loads;
}

// Caches rate allocations by active-demand set. Rates depend only on which
// demands are active, never on their loads, so hits are exact.
class MmfMemo {
 public:
  // `active` must be sorted demand indices into the plan.
  const RateAllocation& rates_for(const std::vector<int>& active,
                                  const std::vector<Link>& links, const DemandPlan& plan) {
    auto it = cache_.find(active);
    if (it != cache_.end()) {
      ++hits_;
      return it->second;
    }
    std::vector<Demand> sub;
    sub.reserve(active.size());
    for (int i : active) sub.push_back(plan.demands[i]);
    auto [pos, ok] = cache_.emplace(active, water_fill(links, sub));
    (void)ok;
    ++misses_;
    return pos->second;
  }

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::map<std::vector<int>, RateAllocation> cache_;
  std::size_t hits_ = 0, misses_ = 0;
};

// Water-fills the active subset of a full load vector and reports the delay
// of every demand in plan order (zero where inactive).
inline std::vector<double> plan_delays(const std::vector<double>& loads,
                                       const std::vector<Link>& links, const DemandPlan& plan,
                                       MmfMemo& memo) {
  std::vector<int> active;
  for (int i = 0; i < static_cast<int>(loads.size()); ++i)
    if (loads[i] > 0.0) active.push_back(i);
  std::vector<double> out(loads.size(), 0.0);
  if (active.empty()) return out;
  const RateAllocation& alloc = memo.rates_for(active, links, plan);
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (!(alloc.rate_mbps[k] > 0.0)) throw std::logic_error("active demand received zero rate");
    out[active[k]] = loads[active[k]] / alloc.rate_mbps[k];
  }
  return out;
}

}  // namespace capsac
