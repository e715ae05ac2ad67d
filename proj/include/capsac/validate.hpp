#pragma once

#include <set>
#include <string>
#include <vector>

#include <capsac/mmf.hpp>
#include <capsac/model.hpp>

namespace capsac {

// Per-demand loads computed by direct photo scans, no precomputed tables.
inline std::vector<double> naive_demand_loads(const Instance& inst, const DemandPlan& plan,
                                              const std::vector<Region>& regions) {
  std::vector<double> loads(plan.demands.size(), 0.0);
  for (const auto& reg : regions) {
    for (int id : reg.drone_ids) {
      const int d = inst.drone_pos(id);
      for (const auto& p : inst.photos) {
        if (!reg.rect.contains(p.col, p.row)) continue;
        for (int h : p.holders)
          if (h != d) loads[plan.index[h][d]] += p.mu_mb;
      }
    }
  }
  return loads;
}

// Structural and deadline checks for a covering. Returns one line per
// violation; an empty list certifies the solution.
inline std::vector<std::string> validate_solution(const Instance& inst, const Solution& sol) {
  std::vector<std::string> out;
  const int nc = static_cast<int>(inst.lngs.size());
  const int nl = static_cast<int>(inst.lats.size());

  bool refs_ok = true;
  for (std::size_t i = 0; i < sol.regions.size(); ++i) {
    const Region& reg = sol.regions[i];
    const Rect& r = reg.rect;
    if (r.c_lt < 0 || r.c_gt >= nc || r.l_lo < 0 || r.l_hi >= nl || r.c_lt > r.c_gt ||
        r.l_lo > r.l_hi) {
      out.push_back("region " + std::to_string(i) + " has malformed borders");
      refs_ok = false;
      continue;
    }
    std::set<int> seen;
    for (int id : reg.drone_ids) {
      if (!inst.has_drone(id)) {
        out.push_back("region " + std::to_string(i) + " references unknown drone id " +
                      std::to_string(id));
        refs_ok = false;
        continue;
      }
      if (!inst.drones[inst.drone_pos(id)].capable) {
        out.push_back("region " + std::to_string(i) + " assigned to non-capable drone " +
                      std::to_string(id));
        refs_ok = false;
        continue;
      }
      if (!seen.insert(id).second)
        out.push_back("region " + std::to_string(i) + " assigns drone " + std::to_string(id) +
                      " twice");
    }
    if (static_cast<int>(seen.size()) < inst.sigma)
      out.push_back("region " + std::to_string(i) + " assigned to " +
                    std::to_string(seen.size()) + " < sigma=" + std::to_string(inst.sigma) +
                    " drones");
  }

  for (const auto& p : inst.photos) {
    bool covered = false;
    for (const auto& reg : sol.regions)
      if (reg.rect.contains(p.col, p.row)) {
        covered = true;
        break;
      }
    if (!covered) out.push_back("photo " + std::to_string(p.id) + " uncovered");
  }

  if (refs_ok) {
    std::vector<int> region_cnt(inst.drones.size(), 0);
    for (const auto& reg : sol.regions)
      for (int id : reg.drone_ids) ++region_cnt[inst.drone_pos(id)];
    for (int d : inst.capable)
      if (region_cnt[d] == 0)
        out.push_back("drone " + std::to_string(inst.drones[d].id) + " has no region");

    DemandPlan plan(inst);
    std::vector<double> loads = naive_demand_loads(inst, plan, sol.regions);
    std::vector<Demand> active;
    for (std::size_t i = 0; i < loads.size(); ++i) {
      if (loads[i] <= 0.0) continue;
      Demand dm = plan.demands[i];
      dm.load_mb = loads[i];
      active.push_back(std::move(dm));
    }
    if (!active.empty()) {
      RateAllocation alloc = water_fill(inst.links, active);
      std::vector<double> ds = delays(active, alloc);
      for (std::size_t i = 0; i < active.size(); ++i) {
        if (ds[i] > inst.t_hat_s)
          out.push_back("demand " + std::to_string(inst.drones[active[i].from].id) + "->" +
                        std::to_string(inst.drones[active[i].to].id) + " delay " +
                        std::to_string(ds[i]) + "s exceeds t_hat " +
                        std::to_string(inst.t_hat_s) + "s");
      }
    }
  }
  return out;
}

}  // namespace capsac
