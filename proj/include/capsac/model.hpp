#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace capsac {

enum class Axis { lng = 0, lat = 1 };

struct Photo {
  int id = 0;
  double lat = 0.0;
  double lng = 0.0;
  double lambda_s = 0.0;  // reconstruction processing time contribution
  double mu_mb = 0.0;     // data volume a holder must transfer
  std::vector<int> holders;  // dense drone indices, sorted
  int col = -1;  // index into Instance::lngs
  int row = -1;  // index into Instance::lats
};

struct Drone {
  int id = 0;
  bool capable = false;  // can run 3D reconstruction
};

struct Link {
  int u = 0;  // dense drone index
  int v = 0;
  double capacity_mbps = 0.0;  // MB/s
};

// Unique tree path between an ordered drone pair.
struct Path {
  std::vector<int> links;    // link indices, ordered from source to destination
  double min_cap = 0.0;      // smallest capacity along the path
};

// Axis-aligned sub-region, inclusive borders, as indices into the
// distinct-coordinate lists. A photo belongs to the region iff
// c_lt <= col <= c_gt and l_lo <= row <= l_hi.
struct Rect {
  int c_lt = 0;
  int c_gt = 0;
  int l_lo = 0;
  int l_hi = 0;

  bool operator==(const Rect& o) const {
    return c_lt == o.c_lt && c_gt == o.c_gt && l_lo == o.l_lo && l_hi == o.l_hi;
  }
  bool operator<(const Rect& o) const {
    if (c_lt != o.c_lt) return c_lt < o.c_lt;
    if (c_gt != o.c_gt) return c_gt < o.c_gt;
    if (l_lo != o.l_lo) return l_lo < o.l_lo;
    return l_hi < o.l_hi;
  }
  bool contains(int col, int row) const {
    return c_lt <= col && col <= c_gt && l_lo <= row && row <= l_hi;
  }
};

struct Instance {
  std::vector<Photo> photos;
  std::vector<Drone> drones;   // sorted by id; vector position is the dense index
  std::vector<Link> links;
  int sigma = 1;
  double t_hat_s = INFINITY;   // transfer deadline; INFINITY disables it

  std::vector<double> lngs;    // sorted distinct longitudes (column coordinates)
  std::vector<double> lats;    // sorted distinct latitudes (row coordinates)
  std::vector<int> capable;    // dense indices of reconstruction-capable drones
  std::vector<std::vector<Path>> paths;  // paths[h][d] for every ordered pair

  int num_capable() const { return static_cast<int>(capable.size()); }

  int drone_pos(int id) const {
    auto it = drone_pos_.find(id);
    if (it == drone_pos_.end())
      throw std::runtime_error("unknown drone id " + std::to_string(id));
    return it->second;
  }
  bool has_drone(int id) const { return drone_pos_.count(id) != 0; }

  Rect full_rect() const {
    return Rect{0, static_cast<int>(lngs.size()) - 1, 0, static_cast<int>(lats.size()) - 1};
  }

  std::unordered_map<int, int> drone_pos_;
};

struct Region {
  Rect rect;
  std::vector<int> drone_ids;  // external ids of assigned capable drones
};

struct DelayEntry {
  int from = 0;  // holder drone id
  int to = 0;    // destination drone id
  double seconds = 0.0;
};

struct Solution {
  double makespan_s = 0.0;
  std::vector<Region> regions;
  std::vector<DelayEntry> delays;
  bool feasible = true;
};

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw std::runtime_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double require_number(const nlohmann::json& j, const char* key) {
  const auto& v = require_field(j, key);
  if (!v.is_number()) throw std::runtime_error(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline int require_int(const nlohmann::json& j, const char* key) {
  const auto& v = require_field(j, key);
  if (!v.is_number_integer())
    throw std::runtime_error(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

inline std::vector<double> sorted_distinct(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace detail

// Builds coordinate indices, the capable list, and all-pairs tree paths.
// Throws on any structural defect of the document.
inline void finalize_instance(Instance& inst) {
  if (inst.photos.empty()) throw std::runtime_error("instance has no photos");

  std::sort(inst.drones.begin(), inst.drones.end(),
            [](const Drone& a, const Drone& b) { return a.id < b.id; });
  inst.drone_pos_.clear();
  for (int i = 0; i < static_cast<int>(inst.drones.size()); ++i) {
    if (!inst.drone_pos_.emplace(inst.drones[i].id, i).second)
      throw std::runtime_error("duplicate drone id " + std::to_string(inst.drones[i].id));
  }

  inst.capable.clear();
  for (int i = 0; i < static_cast<int>(inst.drones.size()); ++i)
    if (inst.drones[i].capable) inst.capable.push_back(i);

  if (inst.sigma < 1) throw std::runtime_error("sigma must be at least 1");
  if (inst.sigma > inst.num_capable()) throw std::runtime_error("sigma exceeds capable drones");
  if (!(inst.t_hat_s > 0.0)) throw std::runtime_error("t_hat_s must be positive");

  {
    std::vector<double> ln, la;
    ln.reserve(inst.photos.size());
    la.reserve(inst.photos.size());
    std::unordered_map<int, int> seen;
    for (const auto& p : inst.photos) {
      if (!seen.emplace(p.id, 1).second)
        throw std::runtime_error("duplicate photo id " + std::to_string(p.id));
      if (p.lambda_s < 0.0) throw std::runtime_error("negative lambda_s");
      if (p.mu_mb < 0.0) throw std::runtime_error("negative mu_mb");
      if (p.holders.empty())
        throw std::runtime_error("photo " + std::to_string(p.id) + " has no holder");
      ln.push_back(p.lng);
      la.push_back(p.lat);
    }
    inst.lngs = detail::sorted_distinct(std::move(ln));
    inst.lats = detail::sorted_distinct(std::move(la));
  }
  for (auto& p : inst.photos) {
    p.col = static_cast<int>(std::lower_bound(inst.lngs.begin(), inst.lngs.end(), p.lng) -
                             inst.lngs.begin());
    p.row = static_cast<int>(std::lower_bound(inst.lats.begin(), inst.lats.end(), p.lat) -
                             inst.lats.begin());
    std::sort(p.holders.begin(), p.holders.end());
    p.holders.erase(std::unique(p.holders.begin(), p.holders.end()), p.holders.end());
  }

  const int n = static_cast<int>(inst.drones.size());
  if (static_cast<int>(inst.links.size()) != n - 1)
    throw std::runtime_error("topology is not a tree");
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, link index)
  for (int li = 0; li < static_cast<int>(inst.links.size()); ++li) {
    const Link& l = inst.links[li];
    if (!(l.capacity_mbps > 0.0)) throw std::runtime_error("link capacity must be positive");
    adj[l.u].push_back({l.v, li});
    adj[l.v].push_back({l.u, li});
  }

  // BFS from each drone; a tree with n-1 edges is a tree iff connected.
  inst.paths.assign(n, std::vector<Path>(n));
  for (int s = 0; s < n; ++s) {
    std::vector<int> prev_link(n, -1), prev_node(n, -1);
    std::vector<char> vis(n, 0);
    std::deque<int> q{s};
    vis[s] = 1;
    int reached = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (auto [v, li] : adj[u]) {
        if (vis[v]) continue;
        vis[v] = 1;
        prev_link[v] = li;
        prev_node[v] = u;
        ++reached;
        q.push_back(v);
      }
    }
    if (reached != n) throw std::runtime_error("topology is not a tree");
    for (int t = 0; t < n; ++t) {
      if (t == s) continue;
      Path& p = inst.paths[s][t];
      for (int x = t; x != s; x = prev_node[x]) p.links.push_back(prev_link[x]);
      std::reverse(p.links.begin(), p.links.end());
      p.min_cap = INFINITY;
      for (int li : p.links) p.min_cap = std::min(p.min_cap, inst.links[li].capacity_mbps);
    }
  }
}

inline Instance parse_instance(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("invalid JSON: ") + e.what());
  }

  Instance inst;
  std::vector<int> holder_ids_per_photo;  // resolved after drones are known

  const auto& drones = detail::require_field(j, "drones");
  if (!drones.is_array() || drones.empty()) throw std::runtime_error("'drones' must be a non-empty array");
  for (const auto& dj : drones) {
    Drone d;
    d.id = detail::require_int(dj, "id");
    const auto& c = detail::require_field(dj, "capable");
    if (!c.is_boolean()) throw std::runtime_error("field 'capable' must be a boolean");
    d.capable = c.get<bool>();
    inst.drones.push_back(d);
  }
  std::unordered_map<int, int> pos_by_id;
  {
    std::vector<Drone> sorted = inst.drones;
    std::sort(sorted.begin(), sorted.end(), [](const Drone& a, const Drone& b) { return a.id < b.id; });
    for (int i = 0; i < static_cast<int>(sorted.size()); ++i) pos_by_id[sorted[i].id] = i;
  }

  const auto& photos = detail::require_field(j, "photos");
  if (!photos.is_array()) throw std::runtime_error("'photos' must be an array");
  for (const auto& pj : photos) {
    Photo p;
    p.id = detail::require_int(pj, "id");
    p.lat = detail::require_number(pj, "lat");
    p.lng = detail::require_number(pj, "lng");
    p.lambda_s = detail::require_number(pj, "lambda_s");
    p.mu_mb = detail::require_number(pj, "mu_mb");
    const auto& hs = detail::require_field(pj, "holders");
    if (!hs.is_array()) throw std::runtime_error("field 'holders' must be an array");
    for (const auto& h : hs) {
      if (!h.is_number_integer()) throw std::runtime_error("holder ids must be integers");
      auto it = pos_by_id.find(h.get<int>());
      if (it == pos_by_id.end())
        throw std::runtime_error("unknown drone id " + std::to_string(h.get<int>()));
      p.holders.push_back(it->second);
    }
    inst.photos.push_back(std::move(p));
  }

  const auto& links = detail::require_field(j, "links");
  if (!links.is_array()) throw std::runtime_error("'links' must be an array");
  for (const auto& lj : links) {
    Link l;
    int u = detail::require_int(lj, "u");
    int v = detail::require_int(lj, "v");
    auto iu = pos_by_id.find(u), iv = pos_by_id.find(v);
    if (iu == pos_by_id.end()) throw std::runtime_error("unknown drone id " + std::to_string(u));
    if (iv == pos_by_id.end()) throw std::runtime_error("unknown drone id " + std::to_string(v));
    l.u = iu->second;
    l.v = iv->second;
    l.capacity_mbps = detail::require_number(lj, "capacity_mbps");
    inst.links.push_back(l);
  }

  inst.sigma = detail::require_int(j, "sigma");
  const auto& th = detail::require_field(j, "t_hat_s");
  if (th.is_string()) {
    if (th.get<std::string>() != "inf")
      throw std::runtime_error("t_hat_s must be a number or \"inf\"");
    inst.t_hat_s = INFINITY;
  } else if (th.is_number()) {
    inst.t_hat_s = th.get<double>();
  } else {
    throw std::runtime_error("t_hat_s must be a number or \"inf\"");
  }

  finalize_instance(inst);
  return inst;
}

inline std::string serialize_instance(const Instance& inst) {
  nlohmann::ordered_json j;
  j["photos"] = nlohmann::ordered_json::array();
  for (const auto& p : inst.photos) {
    nlohmann::ordered_json pj;
    pj["id"] = p.id;
    pj["lat"] = p.lat;
    pj["lng"] = p.lng;
    pj["lambda_s"] = p.lambda_s;
    pj["mu_mb"] = p.mu_mb;
    std::vector<int> ids;
    for (int h : p.holders) ids.push_back(inst.drones[h].id);
    pj["holders"] = ids;
    j["photos"].push_back(std::move(pj));
  }
  j["drones"] = nlohmann::ordered_json::array();
  for (const auto& d : inst.drones)
    j["drones"].push_back({{"id", d.id}, {"capable", d.capable}});
  j["links"] = nlohmann::ordered_json::array();
  for (const auto& l : inst.links)
    j["links"].push_back({{"u", inst.drones[l.u].id},
                          {"v", inst.drones[l.v].id},
                          {"capacity_mbps", l.capacity_mbps}});
  j["sigma"] = inst.sigma;
  if (std::isinf(inst.t_hat_s))
    j["t_hat_s"] = "inf";
  else
    j["t_hat_s"] = inst.t_hat_s;
  return j.dump(2) + "\n";
}

// Direct-summation region aggregates. These are the slow reference route;
// the prefix-sum structure must agree with them everywhere.
inline double naive_region_time(const Instance& inst, const Rect& r) {
  double t = 0.0;
  for (const auto& p : inst.photos)
    if (r.contains(p.col, p.row)) t += p.lambda_s;
  return t;
}

inline int naive_region_count(const Instance& inst, const Rect& r) {
  int n = 0;
  for (const auto& p : inst.photos)
    if (r.contains(p.col, p.row)) ++n;
  return n;
}

inline double naive_region_data(const Instance& inst, int holder, const Rect& r) {
  if (holder < 0 || holder >= static_cast<int>(inst.drones.size()))
    throw std::runtime_error("unknown drone index " + std::to_string(holder));
  double mb = 0.0;
  for (const auto& p : inst.photos)
    if (r.contains(p.col, p.row) &&
        std::binary_search(p.holders.begin(), p.holders.end(), holder))
      mb += p.mu_mb;
  return mb;
}

// sigma * (total processing time) / m. No solution can finish faster even
// with a perfectly balanced covering.
inline double lower_bound(const Instance& inst) {
  double total = 0.0;
  for (const auto& p : inst.photos) total += p.lambda_s;
  return inst.sigma * total / inst.num_capable();
}

// Longest per-drone processing time of a covering. Overlapping regions
// contribute to every region they appear in: reconstructions are independent.
inline double makespan(const Instance& inst, const Solution& sol) {
  std::vector<double> load(inst.drones.size(), 0.0);
  for (const auto& reg : sol.regions) {
    const double t = naive_region_time(inst, reg.rect);
    for (int id : reg.drone_ids) {
      int d = inst.drone_pos(id);
      if (!inst.drones[d].capable)
        throw std::runtime_error("assignment references non-capable drone " + std::to_string(id));
      load[d] += t;
    }
  }
  double mx = 0.0;
  for (int d : inst.capable) mx = std::max(mx, load[d]);
  return mx;
}

inline Solution parse_solution(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("invalid JSON: ") + e.what());
  }
  Solution s;
  s.makespan_s = detail::require_number(j, "makespan_s");
  for (const auto& rj : detail::require_field(j, "regions")) {
    Region r;
    r.rect.c_lt = detail::require_int(rj, "c_lt");
    r.rect.c_gt = detail::require_int(rj, "c_gt");
    r.rect.l_lo = detail::require_int(rj, "l_lo");
    r.rect.l_hi = detail::require_int(rj, "l_hi");
    for (const auto& d : detail::require_field(rj, "drones")) r.drone_ids.push_back(d.get<int>());
    s.regions.push_back(std::move(r));
  }
  for (const auto& dj : detail::require_field(j, "delays")) {
    DelayEntry e;
    e.from = detail::require_int(dj, "from");
    e.to = detail::require_int(dj, "to");
    e.seconds = detail::require_number(dj, "seconds");
    s.delays.push_back(e);
  }
  const auto& f = detail::require_field(j, "feasible");
  if (!f.is_boolean()) throw std::runtime_error("field 'feasible' must be a boolean");
  s.feasible = f.get<bool>();
  return s;
}

inline std::string serialize_solution(const Solution& sol) {
  nlohmann::ordered_json j;
  j["makespan_s"] = sol.makespan_s;
  j["regions"] = nlohmann::ordered_json::array();
  for (const auto& r : sol.regions) {
    nlohmann::ordered_json rj;
    rj["c_lt"] = r.rect.c_lt;
    rj["c_gt"] = r.rect.c_gt;
    rj["l_lo"] = r.rect.l_lo;
    rj["l_hi"] = r.rect.l_hi;
    rj["drones"] = r.drone_ids;
    j["regions"].push_back(std::move(rj));
  }
  j["delays"] = nlohmann::ordered_json::array();
  for (const auto& d : sol.delays)
    j["delays"].push_back({{"from", d.from}, {"to", d.to}, {"seconds", d.seconds}});
  j["feasible"] = sol.feasible;
  return j.dump(2) + "\n";
}

}  // namespace capsac
