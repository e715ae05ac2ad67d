#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <capsac/model.hpp>
#include <capsac/rng.hpp>

namespace capsac {

// Knobs for a synthetic instance: a full grid of photos, drones dropped on
// random cells, holders by proximity, and a random tree of radio links.
struct GenConfig {
  int photos = 200;
  int drones = 5;
  int capable_pct = 70;  // floor(drones * pct / 100) drones can reconstruct
  bool weighted = false;
  double lambda_s = 10.0;  // per-photo seconds; the mean when weighted
  double mu_mb = 5.0;
  int grid_rows = 0;  // 0 = derive from the photo count
  int grid_cols = 0;
  double capacity_mbps = 1.0;
  int sigma = 1;
  double t_hat_s = std::numeric_limits<double>::infinity();
  unsigned long long seed = 1;
};

inline int capable_count(int drones, int pct) { return drones * pct / 100; }

// Squarest grid that holds exactly `photos` cells: the largest divisor not
// above the square root becomes the row count.
inline std::pair<int, int> default_grid(int photos) {
  int rows = 1;
  for (int r = 1; static_cast<long long>(r) * r <= photos; ++r)
    if (photos % r == 0) rows = r;
  return {rows, photos / rows};
}

// u-P200D5%D̄70 and friends: processing mode, photo count, swarm size,
// and the percentage that is 3D-capable.
inline std::string gen_name(const GenConfig& cfg) {
  return std::string(cfg.weighted ? "w" : "u") + "-P" + std::to_string(cfg.photos) + "D" +
         std::to_string(cfg.drones) + "%D\xcc\x84" + std::to_string(cfg.capable_pct);
}

namespace detail {

inline std::pair<int, int> resolve_grid(const GenConfig& cfg) {
  int rows = cfg.grid_rows, cols = cfg.grid_cols;
  if (rows == 0 && cols == 0) return default_grid(cfg.photos);
  if (rows == 0 || cols == 0) {
    const int given = rows + cols;
    if (given <= 0 || cfg.photos % given != 0)
      throw std::invalid_argument("grid side does not divide the photo count");
    return rows == 0 ? std::pair{cfg.photos / cols, cols} : std::pair{rows, cfg.photos / rows};
  }
  if (static_cast<long long>(rows) * cols != cfg.photos)
    throw std::invalid_argument("grid does not hold the photo count");
  return {rows, cols};
}

}  // namespace detail

// Deterministic instance bytes for the given knobs. Draw order is fixed:
// drone cells, then photo times (weighted only), then tree parents.
inline std::string gen_instance(const GenConfig& cfg) {
  if (cfg.photos < 1) throw std::invalid_argument("need at least one photo");
  if (cfg.drones < 1) throw std::invalid_argument("need at least one drone");
  if (cfg.capable_pct < 0 || cfg.capable_pct > 100)
    throw std::invalid_argument("capable percentage outside [0, 100]");
  if (cfg.lambda_s <= 0.0 || cfg.mu_mb < 0.0 || cfg.capacity_mbps <= 0.0)
    throw std::invalid_argument("times, sizes, and capacities must be positive");
  const int m = capable_count(cfg.drones, cfg.capable_pct);
  if (m < 1) throw std::invalid_argument("no drone would be 3D-capable");
  if (cfg.sigma < 1 || cfg.sigma > m)
    throw std::invalid_argument("sigma must lie in [1, capable drones]");
  const auto [rows, cols] = detail::resolve_grid(cfg);

  Rng rng(cfg.seed);
  std::vector<std::pair<int, int>> at(cfg.drones);  // row, col
  for (auto& rc : at) {
    rc.first = rng.uniform_int(0, rows - 1);
    rc.second = rng.uniform_int(0, cols - 1);
  }

  nlohmann::ordered_json j;
  j["name"] = gen_name(cfg);
  j["photos"] = nlohmann::ordered_json::array();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double lam = cfg.lambda_s;
      if (cfg.weighted) lam = (0.5 + rng.uniform_real()) * cfg.lambda_s;
      int holder = 0;
      long long best = std::numeric_limits<long long>::max();
      for (int d = 0; d < cfg.drones; ++d) {
        const long long dr = r - at[d].first, dc = c - at[d].second;
        const long long dist = dr * dr + dc * dc;
        if (dist < best) {
          best = dist;
          holder = d;
        }
      }
      nlohmann::ordered_json pj;
      pj["id"] = r * cols + c + 1;
      pj["lat"] = static_cast<double>(r);
      pj["lng"] = static_cast<double>(c);
      pj["lambda_s"] = lam;
      pj["mu_mb"] = cfg.mu_mb;
      pj["holders"] = {holder + 1};
      j["photos"].push_back(std::move(pj));
    }

  j["drones"] = nlohmann::ordered_json::array();
  for (int d = 1; d <= cfg.drones; ++d)
    j["drones"].push_back({{"id", d}, {"capable", d <= m}});

  j["links"] = nlohmann::ordered_json::array();
  for (int d = 2; d <= cfg.drones; ++d)
    j["links"].push_back(
        {{"u", rng.uniform_int(1, d - 1)}, {"v", d}, {"capacity_mbps", cfg.capacity_mbps}});

  j["sigma"] = cfg.sigma;
  if (std::isfinite(cfg.t_hat_s))
    j["t_hat_s"] = cfg.t_hat_s;
  else
    j["t_hat_s"] = "inf";
  return j.dump(2) + "\n";
}

}  // namespace capsac
