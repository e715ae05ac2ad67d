#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include <capsac/enumdecomp.hpp>
#include <capsac/model.hpp>
#include <capsac/oracle.hpp>
#include <capsac/vns.hpp>

namespace capsac {

// One row of the results table: what ran, on what, and how well it did.
struct RunRecord {
  std::string instance;
  std::string method;
  int sigma = 1;
  double t_hat_s = std::numeric_limits<double>::infinity();
  unsigned long long seed = 0;
  int runs = 0;
  double best_makespan_s = std::numeric_limits<double>::infinity();
  double avg_makespan_s = std::numeric_limits<double>::infinity();
  double avg_time_to_best_s = 0.0;
  bool feasible = false;
  double reference_s = std::numeric_limits<double>::quiet_NaN();
  double deviation_pct = std::numeric_limits<double>::quiet_NaN();
};

struct BenchTask {
  Instance inst;
  std::string name;
  std::string method;  // vns | decomp | oracle
  int sigma = 1;
  double t_hat_s = std::numeric_limits<double>::infinity();
  int runs = 1;
  double time_limit_s = 5.0;
  unsigned long long seed = 1;
  double reference_s = std::numeric_limits<double>::quiet_NaN();
};

// Same instance with the replication factor and deadline replaced.
inline Instance override_fields(Instance inst, int sigma, double t_hat_s) {
  if (sigma < 1 || sigma > inst.num_capable())
    throw std::invalid_argument("sigma must lie in [1, capable drones]");
  inst.sigma = sigma;
  inst.t_hat_s = t_hat_s;
  return inst;
}

inline RunRecord run_task(const BenchTask& task) {
  RunRecord rec;
  rec.instance = task.name;
  rec.method = task.method;
  rec.sigma = task.sigma;
  rec.t_hat_s = task.t_hat_s;
  rec.seed = task.seed;
  rec.reference_s = task.reference_s;

  const Instance inst = override_fields(task.inst, task.sigma, task.t_hat_s);
  const auto t0 = std::chrono::steady_clock::now();
  auto since = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  if (task.method == "vns") {
    rec.runs = task.runs;
    double sum_mk = 0.0, sum_tt = 0.0;
    int ok = 0;
    for (int r = 0; r < task.runs; ++r) {
      VnsConfig cfg;
      cfg.time_limit_s = task.time_limit_s;
      cfg.seed = task.seed + static_cast<unsigned long long>(r);
      const VnsResult vr = vns_solve(inst, cfg);
      if (!vr.eval.feasible()) continue;
      ++ok;
      sum_mk += vr.eval.makespan_s;
      sum_tt += vr.best_found_s;
      if (vr.eval.makespan_s < rec.best_makespan_s) rec.best_makespan_s = vr.eval.makespan_s;
    }
    rec.feasible = ok > 0;
    if (ok > 0) {
      rec.avg_makespan_s = sum_mk / ok;
      rec.avg_time_to_best_s = sum_tt / ok;
    }
  } else if (task.method == "decomp") {
    rec.runs = 1;
    const DecomposeResult dr = decompose_solve(inst);
    rec.feasible = dr.feasible;
    if (dr.feasible) {
      rec.best_makespan_s = dr.makespan_s;
      rec.avg_makespan_s = dr.makespan_s;
    }
    rec.avg_time_to_best_s = since();
  } else if (task.method == "oracle") {
    rec.runs = 1;
    const OracleResult br = oracle_solve(inst);
    rec.feasible = br.feasible;
    if (br.feasible) {
      rec.best_makespan_s = br.makespan_s;
      rec.avg_makespan_s = br.makespan_s;
    }
    rec.avg_time_to_best_s = since();
  } else {
    throw std::invalid_argument("unknown method '" + task.method + "'");
  }

  if (rec.feasible && std::isfinite(rec.reference_s) && rec.reference_s > 0.0)
    rec.deviation_pct = 100.0 * (rec.best_makespan_s - rec.reference_s) / rec.reference_s;
  return rec;
}

// One task per worker; each slot is written by exactly one thread and the
// output keeps the task order.
inline std::vector<RunRecord> run_tasks(const std::vector<BenchTask>& tasks, int threads = 1) {
  std::vector<RunRecord> out(tasks.size());
  if (tasks.empty()) return out;
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
  if (n == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) out[i] = run_task(tasks[i]);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(tasks.size());
  std::vector<std::thread> pool;
  for (int w = 0; w < n; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        try {
          out[i] = run_task(tasks[i]);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (!errors[i].empty())
      throw std::runtime_error("task " + tasks[i].name + ": " + errors[i]);
  return out;
}

namespace detail {

inline std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace detail

// Fixed header; empty cells where a value does not apply. Makespans carry
// two decimals to line up with the published tables.
inline std::string records_csv(const std::vector<RunRecord>& recs) {
  std::string out =
      "instance,method,sigma,t_hat_s,seed,runs,best_makespan_s,avg_makespan_s,"
      "avg_time_to_best_s,feasible,reference_s,deviation_pct\n";
  for (const RunRecord& r : recs) {
    out += detail::csv_field(r.instance) + "," + detail::csv_field(r.method) + ",";
    out += std::to_string(r.sigma) + ",";
    out += std::isfinite(r.t_hat_s) ? detail::fmt2(r.t_hat_s) : "inf";
    out += "," + std::to_string(r.seed) + "," + std::to_string(r.runs) + ",";
    if (r.feasible) {
      out += detail::fmt2(r.best_makespan_s) + "," + detail::fmt2(r.avg_makespan_s) + "," +
             detail::fmt2(r.avg_time_to_best_s);
    } else {
      out += ",,";
    }
    out += r.feasible ? ",yes" : ",no";
    out += ",";
    if (std::isfinite(r.reference_s)) out += detail::fmt2(r.reference_s);
    out += ",";
    if (std::isfinite(r.deviation_pct)) out += detail::fmt2(r.deviation_pct);
    out += "\n";
  }
  return out;
}

struct BenchDefaults {
  int runs = 1;
  double time_limit_s = 5.0;
  unsigned long long seed = 1;
};

namespace detail {

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string file_stem(const std::string& path) {
  const auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  if (base.size() > 5 && base.substr(base.size() - 5) == ".json") base.resize(base.size() - 5);
  return base;
}

inline double parse_t_hat_field(const nlohmann::json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw std::runtime_error("t_hat_s must be a number or \"inf\"");
  }
  if (!v.is_number()) throw std::runtime_error("t_hat_s must be a number or \"inf\"");
  return v.get<double>();
}

}  // namespace detail

// Manifest: {"defaults": {...}, "tasks": [{"instance": path, "methods": [...],
// "sigmas": [...], ...}]}. Every sigma-method pair becomes one task; relative
// instance paths resolve against base_dir.
inline std::vector<BenchTask> expand_manifest(const std::string& text, const std::string& base_dir,
                                              const BenchDefaults& fallback = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("invalid manifest JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("tasks") || !j["tasks"].is_array())
    throw std::runtime_error("manifest needs a tasks array");

  BenchDefaults def = fallback;
  if (j.contains("defaults")) {
    const auto& dj = j["defaults"];
    if (dj.contains("runs")) def.runs = dj["runs"].get<int>();
    if (dj.contains("time_limit_s")) def.time_limit_s = dj["time_limit_s"].get<double>();
    if (dj.contains("seed")) def.seed = dj["seed"].get<unsigned long long>();
  }

  std::vector<BenchTask> tasks;
  for (const auto& tj : j["tasks"]) {
    if (!tj.contains("instance")) throw std::runtime_error("manifest task needs an instance path");
    std::string path = tj["instance"].get<std::string>();
    if (!path.empty() && path[0] != '/' && !base_dir.empty()) path = base_dir + "/" + path;
    const Instance inst = parse_instance(detail::read_text(path));
    const std::string name =
        tj.contains("name") ? tj["name"].get<std::string>() : detail::file_stem(path);

    std::vector<std::string> methods;
    if (tj.contains("methods"))
      for (const auto& mj : tj["methods"]) methods.push_back(mj.get<std::string>());
    if (methods.empty()) methods.push_back("vns");
    for (const std::string& mtd : methods)
      if (mtd != "vns" && mtd != "decomp" && mtd != "oracle")
        throw std::runtime_error("unknown method '" + mtd + "' in manifest");

    std::vector<int> sigmas;
    if (tj.contains("sigmas"))
      for (const auto& sj : tj["sigmas"]) sigmas.push_back(sj.get<int>());
    if (sigmas.empty()) sigmas.push_back(inst.sigma);

    const double t_hat =
        tj.contains("t_hat_s") ? detail::parse_t_hat_field(tj["t_hat_s"]) : inst.t_hat_s;
    const int runs = tj.contains("runs") ? tj["runs"].get<int>() : def.runs;
    const double tl =
        tj.contains("time_limit_s") ? tj["time_limit_s"].get<double>() : def.time_limit_s;
    const unsigned long long seed =
        tj.contains("seed") ? tj["seed"].get<unsigned long long>() : def.seed;

    for (int sg : sigmas)
      for (const std::string& mtd : methods) {
        BenchTask t;
        t.inst = inst;
        t.name = name;
        t.method = mtd;
        t.sigma = sg;
        t.t_hat_s = t_hat;
        t.runs = runs;
        t.time_limit_s = tl;
        t.seed = seed;
        if (tj.contains("references") && tj["references"].contains(std::to_string(sg)))
          t.reference_s = tj["references"][std::to_string(sg)].get<double>();
        tasks.push_back(std::move(t));
      }
  }
  return tasks;
}

// Deadline sensitivity: resolve the unconstrained optimum once, then step the
// deadline down one second at a time and report each outcome against it.
inline std::vector<RunRecord> sweep_t_hat(const Instance& inst, const std::string& name,
                                          const std::string& method, int sigma, double t_hat_hi,
                                          double t_hat_lo, int runs = 1, double time_limit_s = 5.0,
                                          unsigned long long seed = 1) {
  if (!(t_hat_hi >= t_hat_lo) || t_hat_lo < 0.0)
    throw std::invalid_argument("deadline sweep needs t_hat_hi >= t_hat_lo >= 0");

  BenchTask base;
  base.inst = inst;
  base.name = name;
  base.method = method;
  base.sigma = sigma;
  base.runs = runs;
  base.time_limit_s = time_limit_s;
  base.seed = seed;

  BenchTask open = base;
  open.t_hat_s = std::numeric_limits<double>::infinity();
  const RunRecord free_run = run_task(open);

  std::vector<RunRecord> rows;
  for (double th = t_hat_hi; th >= t_hat_lo - 1e-9; th -= 1.0) {
    BenchTask t = base;
    t.t_hat_s = th;
    if (free_run.feasible) t.reference_s = free_run.best_makespan_s;
    rows.push_back(run_task(t));
  }
  return rows;
}

}  // namespace capsac
