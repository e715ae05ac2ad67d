#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <capsac/adapter.hpp>
#include <capsac/bench.hpp>
#include <capsac/enumdecomp.hpp>
#include <capsac/gen.hpp>
#include <capsac/model.hpp>
#include <capsac/oracle.hpp>
#include <capsac/validate.hpp>
#include <capsac/vns.hpp>

namespace {

constexpr int kExitFeasible = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

const double kInf = std::numeric_limits<double>::infinity();
const double kNan = std::numeric_limits<double>::quiet_NaN();

double parse_t_hat(const std::string& s) {
  if (s == "inf") return kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !(v >= 0.0))
    throw std::runtime_error("--t-hat takes a nonnegative number or 'inf'");
  return v;
}

// "n1,n3" or "1,3" -> {1, 3}
std::vector<int> parse_neighborhoods(const std::string& s) {
  std::vector<int> out;
  std::string tok;
  std::istringstream ss(s);
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty() && tok[0] == 'n') tok.erase(0, 1);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size())
      throw std::runtime_error("--neighborhoods takes tokens like n1,n2,n3");
    out.push_back(v);
  }
  if (out.empty()) throw std::runtime_error("--neighborhoods takes tokens like n1,n2,n3");
  return out;
}

std::string dir_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_text(out_path, text);
    std::fprintf(stderr, "wrote %s\n", out_path.c_str());
  }
}

capsac::Instance load_instance(const std::string& path, int sigma_flag,
                               const std::string& t_hat_flag) {
  capsac::Instance inst = capsac::parse_instance(capsac::detail::read_text(path));
  const int sigma = sigma_flag > 0 ? sigma_flag : inst.sigma;
  const double t_hat = t_hat_flag.empty() ? inst.t_hat_s : parse_t_hat(t_hat_flag);
  return capsac::override_fields(std::move(inst), sigma, t_hat);
}

void append_csv_row(const std::string& path, const capsac::RunRecord& rec) {
  const std::string table = capsac::records_csv({rec});
  bool fresh = true;
  {
    std::ifstream probe(path, std::ios::binary | std::ios::ate);
    if (probe && probe.tellg() > 0) fresh = false;
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << (fresh ? table : table.substr(table.find('\n') + 1));
}

// Shared tail of every solving command: serialize, re-check the reported
// number against the emitted bytes, write, and pick the exit code.
int finish_solve(const capsac::Instance& inst, const capsac::Solution& sol,
                 const std::string& out_path) {
  const std::string bytes = capsac::serialize_solution(sol);
  if (sol.feasible) {
    const capsac::Solution back = capsac::parse_solution(bytes);
    const auto problems = capsac::validate_solution(inst, back);
    if (!problems.empty())
      throw std::runtime_error("emitted solution fails validation: " + problems.front());
    if (capsac::makespan(inst, back) != sol.makespan_s)
      throw std::runtime_error("emitted solution does not reproduce the reported makespan");
    std::fprintf(stderr, "makespan %.2f feasible\n", sol.makespan_s);
  } else {
    std::fprintf(stderr, "infeasible\n");
  }
  emit(out_path, bytes);
  return sol.feasible ? kExitFeasible : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covering-assignment solver toolkit for drone photo swarms"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "run a heuristic on an instance file");
  std::string sv_path, sv_method = "vns", sv_t_hat, sv_nbh, sv_out, sv_csv, sv_name;
  int sv_sigma = -1, sv_runs = 1;
  long long sv_max_iter = -1;
  double sv_time_limit = 5.0, sv_target = kNan;
  unsigned long long sv_seed = 1;
  solve->add_option("instance", sv_path, "instance JSON file")->required();
  solve->add_option("--method", sv_method, "vns or decomp")
      ->check(CLI::IsMember({"vns", "decomp"}));
  solve->add_option("--sigma", sv_sigma, "replication factor override");
  solve->add_option("--t-hat", sv_t_hat, "transfer deadline override (seconds or 'inf')");
  solve->add_option("--time-limit-s", sv_time_limit, "per-run time limit for vns");
  solve->add_option("--seed", sv_seed, "base RNG seed");
  solve->add_option("--runs", sv_runs, "vns restarts, seeds seed..seed+runs-1")
      ->check(CLI::PositiveNumber);
  solve->add_option("--neighborhoods", sv_nbh, "active vns neighborhoods, e.g. n1,n2,n3");
  solve->add_option("--max-iterations", sv_max_iter, "vns shake budget, -1 = unlimited");
  solve->add_option("--target", sv_target, "stop vns once this makespan is reached");
  solve->add_option("--out", sv_out, "solution JSON path (default stdout)");
  solve->add_option("--csv", sv_csv, "append a result row to this CSV");
  solve->add_option("--name", sv_name, "instance label for the CSV row");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exhaustive optimum on a tiny instance");
  std::string or_path, or_t_hat, or_out;
  int or_sigma = -1;
  oracle->add_option("instance", or_path, "instance JSON file")->required();
  oracle->add_option("--sigma", or_sigma, "replication factor override");
  oracle->add_option("--t-hat", or_t_hat, "transfer deadline override (seconds or 'inf')");
  oracle->add_option("--out", or_out, "solution JSON path (default stdout)");

  // gen
  auto* gen = app.add_subcommand("gen", "write a synthetic instance");
  capsac::GenConfig gc;
  std::string gn_grid, gn_t_hat, gn_out;
  gen->add_option("--photos", gc.photos, "photo count")->check(CLI::PositiveNumber);
  gen->add_option("--drones", gc.drones, "swarm size")->check(CLI::PositiveNumber);
  gen->add_option("--capable-pct", gc.capable_pct, "percent of drones that reconstruct");
  auto* wflag = gen->add_flag("--weighted", gc.weighted, "draw photo times around --lambda-s");
  gen->add_flag("--unweighted", "uniform photo times (default)")->excludes(wflag);
  gen->add_option("--lambda-s", gc.lambda_s, "photo processing seconds (mean when weighted)");
  gen->add_option("--mu-mb", gc.mu_mb, "photo size in MB");
  gen->add_option("--grid", gn_grid, "grid as ROWSxCOLS, e.g. 10x20");
  gen->add_option("--capacity-mbps", gc.capacity_mbps, "link capacity");
  gen->add_option("--sigma", gc.sigma, "replication factor");
  gen->add_option("--t-hat", gn_t_hat, "transfer deadline (seconds or 'inf')");
  gen->add_option("--seed", gc.seed, "RNG seed");
  gen->add_option("--out", gn_out, "output path (default <name>.json)");

  // bench
  auto* bench = app.add_subcommand("bench", "run a manifest of searches or a deadline sweep");
  std::string bn_manifest, bn_sweep, bn_method = "decomp", bn_out;
  int bn_sigma = -1, bn_runs = 1, bn_threads = 1;
  double bn_hi = kNan, bn_lo = 1.0, bn_time_limit = 5.0;
  unsigned long long bn_seed = 1;
  bench->add_option("manifest", bn_manifest, "manifest JSON file");
  bench->add_option("--sweep", bn_sweep, "instance file for a deadline sweep");
  bench->add_option("--method", bn_method, "sweep method: vns, decomp, or oracle")
      ->check(CLI::IsMember({"vns", "decomp", "oracle"}));
  bench->add_option("--sigma", bn_sigma, "sweep replication factor (default from file)");
  bench->add_option("--t-hat-hi", bn_hi, "sweep start deadline, seconds");
  bench->add_option("--t-hat-lo", bn_lo, "sweep end deadline, seconds");
  bench->add_option("--runs", bn_runs, "vns restarts per task")->check(CLI::PositiveNumber);
  bench->add_option("--time-limit-s", bn_time_limit, "per-run time limit for vns");
  bench->add_option("--seed", bn_seed, "base RNG seed");
  bench->add_option("--threads", bn_threads, "worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--out", bn_out, "CSV path (default stdout)");

  // export-milp
  auto* emod = app.add_subcommand("export-milp", "write the integer model in LP format");
  std::string ex_path, ex_t_hat, ex_cards = "all", ex_out;
  int ex_sigma = -1;
  bool ex_used = false;
  emod->add_option("instance", ex_path, "instance JSON file")->required();
  emod->add_option("--sigma", ex_sigma, "replication factor override");
  emod->add_option("--t-hat", ex_t_hat, "transfer deadline override (seconds or 'inf')");
  emod->add_option("--cards", ex_cards, "candidate cardinalities, e.g. 2,4 (default all)");
  emod->add_flag("--require-drone-coverage", ex_used, "add one-region-per-drone rows");
  emod->add_option("--out", ex_out, "LP path (default stdout)");

  // catalog
  auto* catg = app.add_subcommand("catalog", "list every rectangular sub-region as CSV");
  std::string ct_path, ct_out;
  catg->add_option("instance", ct_path, "instance JSON file")->required();
  catg->add_option("--out", ct_out, "CSV path (default stdout)");

  // import
  auto* imp = app.add_subcommand("import", "convert a public instance file");
  std::string im_path;
  imp->add_option("file", im_path, "public instance file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*solve) {
      const capsac::Instance inst = load_instance(sv_path, sv_sigma, sv_t_hat);
      capsac::Solution sol;
      double best_found_s = 0.0;
      double avg_mk = 0.0, avg_tt = 0.0;
      int feasible_runs = 0;

      if (sv_method == "vns") {
        capsac::VnsConfig cfg;
        cfg.time_limit_s = sv_time_limit;
        cfg.max_iterations = sv_max_iter;
        cfg.target_makespan = sv_target;
        if (!sv_nbh.empty()) cfg.neighborhoods = parse_neighborhoods(sv_nbh);
        capsac::Evaluation best_ev;
        bool have = false;
        for (int r = 0; r < sv_runs; ++r) {
          cfg.seed = sv_seed + static_cast<unsigned long long>(r);
          const capsac::VnsResult vr = capsac::vns_solve(inst, cfg);
          if (r == 0)
            for (const std::string& w : vr.warnings)
              std::fprintf(stderr, "warning: %s\n", w.c_str());
          if (vr.eval.feasible()) {
            ++feasible_runs;
            avg_mk += vr.eval.makespan_s;
            avg_tt += vr.best_found_s;
          }
          if (!have || capsac::lex_better(vr.eval, best_ev)) {
            have = true;
            best_ev = vr.eval;
            sol = vr.solution;
            best_found_s = vr.best_found_s;
          }
        }
        if (feasible_runs > 0) {
          avg_mk /= feasible_runs;
          avg_tt /= feasible_runs;
        }
      } else {
        const capsac::DecomposeResult dr = capsac::decompose_solve(inst);
        for (const capsac::DecomposeIteration& it : dr.trace) {
          const std::string mk =
              std::isfinite(it.makespan_s) ? capsac::detail::fmt2(it.makespan_s) : "inf";
          std::fprintf(stderr, "iter %d: interval [%lld,%lld] candidates %d makespan %s%s\n",
                       it.iteration, it.n_lo, it.n_hi, it.candidate_count, mk.c_str(),
                       it.proven ? "" : " (budget cut)");
        }
        if (!dr.trace.empty())
          std::fprintf(stderr, "final interval [%lld,%lld]\n", dr.trace.back().n_lo,
                       dr.trace.back().n_hi);
        if (dr.proven_infeasible) std::fprintf(stderr, "no feasible covering exists\n");
        sol = dr.solution;
        avg_mk = dr.makespan_s;
        feasible_runs = dr.feasible ? 1 : 0;
      }

      const int rc = finish_solve(inst, sol, sv_out);
      // only record runs whose emitted solution survived the recheck
      if (!sv_csv.empty()) {
        capsac::RunRecord rec;
        rec.instance = sv_name.empty() ? capsac::detail::file_stem(sv_path) : sv_name;
        rec.method = sv_method;
        rec.sigma = inst.sigma;
        rec.t_hat_s = inst.t_hat_s;
        rec.seed = sv_seed;
        rec.runs = sv_method == "vns" ? sv_runs : 1;
        rec.feasible = sol.feasible;
        if (sol.feasible) {
          rec.best_makespan_s = sol.makespan_s;
          rec.avg_makespan_s = feasible_runs > 0 ? avg_mk : sol.makespan_s;
          rec.avg_time_to_best_s = sv_method == "vns" ? avg_tt : best_found_s;
        }
        append_csv_row(sv_csv, rec);
      }
      return rc;
    }

    if (*oracle) {
      const capsac::Instance inst = load_instance(or_path, or_sigma, or_t_hat);
      const capsac::OracleResult br = capsac::oracle_solve(inst);
      return finish_solve(inst, br.solution, or_out);
    }

    if (*gen) {
      if (!gn_grid.empty()) {
        const auto x = gn_grid.find('x');
        if (x == std::string::npos) throw std::runtime_error("--grid takes ROWSxCOLS");
        gc.grid_rows = std::stoi(gn_grid.substr(0, x));
        gc.grid_cols = std::stoi(gn_grid.substr(x + 1));
      }
      if (!gn_t_hat.empty()) gc.t_hat_s = parse_t_hat(gn_t_hat);
      const std::string name = capsac::gen_name(gc);
      const std::string path = gn_out.empty() ? name + ".json" : gn_out;
      write_text(path, capsac::gen_instance(gc));
      std::fprintf(stdout, "%s\n", name.c_str());
      std::fprintf(stderr, "wrote %s\n", path.c_str());
      return kExitFeasible;
    }

    if (*bench) {
      if (bn_manifest.empty() == bn_sweep.empty())
        throw std::runtime_error("bench takes either a manifest or --sweep, not both");
      std::vector<capsac::RunRecord> rows;
      if (!bn_manifest.empty()) {
        capsac::BenchDefaults def;
        def.runs = bn_runs;
        def.time_limit_s = bn_time_limit;
        def.seed = bn_seed;
        const auto tasks = capsac::expand_manifest(capsac::detail::read_text(bn_manifest),
                                                   dir_of(bn_manifest), def);
        rows = capsac::run_tasks(tasks, bn_threads);
      } else {
        if (!std::isfinite(bn_hi)) throw std::runtime_error("--sweep needs --t-hat-hi");
        const capsac::Instance inst =
            capsac::parse_instance(capsac::detail::read_text(bn_sweep));
        const int sigma = bn_sigma > 0 ? bn_sigma : inst.sigma;
        rows = capsac::sweep_t_hat(inst, capsac::detail::file_stem(bn_sweep), bn_method, sigma,
                                   bn_hi, bn_lo, bn_runs, bn_time_limit, bn_seed);
      }
      emit(bn_out, capsac::records_csv(rows));
      return kExitFeasible;
    }

    if (*emod) {
      const capsac::Instance inst = load_instance(ex_path, ex_sigma, ex_t_hat);
      capsac::GeoSums gs(inst);
      capsac::SubRegionCatalog cat = capsac::enumerate_rects(inst, gs);
      capsac::build_cardinality_index(cat);
      std::vector<int> candidates;
      if (ex_cards == "all") {
        candidates.resize(cat.regions.size());
        std::iota(candidates.begin(), candidates.end(), 0);
      } else {
        std::string tok;
        std::istringstream ss(ex_cards);
        while (std::getline(ss, tok, ',')) {
          const long long card = std::stoll(tok);
          const auto it = cat.omega_map.find(card);
          if (it == cat.omega_map.end())
            throw std::runtime_error("no sub-region holds exactly " + tok + " photos");
          candidates.insert(candidates.end(), it->second.begin(), it->second.end());
        }
      }
      capsac::MilpFlags flags;
      flags.require_drone_coverage = ex_used;
      emit(ex_out, capsac::export_milp(inst, cat, candidates, flags));
      return kExitFeasible;
    }

    if (*catg) {
      const capsac::Instance inst =
          capsac::parse_instance(capsac::detail::read_text(ct_path));
      capsac::GeoSums gs(inst);
      const capsac::SubRegionCatalog cat = capsac::enumerate_rects(inst, gs);
      emit(ct_out, capsac::catalog_csv(cat));
      return kExitFeasible;
    }

    if (*imp) {
      const capsac::Instance inst =
          capsac::import_public_instance(capsac::detail::read_text(im_path));
      std::fputs(capsac::serialize_instance(inst).c_str(), stdout);
      return kExitFeasible;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
