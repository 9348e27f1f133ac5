#include "riemopt/bench/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "riemopt/bench/experiment.hpp"
#include "riemopt/bench/pareto.hpp"

namespace riemopt::bench {

namespace fs = std::filesystem;

std::vector<CheckReport> run_check_suite(const Instance& inst, const SolverConfig& solver, std::uint64_t seed) {
  const CompositeObjective obj = make_objective(inst);
  const Eigen::Index n = obj.dim();
  std::vector<CheckReport> out;
  auto add = [&](CheckReport r, const std::string& suffix) {
    if (!suffix.empty()) r.name += "[" + suffix + "]";
    out.push_back(std::move(r));
  };

  for (std::size_t i = 0; i < obj.size(); ++i) {
    const std::string tag = "f" + std::to_string(i + 1);
    add(fd_gradient_check(obj.smooth(i), obj.manifold(), 50, 1e-6, seed), tag);
    const std::string gtag = "g" + std::to_string(i + 1);
    add(convexity_check(obj.nonsmooth(i), n, 200, 1e-12, seed), gtag);
    add(subgradient_check(obj.nonsmooth(i), n, 200, 1e-12, seed), gtag);
    add(prox_check(obj.nonsmooth(i), n, 200, 1e-10, seed), gtag);
  }

  const std::pair<std::string, Manifold> geometries[] = {
      {"sphere/projective", Manifold::sphere(n, RetractionKind::Projective)},
      {"sphere/exponential", Manifold::sphere(n, RetractionKind::Exponential)},
      {"euclidean", Manifold::euclidean(n)},
  };
  for (const auto& [tag, M] : geometries) {
    add(retraction_axiom_check(M, 20, seed), tag);
    add(d_retract_fd_check(M, 20, 1e-6, seed), tag);
    add(adjoint_pairing_check(M, 20, 1e-10, seed), tag);
    add(adjoint_inverse_roundtrip_check(M, 20, 1e-8, seed), tag);
    add(transport_consistency_check(M, 20, 1e-8, seed), tag);
    add(transport_limit_check(M, 20, seed), tag);
  }

  const Point x0 = random_sphere_point(obj.manifold(), seed, kStartStream);
  const RunResult pg = rmpgm_run(obj, x0, solver);
  add(descent_trace_check(pg), "rmpgm");
  add(square_summability_check(pg, pg.certified_beta()), "rmpgm");
  add(iteration_bound_check(pg, pg.certified_beta(), solver.tol), "rmpgm");

  // Measured constant with a safety margin: the sampled curvature is a lower
  // estimate of the retraction-smoothness constant.
  const double L = 1.5 * measure_retraction_smoothness(obj, 200, seed);
  const RunResult tr = tr_rmpgm_run(obj, x0, solver);
  add(tr_trace_check(tr, solver.tr, L), "tr");
  return out;
}

namespace {

struct Options {
  InstanceParams inst;
  std::uint64_t seed = 0;
  int n_seeds = 10;
  std::vector<std::string> algos;
  int max_iter = 500;
  double tol = 1e-4;
  int n_starts = 50;
  double ltilde_init = 1.0;
  std::string retraction = "projective";
  std::string out_dir = ".";
  std::string out_file;
  std::string format = "txt";
  std::string instance_path;
  bool no_timing = false;
  std::vector<std::string> inputs;
};

void add_instance_flags(CLI::App* app, Options& o) {
  app->add_option("--n", o.inst.n, "ambient dimension")->capture_default_str();
  app->add_option("--m-rows", o.inst.m_rows, "rows of A1 and A2")->capture_default_str();
  app->add_option("--sparsity", o.inst.sparsity, "fraction of nonzeros per ground-truth signal")->capture_default_str();
  app->add_option("--lambda1", o.inst.lambda1, "L1 weight of F1")->capture_default_str();
  app->add_option("--lambda2", o.inst.lambda2, "L1 weight of F2")->capture_default_str();
  app->add_option("--noise-std", o.inst.noise_std, "std of the additive noise on b_i")->capture_default_str();
}

void add_solver_flags(CLI::App* app, Options& o) {
  app->add_option("--max-iter", o.max_iter, "outer iteration cap")->capture_default_str();
  app->add_option("--tol", o.tol, "stop once ||eta_k|| <= tol")->capture_default_str();
  app->add_option("--ltilde-init", o.ltilde_init, "initial Ltilde / sigma_0 (<= 0: Lipschitz hint)")
      ->capture_default_str();
  app->add_option("--retraction", o.retraction, "sphere retraction")
      ->check(CLI::IsMember({"projective", "exponential"}))
      ->capture_default_str();
  app->add_flag("--no-timing", o.no_timing, "write zero wall times (byte-stable traces)");
}

void add_seed_flags(CLI::App* app, Options& o, int default_count) {
  o.n_seeds = default_count;
  app->add_option("--seed", o.seed, "first seed")->capture_default_str();
  app->add_option("--n-seeds", o.n_seeds, "number of consecutive seeds")->capture_default_str()->check(
      CLI::PositiveNumber);
}

std::vector<Algorithm> parse_algos(const std::vector<std::string>& names, std::vector<Algorithm> fallback) {
  if (names.empty()) return fallback;
  std::vector<Algorithm> out;
  for (const std::string& list : names) {
    std::stringstream ss(list);
    for (std::string name; std::getline(ss, name, ',');) {
      if (name == "all") {
        out = {Algorithm::Rmpgm, Algorithm::Inexact, Algorithm::TrustRegion, Algorithm::Rmsd};
        continue;
      }
      const auto a = parse_algorithm(name);
      if (!a) throw Error(ErrorCode::InvalidArgument, "unknown algorithm '" + name + "'");
      if (std::find(out.begin(), out.end(), *a) == out.end()) out.push_back(*a);
    }
  }
  return out;
}

ExperimentConfig experiment_config(const Options& o, std::vector<Algorithm> fallback) {
  ExperimentConfig cfg;
  cfg.instance = o.inst;
  cfg.seeds.clear();
  for (int i = 0; i < o.n_seeds; ++i) cfg.seeds.push_back(o.seed + static_cast<std::uint64_t>(i));
  cfg.algorithms = parse_algos(o.algos, std::move(fallback));
  cfg.max_iter = o.max_iter;
  cfg.tol = o.tol;
  cfg.n_starts = o.n_starts;
  cfg.solver.Ltilde_init = o.ltilde_init;
  cfg.solver.timing = !o.no_timing;
  if (o.retraction == "exponential") cfg.solver.retraction = RetractionKind::Exponential;
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + p.string());
  return f;
}

std::string instance_file_name(const InstanceParams& p) {
  return "instance_n" + std::to_string(p.n) + "_m" + std::to_string(p.m_rows) + "_seed" + std::to_string(p.seed) +
         ".bin";
}

int cmd_gen(const Options& o) {
  for (int i = 0; i < o.n_seeds; ++i) {
    InstanceParams p = o.inst;
    p.seed = o.seed + static_cast<std::uint64_t>(i);
    const Instance inst = generate_instance(p);
    const fs::path path =
        (!o.out_file.empty() && o.n_seeds == 1) ? fs::path(o.out_file) : fs::path(o.out_dir) / instance_file_name(p);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    save_instance(path.string(), inst);
    std::cout << path.string() << "\n";
  }
  return 0;
}

int cmd_run(const Options& o) {
  const ExperimentConfig cfg = experiment_config(
      o, {Algorithm::Rmpgm, Algorithm::Inexact, Algorithm::TrustRegion, Algorithm::Rmsd});
  ExperimentResult res;
  if (o.instance_path.empty()) {
    res = run_experiment(cfg);
  } else {
    res = run_experiment(load_instance(o.instance_path), cfg);
  }
  const fs::path dir(o.out_dir);
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const SummaryRow& r = res.rows[i];
    auto f = open_out(dir / "traces" /
                      (std::string(to_string(r.algorithm)) + "_n" + std::to_string(r.n) + "_seed" +
                       std::to_string(r.seed) + ".csv"));
    write_trace_csv(f, res.runs[i]);
  }
  {
    auto f = open_out(dir / "summary.csv");
    write_summary_csv(f, res.rows);
  }
  const auto agg = aggregate(res.rows);
  if (o.format == "csv") {
    write_aggregate_csv(std::cout, agg);
  } else {
    std::cout << format_table(agg);
  }
  return 0;
}

int cmd_pareto(const Options& o) {
  Options opts = o;
  opts.n_seeds = 1;
  const ExperimentConfig cfg = experiment_config(opts, {Algorithm::Rmpgm, Algorithm::Rmsd});
  InstanceParams p = o.inst;
  p.seed = o.seed;
  const Instance inst = o.instance_path.empty() ? generate_instance(p) : load_instance(o.instance_path);
  const fs::path dir(o.out_dir);
  std::vector<std::pair<std::string, std::vector<ParetoPoint>>> series;
  for (Algorithm a : cfg.algorithms) {
    const ParetoSweep sweep = pareto_sweep(inst, a, cfg, o.seed);
    auto f = open_out(dir / ("front_" + std::string(to_string(a)) + ".csv"));
    write_front_csv(f, sweep.front);
    std::cout << to_string(a) << ": " << sweep.front.size() << " nondominated of " << sweep.all.size()
              << " final points\n";
    series.emplace_back(to_string(a), sweep.front);
  }
  for (const auto& [la, fa] : series)
    for (const auto& [lb, fb] : series)
      if (la != lb)
        std::cout << la << " front points dominated by " << lb << " front: " << count_dominated(fa, fb) << "/"
                  << fa.size() << "\n";
  if (o.format == "svg") {
    auto f = open_out(dir / "front.svg");
    write_front_svg(f, series);
  }
  return 0;
}

int cmd_check(const Options& o) {
  Options opts = o;
  opts.n_seeds = 1;
  const ExperimentConfig cfg = experiment_config(opts, {Algorithm::Rmpgm});
  InstanceParams p = o.inst;
  p.seed = o.seed;
  const Instance inst = o.instance_path.empty() ? generate_instance(p) : load_instance(o.instance_path);
  const auto reports = run_check_suite(inst, cfg.solver_config(), o.seed);
  if (o.format == "csv") std::cout << CheckReport::csv_header() << "\n";
  bool ok = true;
  for (const CheckReport& r : reports) {
    std::cout << (o.format == "csv" ? r.to_csv() : r.to_text()) << "\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : 2;
}

int cmd_table(const Options& o) {
  std::vector<SummaryRow> rows;
  for (const std::string& path : o.inputs) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot read " + path);
    const auto more = read_summary_csv(f);
    rows.insert(rows.end(), more.begin(), more.end());
  }
  const auto agg = aggregate(rows);
  if (o.format == "csv") {
    write_aggregate_csv(std::cout, agg);
  } else {
    std::cout << format_table(agg);
  }
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Multiobjective proximal gradient methods on the sphere: sparse-recovery benchmark"};
  app.name("riemopt");
  app.require_subcommand(1);
  Options og, orun, opar, ochk, otab;

  auto* gen = app.add_subcommand("gen", "write seeded instance files");
  add_instance_flags(gen, og);
  add_seed_flags(gen, og, 1);
  gen->add_option("--out-dir", og.out_dir, "output directory")->capture_default_str();
  gen->add_option("--out", og.out_file, "output file (single seed only)");

  auto* run = app.add_subcommand("run", "run algorithms over seeds; write traces and summary.csv");
  add_instance_flags(run, orun);
  add_seed_flags(run, orun, 10);
  add_solver_flags(run, orun);
  run->add_option("--algo", orun.algos, "rmpgm, inexact, tr, rmsd or all (repeatable, comma-separated)");
  run->add_option("--instance", orun.instance_path, "fixed instance file; seeds then only draw starts");
  run->add_option("--out-dir", orun.out_dir, "output directory")->capture_default_str();
  run->add_option("--format", orun.format, "stdout format")->check(CLI::IsMember({"txt", "csv"}))->capture_default_str();

  auto* pareto = app.add_subcommand("pareto", "multi-start Pareto sweep");
  add_instance_flags(pareto, opar);
  add_solver_flags(pareto, opar);
  pareto->add_option("--seed", opar.seed, "instance and start seed")->capture_default_str();
  pareto->add_option("--n-starts", opar.n_starts, "starting points per algorithm")->capture_default_str();
  pareto->add_option("--algo", opar.algos, "algorithms to sweep (default rmpgm,rmsd)");
  pareto->add_option("--instance", opar.instance_path, "instance file instead of generating one");
  pareto->add_option("--out-dir", opar.out_dir, "output directory")->capture_default_str();
  pareto->add_option("--format", opar.format, "svg also writes front.svg")
      ->check(CLI::IsMember({"txt", "csv", "svg"}))
      ->capture_default_str();

  auto* check = app.add_subcommand("check", "run the diagnostics suite");
  add_instance_flags(check, ochk);
  add_solver_flags(check, ochk);
  check->add_option("--seed", ochk.seed, "instance and start seed")->capture_default_str();
  check->add_option("--instance", ochk.instance_path, "instance file instead of generating one");
  check->add_option("--format", ochk.format, "report format")->check(CLI::IsMember({"txt", "csv"}))->capture_default_str();

  auto* table = app.add_subcommand("table", "aggregate summary CSVs into a table");
  table->add_option("inputs", otab.inputs, "summary.csv files")->required()->check(CLI::ExistingFile);
  table->add_option("--format", otab.format, "output format")->check(CLI::IsMember({"txt", "csv"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) return cmd_gen(og);
    if (*run) return cmd_run(orun);
    if (*pareto) return cmd_pareto(opar);
    if (*check) return cmd_check(ochk);
    if (*table) return cmd_table(otab);
  } catch (const Error& e) {
    std::cerr << "riemopt: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidArgument ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "riemopt: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace riemopt::bench
