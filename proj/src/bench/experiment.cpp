#include "riemopt/bench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace riemopt::bench {

void ExperimentConfig::validate() const {
  instance.validate();
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "at least one seed is required");
  if (algorithms.empty()) throw Error(ErrorCode::InvalidArgument, "at least one algorithm is required");
  if (max_iter < 0) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 0");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be >= 0");
  if (n_starts < 1) throw Error(ErrorCode::InvalidArgument, "n_starts must be >= 1");
  solver_config().validate();
}

SolverConfig ExperimentConfig::solver_config() const {
  SolverConfig s = solver;
  s.max_iter = max_iter;
  s.tol = tol;
  return s;
}

std::vector<std::uint64_t> ExperimentConfig::default_seeds(int count) {
  std::vector<std::uint64_t> s;
  for (int i = 0; i < count; ++i) s.push_back(static_cast<std::uint64_t>(i));
  return s;
}

unsigned worker_threads() {
  if (const char* env = std::getenv("RIEMOPT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(worker_threads(), count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

SummaryRow summarize(const RunResult& r, const InstanceParams& p, std::uint64_t seed) {
  SummaryRow row;
  row.algorithm = r.algorithm;
  row.n = p.n;
  row.m_rows = p.m_rows;
  row.seed = seed;
  row.iterations = r.iterations;
  row.converged = r.converged();
  row.wall_seconds = r.wall_seconds;
  row.final_eta_norm = r.trace.empty() ? 0.0 : r.trace.back().eta_norm;
  row.inner_iters = r.total_inner_iters;
  return row;
}

ExperimentResult run_tasks(const ExperimentConfig& cfg, const std::function<Instance(std::uint64_t)>& instance_for) {
  cfg.validate();
  const SolverConfig solver = cfg.solver_config();
  const std::size_t A = cfg.algorithms.size();
  const std::size_t tasks = cfg.seeds.size() * A;
  ExperimentResult out;
  out.rows.resize(tasks);
  out.runs.resize(tasks);
  parallel_for(cfg.seeds.size(), [&](std::size_t s) {
    const std::uint64_t seed = cfg.seeds[s];
    const Instance inst = instance_for(seed);
    const CompositeObjective obj = make_objective(inst);
    const Point x0 = random_sphere_point(obj.manifold(), seed, kStartStream);
    for (std::size_t a = 0; a < A; ++a) {
      RunResult r = run_algorithm(cfg.algorithms[a], obj, x0, solver);
      out.rows[s * A + a] = summarize(r, inst.params, seed);
      out.runs[s * A + a] = std::move(r);
    }
  });
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  return run_tasks(cfg, [&](std::uint64_t seed) {
    InstanceParams p = cfg.instance;
    p.seed = seed;
    return generate_instance(p);
  });
}

ExperimentResult run_experiment(const Instance& inst, const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.instance = inst.params;
  return run_tasks(c, [&](std::uint64_t) { return inst; });
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "algorithm,n,m_rows,seed,iterations,converged,wall_seconds,final_eta_norm,inner_iters\n";
  for (const SummaryRow& r : rows)
    os << to_string(r.algorithm) << ',' << r.n << ',' << r.m_rows << ',' << r.seed << ',' << r.iterations << ','
       << (r.converged ? 1 : 0) << ',' << format_double(r.wall_seconds) << ',' << format_double(r.final_eta_norm) << ','
       << r.inner_iters << '\n';
}

std::vector<SummaryRow> read_summary_csv(std::istream& is) {
  std::vector<SummaryRow> rows;
  std::string line;
  if (!std::getline(is, line) || line.rfind("algorithm,", 0) != 0)
    throw Error(ErrorCode::Io, "summary CSV: missing header");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() < 8) throw Error(ErrorCode::Io, "summary CSV: short row at line " + std::to_string(lineno));
    SummaryRow r;
    const auto algo = parse_algorithm(f[0]);
    if (!algo) throw Error(ErrorCode::Io, "summary CSV: unknown algorithm '" + f[0] + "'");
    try {
      r.algorithm = *algo;
      r.n = std::stoi(f[1]);
      r.m_rows = std::stoi(f[2]);
      r.seed = std::stoull(f[3]);
      r.iterations = std::stoi(f[4]);
      r.converged = f[5] == "1";
      r.wall_seconds = std::stod(f[6]);
      r.final_eta_norm = std::stod(f[7]);
      r.inner_iters = f.size() > 8 ? std::stol(f[8]) : 0;
    } catch (const std::exception&) {
      throw Error(ErrorCode::Io, "summary CSV: bad number at line " + std::to_string(lineno));
    }
    rows.push_back(r);
  }
  return rows;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::vector<AggregateRow> aggregate(const std::vector<SummaryRow>& rows) {
  std::map<std::tuple<int, int, int>, std::vector<const SummaryRow*>> groups;
  for (const SummaryRow& r : rows) groups[{r.n, r.m_rows, static_cast<int>(r.algorithm)}].push_back(&r);
  std::vector<AggregateRow> out;
  for (const auto& [key, members] : groups) {
    AggregateRow a;
    a.n = std::get<0>(key);
    a.m_rows = std::get<1>(key);
    a.algorithm = static_cast<Algorithm>(std::get<2>(key));
    a.runs = static_cast<int>(members.size());
    std::vector<double> iters;
    for (const SummaryRow* r : members) {
      a.converged += r->converged ? 1 : 0;
      a.mean_iterations += r->iterations;
      a.mean_wall_seconds += r->wall_seconds;
      a.mean_inner_iters += static_cast<double>(r->inner_iters);
      iters.push_back(r->iterations);
    }
    a.mean_iterations /= a.runs;
    a.mean_wall_seconds /= a.runs;
    a.mean_inner_iters /= a.runs;
    a.median_iterations = median(iters);
    out.push_back(a);
  }
  return out;
}

std::string format_table(const std::vector<AggregateRow>& agg) {
  std::vector<std::pair<int, int>> sizes;
  std::vector<Algorithm> algos;
  for (const AggregateRow& a : agg) {
    if (std::find(sizes.begin(), sizes.end(), std::make_pair(a.n, a.m_rows)) == sizes.end())
      sizes.emplace_back(a.n, a.m_rows);
    if (std::find(algos.begin(), algos.end(), a.algorithm) == algos.end()) algos.push_back(a.algorithm);
  }
  std::sort(algos.begin(), algos.end());
  std::ostringstream os;
  os << std::left << std::setw(10) << "Method";
  for (const auto& [n, m] : sizes) {
    std::ostringstream head;
    head << "n=" << n << ", m=" << m;
    os << " | " << std::setw(24) << head.str();
  }
  os << "\n" << std::setw(10) << "";
  for (std::size_t s = 0; s < sizes.size(); ++s)
    os << " | " << std::right << std::setw(8) << "Iters" << std::setw(10) << "Time(s)" << std::setw(6) << "Conv" << std::left;
  os << "\n";
  for (Algorithm algo : algos) {
    os << std::setw(10) << to_string(algo);
    for (const auto& [n, m] : sizes) {
      const auto it = std::find_if(agg.begin(), agg.end(), [&](const AggregateRow& a) {
        return a.algorithm == algo && a.n == n && a.m_rows == m;
      });
      os << " | " << std::right;
      if (it == agg.end()) {
        os << std::setw(24) << "-";
      } else {
        std::ostringstream conv;
        conv << it->converged << "/" << it->runs;
        os << std::fixed << std::setw(8) << std::setprecision(1) << it->mean_iterations << std::setw(10)
           << std::setprecision(3) << it->mean_wall_seconds << std::setw(6) << conv.str();
        os.unsetf(std::ios::fixed);
      }
      os << std::left;
    }
    os << "\n";
  }
  return os.str();
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& agg) {
  os << "algorithm,n,m_rows,runs,converged,mean_iterations,median_iterations,mean_wall_seconds,mean_inner_iters\n";
  for (const AggregateRow& a : agg)
    os << to_string(a.algorithm) << ',' << a.n << ',' << a.m_rows << ',' << a.runs << ',' << a.converged << ','
       << format_double(a.mean_iterations) << ',' << format_double(a.median_iterations) << ','
       << format_double(a.mean_wall_seconds) << ',' << format_double(a.mean_inner_iters) << '\n';
}

}  // namespace riemopt::bench
