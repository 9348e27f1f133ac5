#pragma once

// Seeded multi-run experiments on the sparse-recovery benchmark.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "riemopt/algorithms.hpp"
#include "riemopt/bench/instance.hpp"

namespace riemopt::bench {

/// Stream of the starting point drawn for a (seed, start) pair.
inline constexpr std::uint32_t kStartStream = 1000;

struct ExperimentConfig {
  /// Problem shape; its seed field is replaced by each run's seed.
  InstanceParams instance;
  std::vector<std::uint64_t> seeds = default_seeds(10);
  std::vector<Algorithm> algorithms = {Algorithm::Rmpgm, Algorithm::Inexact, Algorithm::TrustRegion, Algorithm::Rmsd};
  int max_iter = 500;
  double tol = 1e-4;
  int n_starts = 50;
  /// Remaining solver knobs; max_iter and tol above take precedence.
  SolverConfig solver;

  void validate() const;
  SolverConfig solver_config() const;
  static std::vector<std::uint64_t> default_seeds(int count);
};

struct SummaryRow {
  Algorithm algorithm = Algorithm::Rmpgm;
  int n = 0;
  int m_rows = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  bool converged = false;
  double wall_seconds = 0.0;
  double final_eta_norm = 0.0;
  long inner_iters = 0;
};

struct ExperimentResult {
  std::vector<SummaryRow> rows;
  /// Same order as rows.
  std::vector<RunResult> runs;
};

/// One instance per seed (generated with that seed), one start per seed.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
/// Fixed instance; each seed only draws the starting point.
ExperimentResult run_experiment(const Instance& inst, const ExperimentConfig& cfg);

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(std::istream& is);

struct AggregateRow {
  Algorithm algorithm = Algorithm::Rmpgm;
  int n = 0;
  int m_rows = 0;
  int runs = 0;
  int converged = 0;
  double mean_iterations = 0.0;
  double median_iterations = 0.0;
  double mean_wall_seconds = 0.0;
  double mean_inner_iters = 0.0;
};

/// Means over seeds per (algorithm, n, m_rows), ordered by size then algorithm.
std::vector<AggregateRow> aggregate(const std::vector<SummaryRow>& rows);
/// Text table: one line per algorithm, an (iters, time) column pair per size.
std::string format_table(const std::vector<AggregateRow>& agg);
void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& agg);

double median(std::vector<double> v);

/// Runs fn(0..count-1) on up to RIEMOPT_THREADS threads (default: logical cores).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);
unsigned worker_threads();

}  // namespace riemopt::bench
