#pragma once

// Multi-start Pareto sweeps and nondominated filtering.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "riemopt/bench/experiment.hpp"

namespace riemopt::bench {

struct ParetoPoint {
  Eigen::VectorXd F;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::Rmpgm;
  int start = 0;
};

/// u weakly precedes v (u <= v componentwise).
bool weakly_precedes(const Eigen::VectorXd& u, const Eigen::VectorXd& v);
/// u weakly precedes v and u != v.
bool dominates(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Nondominated subset (exact duplicates kept once), sorted by F1 then F2, ...
std::vector<ParetoPoint> nondominated_filter(std::vector<ParetoPoint> points);

/// Number of points in `points` dominated by some point of `by`.
long count_dominated(const std::vector<ParetoPoint>& points, const std::vector<ParetoPoint>& by);

struct ParetoSweep {
  Algorithm algorithm = Algorithm::Rmpgm;
  std::vector<ParetoPoint> all;
  std::vector<ParetoPoint> front;
};

/// Runs `algo` from n_starts uniform sphere points drawn from (seed, kStartStream + start).
ParetoSweep pareto_sweep(const Instance& inst, Algorithm algo, const ExperimentConfig& cfg, std::uint64_t seed);

void write_front_csv(std::ostream& os, const std::vector<ParetoPoint>& front);
/// Two-axis scatter (F1 vs F2) of one or more labelled point sets.
void write_front_svg(std::ostream& os, const std::vector<std::pair<std::string, std::vector<ParetoPoint>>>& series);

}  // namespace riemopt::bench
