#pragma once

// `riemopt` command line: gen, run, pareto, check, table.

#include <cstdint>
#include <vector>

#include "riemopt/bench/instance.hpp"
#include "riemopt/diagnostics.hpp"

namespace riemopt::bench {

/// Exit codes: 0 success, 1 usage or validation error, 2 runtime failure
/// (including a failed diagnostic in `check`).
int cli_main(int argc, char** argv);

/// Diagnostics run by `check`: oracle checks on the instance's terms, geometry
/// checks on the sphere (both retractions) and Euclidean space, and trace
/// checks on one RMPGM and one TR run from the seeded start.
std::vector<CheckReport> run_check_suite(const Instance& inst, const SolverConfig& solver, std::uint64_t seed);

}  // namespace riemopt::bench
