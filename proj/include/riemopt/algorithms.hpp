#pragma once

// Outer loops: proximal gradient (exact and inexact steps), the trust-region
// variant with adaptive regularization, and a subgradient steepest-descent
// baseline. All runs are single-threaded and deterministic.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "riemopt/manifold.hpp"
#include "riemopt/objectives.hpp"
#include "riemopt/subproblem.hpp"

namespace riemopt {

enum class Algorithm { Rmpgm, Inexact, TrustRegion, Rmsd };
const char* to_string(Algorithm a);
/// Parses "rmpgm", "inexact", "tr", "rmsd".
std::optional<Algorithm> parse_algorithm(const std::string& s);

struct TrustRegionParams {
  /// Initial penalty; <= 0 means "use the resolved Ltilde_init".
  double sigma0 = 0.0;
  double sigma_min = 1e-6;
  double tau1 = 0.5;
  double tau2 = 2.0;
  double tau3 = 4.0;
  double s1 = 0.1;
  double s2 = 0.75;

  /// Throws InvalidArgument unless 0<tau1<1<tau2<=tau3, 0<s1<s2<1, sigma_min>0.
  void validate() const;
};

struct SolverConfig {
  int max_iter = 500;
  /// Stop once ||eta_k|| <= tol.
  double tol = 1e-4;
  /// Initial Ltilde (and sigma_0 for TR unless tr.sigma0 is set); <= 0 means
  /// the objectives' largest Lipschitz hint. Backtracking raises it as needed.
  double Ltilde_init = 1.0;
  bool backtracking = true;
  double growth = 2.0;
  /// Initial smoothness reference Lhat for the backtracking certificate.
  /// Unset means 0: Lhat is then the largest curvature
  /// 2 (f_i(R_x(eta)) - f_i(x) - <grad f_i(x), eta>) / ||eta||^2 observed so far.
  std::optional<double> smoothness_estimate;
  /// Forcing sequence of the inexact variant.
  std::function<double(int)> eps_schedule = [](int k) { return 1.0 / (k + 1.0); };
  TrustRegionParams tr;
  /// Overrides the objective's retraction when set.
  std::optional<RetractionKind> retraction;
  std::uint64_t seed = 0;
  InnerSolverConfig inner;
  /// Record wall-clock time per iteration (zeros otherwise, for byte-stable traces).
  bool timing = true;

  void validate() const;
};

struct IterationRecord {
  int k = 0;
  Eigen::VectorXd F_values;
  double eta_norm = 0.0;
  /// Ltilde_k for the proximal gradient family, sigma_k for TR, alpha_k for RMSD.
  double param = 0.0;
  std::optional<double> rho;
  bool accepted = false;
  std::int64_t wall_nanos = 0;
  /// -m_x(eta) (TR) or -p_x(eta) (proximal gradient), i.e. the model decrease.
  double model_decrease = 0.0;
  /// Certified descent constant of an accepted proximal-gradient step.
  double beta = 0.0;
  int inner_iters = 0;
};

enum class RunStatus { Converged, MaxIter, Stalled };
const char* to_string(RunStatus s);

struct RunResult {
  Algorithm algorithm = Algorithm::Rmpgm;
  std::vector<IterationRecord> trace;
  Point final_point;
  RunStatus status = RunStatus::MaxIter;
  /// Number of outer iterations performed (index of the last record).
  int iterations = 0;
  int successful = 0;
  int unsuccessful = 0;
  /// Per accepted step: the beta with F_i(x_k) - F_i(x_{k+1}) >= beta ||eta_k||^2.
  std::vector<double> beta_certificates;
  long total_inner_iters = 0;
  /// Terminal smoothness reference (proximal gradient family).
  double smoothness_estimate = 0.0;
  double wall_seconds = 0.0;
  std::string message;

  /// min over beta_certificates (0 if there are none).
  double certified_beta() const;
  bool converged() const { return status == RunStatus::Converged; }
};

RunResult rmpgm_run(const CompositeObjective& obj, const Point& x0, const SolverConfig& cfg);
RunResult inexact_rmpgm_run(const CompositeObjective& obj, const Point& x0, const SolverConfig& cfg);
RunResult tr_rmpgm_run(const CompositeObjective& obj, const Point& x0, const SolverConfig& cfg);
RunResult rmsd_run(const CompositeObjective& obj, const Point& x0, const SolverConfig& cfg);
RunResult run_algorithm(Algorithm a, const CompositeObjective& obj, const Point& x0, const SolverConfig& cfg);

/// Steepest-descent direction for the subgradient baseline:
/// argmin_d max_i <grad f_i(x) + P_x(subgrad g_i(x)), d> + ||d||^2 / 2.
Tangent rmsd_direction(const CompositeObjective& obj, const Point& x, const InnerSolverConfig& cfg = {});

/// max over y in reference_set of min_i (F_i(x) - F_i(y)).
double merit_u0_estimate(const CompositeObjective& obj, const Point& x, const std::vector<Point>& reference_set);

/// Ergodic merit ubar_k for k = 1..K, given F(x_0..x_K) and F at the
/// reference points: ubar_k = max_y (1/k) sum_{s<k} min_i (F_i(x_{s+1}) - F_i(y)).
std::vector<double> ergodic_merit(const std::vector<Eigen::VectorXd>& iterate_F,
                                  const std::vector<Eigen::VectorXd>& reference_F);

/// F values of the accepted iterates x_0, x_1, ... from a trace.
std::vector<Eigen::VectorXd> accepted_iterates_F(const RunResult& r);

/// Trace CSV: k,F1..Fm,eta_norm,param,rho,accepted,wall_nanos (LF endings).
void write_trace_csv(std::ostream& os, const RunResult& r);
/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace riemopt
