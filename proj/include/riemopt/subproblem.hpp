#pragma once

// The Riemannian proximal-mapping subproblem
//
//   min_{eta in T_x M}  p_x(eta) = psi_x(eta) + (Ltilde/2) ||eta||^2,
//   psi_x(eta) = max_i <grad f_i(x), eta> + g_i(R_x(eta)) - g_i(x),
//
// solved by repeatedly transferring it to the tangent space at y = R_x(eta)
// where the nonsmooth terms are evaluated in ambient coordinates and stay
// convex, followed by an Armijo step on the exact objective.

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "riemopt/manifold.hpp"
#include "riemopt/objectives.hpp"

namespace riemopt {

enum class SimplexSolver { Auto, DualBisection, MirrorDescent };

/// How the fixed-weight inner problem over T_y M is solved.
enum class InnerMethod {
  Auto,
  /// Exact prox of the weighted nonsmooth sum restricted to the affine slice
  /// y + T_y M, via a scalar root on the normal multiplier. Needs all
  /// nonsmooth terms to share one base function.
  HyperplaneMultiplier,
  /// ADMM-style consensus splitting between the tangent-space quadratic step
  /// and the per-term ambient proxes. Works for arbitrary terms.
  Splitting,
};

/// Which objectives enter the transferred model at y_k.
enum class TransferredModel {
  /// All objectives, each shifted by its gap to the current max of psi.
  AllWithOffsets,
  /// Only the indices attaining the max of psi (within active_set_tol).
  ActiveSet,
};

struct InnerSolverConfig {
  /// Outer loop stops once ||xi*_k|| <= tol_kkt.
  double tol_kkt = 1e-8;
  /// Target duality gap of each transferred minimax solve.
  double tol_gap = 1e-12;
  int max_outer = 200;
  /// Iteration cap of the simplex search when it is iterative (mirror ascent).
  int max_inner = 2000;
  double armijo_sigma = 1e-4;
  double armijo_min_step = 1e-12;
  SimplexSolver simplex_solver = SimplexSolver::Auto;
  InnerMethod inner_method = InnerMethod::Auto;
  TransferredModel model = TransferredModel::AllWithOffsets;
  double active_set_tol = 1e-8;
  int splitting_max_iter = 20000;
  /// When > 0, stop as soon as the assembled KKT residual v satisfies
  /// ||v|| <= inexact_epsilon * ||eta|| with p(eta) <= 0.
  double inexact_epsilon = 0.0;
};

enum class SolveStatus { Converged, InexactAccepted, MaxIterExceeded, ArmijoStall };
const char* to_string(SolveStatus s);

/// One transferred minimax problem at y:
///   min_{xi in T_y M} max_{k} [offsets_k + <w_k, xi> + g_{i_k}(y + xi) - g_{i_k}(y)] + (Ltilde/2)||xi||^2
struct TransferredProblem {
  Point y;
  std::vector<std::size_t> indices;
  std::vector<Eigen::VectorXd> w;  ///< tangent at y, one per entry of indices
  Eigen::VectorXd offsets;         ///< one per entry of indices
  double Ltilde = 1.0;
  /// Drop the nonsmooth terms (g = 0 structure).
  bool smooth_only = false;
};

struct TransferredSolution {
  Tangent xi;
  /// Simplex weights, length m; zero outside the participating indices.
  Eigen::VectorXd lambda;
  /// Ambient subgradients zeta_i in dg_i(y + xi), length m.
  std::vector<Eigen::VectorXd> subgradients;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool max_iter_exceeded = false;
};

struct SubproblemSolution {
  Tangent eta;
  Eigen::VectorXd lambda;
  /// ||xi*|| of the last transferred solve.
  double kkt_residual = 0.0;
  /// Norm of the assembled KKT vector at eta (see kkt_residual_check).
  double stationarity_residual = 0.0;
  double p_value = 0.0;
  int inner_iters = 0;
  std::vector<std::size_t> active_set;
  std::vector<Eigen::VectorXd> subgradients;
  double duality_gap = 0.0;
  SolveStatus status = SolveStatus::Converged;
  /// l_x(eta_k) after every accepted inner step, starting with l_x(0) = 0.
  std::vector<double> ell_trace;
};

/// Per-objective model values <grad f_i(x), eta> + g_i(R_x(eta)) - g_i(x).
Eigen::VectorXd model_components(const CompositeObjective& obj, const std::vector<Tangent>& grads,
                                 const Tangent& eta);

double psi(const CompositeObjective& obj, const Point& x, const Tangent& eta);
double p_eval(const CompositeObjective& obj, const Point& x, const Tangent& eta, double Ltilde);

/// Solves one transferred minimax problem.
TransferredSolution solve_minimax(const CompositeObjective& obj, const TransferredProblem& prob,
                                  const InnerSolverConfig& cfg);

/// Builds and solves the transferred problem at y = R_x(eta_cur).
TransferredSolution solve_transferred(const CompositeObjective& obj, const Point& x, const Tangent& eta_cur,
                                      double Ltilde, const InnerSolverConfig& cfg);

SubproblemSolution solve_proximal_mapping(const CompositeObjective& obj, const Point& x, double Ltilde,
                                          const InnerSolverConfig& cfg = {});
/// Same, with the Riemannian gradients at x precomputed.
SubproblemSolution solve_proximal_mapping(const CompositeObjective& obj, const Point& x,
                                          const std::vector<Tangent>& grads, double Ltilde,
                                          const InnerSolverConfig& cfg);

/// sum_i lambda_i grad f_i(x) + Ltilde eta + sum_i lambda_i DR_x(eta)^*[P_y zeta_i].
/// zeta_i are the subgradients recorded in sol (the prox certificates at the
/// last transferred point); when sol carries none, g_i's subgradient oracle at
/// y = R_x(eta) is used.
Tangent kkt_vector(const CompositeObjective& obj, const Point& x, const SubproblemSolution& sol, double Ltilde);
double kkt_residual_check(const CompositeObjective& obj, const Point& x, const SubproblemSolution& sol,
                          double Ltilde);

struct BruteForceResult {
  Tangent eta;
  double p_value = 0.0;
  bool boundary_hit = false;
  long evaluations = 0;
};

/// Exhaustive grid minimization of p over the tangent ball of radius
/// grid_radius, followed by a shrinking pattern search. Tangent dimension <= 3.
BruteForceResult brute_force_oracle(const CompositeObjective& obj, const Point& x, double Ltilde, double grid_radius,
                                    double grid_step);

}  // namespace riemopt
