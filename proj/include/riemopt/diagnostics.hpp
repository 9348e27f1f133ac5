#pragma once

// Verification oracles shared by the tests and the `check` command. Every
// check is deterministic given its seed and never mutates its inputs.

#include <cstdint>
#include <string>
#include <vector>

#include "riemopt/algorithms.hpp"
#include "riemopt/manifold.hpp"
#include "riemopt/objectives.hpp"

namespace riemopt {

struct CheckReport {
  std::string name;
  bool passed = true;
  double worst_violation = 0.0;
  long samples = 0;
  double tolerance = 0.0;
  /// Input out of scope for the check (reported as passed with 0 samples).
  bool skipped = false;
  std::string detail;

  std::string to_text() const;
  static std::string csv_header();
  std::string to_csv() const;
};

/// passed <=> worst_violation <= tolerance.
CheckReport make_report(std::string name, double worst_violation, long samples, double tolerance,
                        std::string detail = {});

// --- oracles -------------------------------------------------------------

/// <grad f(x), d> against (f(R_x(td)) - f(R_x(-td))) / 2t, t = 1e-6, unit d;
/// relative error with the denominator floored at 1.
CheckReport fd_gradient_check(const SmoothTerm& term, const Manifold& M, int n_samples, double tol,
                              std::uint64_t seed = 0);
/// g((u+v)/2) <= (g(u)+g(v))/2 on random pairs (half of them sparse).
CheckReport convexity_check(const NonsmoothTerm& g, Eigen::Index n, int n_samples, double tol, std::uint64_t seed = 0);
/// g(w) >= g(v) + <s, w - v> for s = subgradient(v).
CheckReport subgradient_check(const NonsmoothTerm& g, Eigen::Index n, int n_samples, double tol,
                              std::uint64_t seed = 0);
/// u = prox(v, tau) satisfies g(w) >= g(u) + <(v-u)/tau, w-u>.
CheckReport prox_check(const NonsmoothTerm& g, Eigen::Index n, int n_samples, double tol, std::uint64_t seed = 0);

// --- geometry --------------------------------------------------------------

/// R_x(0) = x exactly and ||R_x(t z) - x - t z|| = o(t) over t in {1e-3,1e-4,1e-5};
/// the violation is the largest ratio err(t/10) / err(t) minus 0.5 (superlinear
/// decay gives ratios near 0.01), plus any error at t = 0.
CheckReport retraction_axiom_check(const Manifold& M, int n_samples, std::uint64_t seed = 0);
/// DR_x(eta)[zeta] against central differences of the retraction, t = 1e-6.
CheckReport d_retract_fd_check(const Manifold& M, int n_samples, double tol, std::uint64_t seed = 0);
/// |<DR[zeta], xi> - <zeta, DR^*[xi]>| on random pairs.
CheckReport adjoint_pairing_check(const Manifold& M, int n_samples, double tol, std::uint64_t seed = 0);
/// ||DR^*[(DR^*)^{-1} xi] - xi|| and ||DR^{-1}[DR zeta] - zeta||.
CheckReport adjoint_inverse_roundtrip_check(const Manifold& M, int n_samples, double tol, std::uint64_t seed = 0);
/// Closed-form transports against the generic restricted-basis route.
CheckReport transport_consistency_check(const Manifold& M, int n_samples, double tol, std::uint64_t seed = 0);
/// For a smooth ambient field V: ||P_y V(y) - (DR_x(eta)^*)^{-1} P_x V(x)|| decreases
/// monotonically over ||eta|| in {1e-1, 1e-2, 1e-3}.
CheckReport transport_limit_check(const Manifold& M, int n_samples, std::uint64_t seed = 0);

/// Largest observed curvature 2 (f_i(R_x(eta)) - f_i(x) - <grad f_i(x), eta>) / ||eta||^2
/// over random x and ||eta|| in {1e-3, 1e-2, 1e-1, 0.5, 1}; a measured L for trace checks.
double measure_retraction_smoothness(const CompositeObjective& obj, int n_samples, std::uint64_t seed = 0);

// --- trace properties ------------------------------------------------------

/// F_i(x_k) - F_i(x_{k+1}) >= beta_k ||eta_k||^2 and >= 0 on every accepted step;
/// violations are measured relative to max(1, |F_i(x_k)|). Skips RMSD traces.
CheckReport descent_trace_check(const RunResult& r, const std::vector<double>& beta_certificates, double tol = 1e-10);
CheckReport descent_trace_check(const RunResult& r, double tol = 1e-10);
/// Partial sums of ||eta_k||^2 over accepted steps <= min_i (F_i(x_0) - F_i(x_K)) / beta.
CheckReport square_summability_check(const RunResult& r, double beta, double tol = 1e-10);
/// First k with ||eta_k|| <= eps satisfies k <= min_i (F_i(x_0) - F_i(x_K)) / (beta eps^2).
CheckReport iteration_bound_check(const RunResult& r, double beta, double eps);

/// sigma_k <= max(sigma_0, tau3 L / (1 - s2)).
CheckReport tr_sigma_bound_check(const RunResult& r, const TrustRegionParams& tp, double smoothness_bound);
/// Longest run of unsuccessful iterations <= ceil(log_tau2(sigma_max / sigma_min)).
CheckReport tr_unsuccessful_run_check(const RunResult& r, const TrustRegionParams& tp, double smoothness_bound);
/// rho_k >= s2 whenever sigma_k >= L / (1 - s2).
CheckReport tr_very_successful_check(const RunResult& r, const TrustRegionParams& tp, double smoothness_bound);
/// -m_x(eta_k) >= (sigma_k / 2) ||eta_k||^2 on every evaluated iteration. Only
/// guaranteed when the model is strongly convex in eta (Euclidean space); on the
/// sphere g_i(R_x(eta)) is not convex in eta.
CheckReport tr_predicted_reduction_check(const RunResult& r, double tol = 1e-12);
/// sigma bound, unsuccessful-run bound and very-successful check, combined.
CheckReport tr_trace_check(const RunResult& r, const TrustRegionParams& tp, double smoothness_bound);

}  // namespace riemopt
