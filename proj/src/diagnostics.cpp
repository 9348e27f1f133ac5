#include "riemopt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riemopt/random.hpp"

namespace riemopt {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string CheckReport::to_text() const {
  std::ostringstream os;
  os << (skipped ? "SKIP" : (passed ? "PASS" : "FAIL")) << "  " << name << "  worst=" << format_double(worst_violation)
     << "  tol=" << format_double(tolerance) << "  samples=" << samples;
  if (!detail.empty()) os << "  (" << detail << ")";
  return os.str();
}

std::string CheckReport::csv_header() { return "name,passed,worst_violation,tolerance,samples,skipped,detail"; }

std::string CheckReport::to_csv() const {
  std::string d = detail;
  std::replace(d.begin(), d.end(), ',', ';');
  std::ostringstream os;
  os << name << ',' << (passed ? 1 : 0) << ',' << format_double(worst_violation) << ',' << format_double(tolerance)
     << ',' << samples << ',' << (skipped ? 1 : 0) << ',' << d;
  return os.str();
}

CheckReport make_report(std::string name, double worst_violation, long samples, double tolerance, std::string detail) {
  CheckReport r;
  r.name = std::move(name);
  r.worst_violation = std::isnan(worst_violation) ? std::numeric_limits<double>::infinity() : worst_violation;
  r.samples = samples;
  r.tolerance = tolerance;
  r.passed = r.worst_violation <= tolerance;
  r.detail = std::move(detail);
  return r;
}

namespace {

CheckReport skipped_report(std::string name, std::string why) {
  CheckReport r = make_report(std::move(name), 0.0, 0, 0.0, std::move(why));
  r.skipped = true;
  return r;
}

Point random_point(const Manifold& M, CounterRng& rng) { return M.point(rng.normal_vector(M.dim())); }

Tangent random_tangent(const Manifold& M, const Point& x, CounterRng& rng, double norm) {
  VectorXd v = M.project_tangent(x, rng.normal_vector(M.dim())).vec();
  const double nv = v.norm();
  if (nv > 0.0) v *= norm / nv;
  return Tangent(x, v);
}

// Random ambient vector with roughly half of the coordinates set to zero, so
// the kinks of separable nonsmooth terms are exercised.
VectorXd kinked_vector(Index n, CounterRng& rng) {
  VectorXd v = rng.normal_vector(n);
  if (rng.uniform() < 0.5)
    for (Index i = 0; i < n; ++i)
      if (rng.uniform() < 0.5) v[i] = 0.0;
  return v;
}

double max_abs(const VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

CheckReport fd_gradient_check(const SmoothTerm& term, const Manifold& M, int n_samples, double tol,
                              std::uint64_t seed) {
  CounterRng rng(seed, 101);
  constexpr double t = 1e-6;
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Point x = random_point(M, rng);
    const Tangent d = random_tangent(M, x, rng, 1.0);
    const double analytic = M.project_tangent(x, term.ambient_gradient(x.coords())).vec().dot(d.vec());
    const double fp = term.value(M.retract(Tangent(x, t * d.vec())).coords());
    const double fm = term.value(M.retract(Tangent(x, -t * d.vec())).coords());
    const double fd = (fp - fm) / (2.0 * t);
    worst = std::max(worst, std::abs(fd - analytic) / std::max(1.0, std::abs(analytic)));
  }
  return make_report("fd_gradient", worst, n_samples, tol);
}

CheckReport convexity_check(const NonsmoothTerm& g, Index n, int n_samples, double tol, std::uint64_t seed) {
  CounterRng rng(seed, 102);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const VectorXd u = kinked_vector(n, rng), v = kinked_vector(n, rng);
    worst = std::max(worst, g.value(0.5 * (u + v)) - 0.5 * (g.value(u) + g.value(v)));
  }
  return make_report("convexity", worst, n_samples, tol);
}

CheckReport subgradient_check(const NonsmoothTerm& g, Index n, int n_samples, double tol, std::uint64_t seed) {
  CounterRng rng(seed, 103);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const VectorXd v = kinked_vector(n, rng), w = kinked_vector(n, rng);
    const VectorXd sg = g.subgradient(v);
    worst = std::max(worst, g.value(v) + sg.dot(w - v) - g.value(w));
  }
  return make_report("subgradient_inequality", worst, n_samples, tol);
}

CheckReport prox_check(const NonsmoothTerm& g, Index n, int n_samples, double tol, std::uint64_t seed) {
  CounterRng rng(seed, 104);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const VectorXd v = kinked_vector(n, rng);
    const double tau = 0.05 + 2.0 * rng.uniform();
    const VectorXd u = g.prox(v, tau);
    const VectorXd sg = (v - u) / tau;
    for (int j = 0; j < 4; ++j) {
      const VectorXd w = j == 0 ? VectorXd::Zero(n) : kinked_vector(n, rng);
      worst = std::max(worst, g.value(u) + sg.dot(w - u) - g.value(w));
    }
  }
  return make_report("prox_optimality", worst, n_samples, tol);
}

CheckReport retraction_axiom_check(const Manifold& M, int n_samples, std::uint64_t seed) {
  CounterRng rng(seed, 105);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Point x = random_point(M, rng);
    const Tangent z = random_tangent(M, x, rng, 0.5 + rng.uniform());
    worst = std::max(worst, max_abs(M.retract(M.zero(x)).coords() - x.coords()) * 1e12);
    double prev = -1.0;
    for (double t : {1e-3, 1e-4, 1e-5}) {
      const double err = (M.retract(Tangent(x, t * z.vec())).coords() - x.coords() - t * z.vec()).norm();
      if (prev > 1e-300 && err > 1e-15) worst = std::max(worst, err / prev);
      prev = err;
    }
  }
  return make_report("retraction_axioms", worst, n_samples, 0.05, "max err(t/10)/err(t); quadratic decay gives 0.01");
}

CheckReport d_retract_fd_check(const Manifold& M, int n_samples, double tol, std::uint64_t seed) {
  CounterRng rng(seed, 106);
  constexpr double t = 1e-6;
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Point x = random_point(M, rng);
    const Tangent eta = random_tangent(M, x, rng, 1.2 * rng.uniform());
    const Tangent zeta = random_tangent(M, x, rng, 1.0);
    const VectorXd an = M.d_retract(eta, zeta).vec();
    const VectorXd fd = (M.retract(Tangent(x, eta.vec() + t * zeta.vec())).coords() -
                         M.retract(Tangent(x, eta.vec() - t * zeta.vec())).coords()) /
                        (2.0 * t);
    worst = std::max(worst, (fd - an).norm() / std::max(1.0, an.norm()));
  }
  return make_report("d_retract_fd", worst, n_samples, tol);
}

CheckReport adjoint_pairing_check(const Manifold& M, int n_samples, double tol, std::uint64_t seed) {
  CounterRng rng(seed, 107);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Point x = random_point(M, rng);
    const Tangent eta = random_tangent(M, x, rng, 1.2 * rng.uniform());
    const Point y = M.retract(eta);
    const Tangent zeta = random_tangent(M, x, rng, 1.0);
    const Tangent xi = random_tangent(M, y, rng, 1.0);
    const double lhs = M.d_retract(eta, zeta).vec().dot(xi.vec());
    const double rhs = zeta.vec().dot(M.d_retract_adjoint(eta, xi).vec());
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return make_report("adjoint_pairing", worst, n_samples, tol);
}

CheckReport adjoint_inverse_roundtrip_check(const Manifold& M, int n_samples, double tol, std::uint64_t seed) {
  CounterRng rng(seed, 108);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Point x = random_point(M, rng);
    const Tangent eta = random_tangent(M, x, rng, 1.2 * rng.uniform());
    const Point y = M.retract(eta);
    const Tangent nu = random_tangent(M, x, rng, 1.0);
    const Tangent back = M.d_retract_adjoint(eta, M.d_retract_adjoint_inverse(eta, nu));
    worst = std::max(worst, (back.vec() - nu.vec()).norm());
    const Tangent zeta = random_tangent(M, x, rng, 1.0);
    const Tangent again = M.d_retract_inverse(eta, M.d_retract(eta, zeta));
    worst = std::max(worst, (again.vec() - zeta.vec()).norm());
    const Tangent xi = random_tangent(M, y, rng, 1.0);
    const Tangent fwd = M.d_retract(eta, M.d_retract_inverse(eta, xi));
    worst = std::max(worst, (fwd.vec() - xi.vec()).norm());
  }
  return make_report("adjoint_inverse_roundtrip", worst, n_samples, tol);
}

CheckReport transport_consistency_check(const Manifold& M, int n_samples, double tol, std::uint64_t seed) {
  CounterRng rng(seed, 109);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Point x = random_point(M, rng);
    const Tangent eta = random_tangent(M, x, rng, 1.2 * rng.uniform());
    const Point y = M.retract(eta);
    const Tangent zeta = random_tangent(M, x, rng, 1.0);
    const Tangent xi = random_tangent(M, y, rng, 1.0);
    worst = std::max(worst, (M.d_retract(eta, zeta).vec() - M.d_retract_generic(eta, zeta).vec()).norm());
    worst = std::max(worst,
                     (M.d_retract_adjoint(eta, xi).vec() - M.d_retract_adjoint_generic(eta, xi).vec()).norm());
    worst = std::max(worst, (M.d_retract_adjoint_inverse(eta, zeta).vec() -
                             M.d_retract_adjoint_inverse_generic(eta, zeta).vec())
                                .norm());
    worst = std::max(worst,
                     (M.d_retract_inverse(eta, xi).vec() - M.d_retract_inverse_generic(eta, xi).vec()).norm());
  }
  return make_report("transport_closed_vs_generic", worst, n_samples, tol);
}

CheckReport transport_limit_check(const Manifold& M, int n_samples, std::uint64_t seed) {
  CounterRng rng(seed, 110);
  const Index n = M.dim();
  double worst = 0.0;
  long evaluated = 0;
  for (int s = 0; s < n_samples; ++s) {
    // Smooth ambient field V(z) = B z + c, restricted to tangent spaces.
    MatrixXd B(n, n);
    for (Index i = 0; i < B.size(); ++i) B.data()[i] = rng.normal();
    const VectorXd c = rng.normal_vector(n);
    const Point x = random_point(M, rng);
    const Tangent u = random_tangent(M, x, rng, 1.0);
    const Tangent vx = M.project_tangent(x, B * x.coords() + c);
    double prev = std::numeric_limits<double>::infinity();
    for (double h : {1e-1, 1e-2, 1e-3}) {
      const Tangent eta(x, h * u.vec());
      const Point y = M.retract(eta);
      const VectorXd vy = M.project_tangent(y, B * y.coords() + c).vec();
      const double err = (vy - M.d_retract_adjoint_inverse(eta, vx).vec()).norm();
      if (err > prev) worst = std::max(worst, err - prev);
      prev = err;
      ++evaluated;
    }
  }
  return make_report("transport_limit", worst, evaluated, 0.0, "error must shrink with ||eta||");
}

double measure_retraction_smoothness(const CompositeObjective& obj, int n_samples, std::uint64_t seed) {
  const Manifold& M = obj.manifold();
  CounterRng rng(seed, 117);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Point x = random_point(M, rng);
    const std::vector<Tangent> grads = obj.riemannian_grads(x);
    for (double len : {1e-3, 1e-2, 1e-1, 0.5, 1.0}) {
      const Tangent eta = random_tangent(M, x, rng, len);
      const Point y = M.retract(eta);
      for (std::size_t i = 0; i < obj.size(); ++i) {
        const double c = obj.smooth_value(i, y) - obj.smooth_value(i, x) - inner(grads[i], eta);
        worst = std::max(worst, 2.0 * c / (len * len));
      }
    }
  }
  return worst;
}

// --- trace properties ------------------------------------------------------

CheckReport descent_trace_check(const RunResult& r, const std::vector<double>& beta_certificates, double tol) {
  const char* name = "descent_certificates";
  if (r.algorithm == Algorithm::Rmsd) return skipped_report(name, "subgradient baseline is not a descent method");
  double worst = 0.0;
  long samples = 0;
  std::size_t b = 0;
  for (std::size_t j = 0; j + 1 < r.trace.size(); ++j) {
    const IterationRecord& rec = r.trace[j];
    if (!rec.accepted) continue;
    if (b >= beta_certificates.size())
      return make_report(name, std::numeric_limits<double>::infinity(), samples, tol, "missing beta certificate");
    const double beta = beta_certificates[b++];
    const VectorXd dF = rec.F_values - r.trace[j + 1].F_values;
    const double scale = std::max(1.0, max_abs(rec.F_values));
    const double need = std::max(0.0, beta) * rec.eta_norm * rec.eta_norm;
    for (Index i = 0; i < dF.size(); ++i) worst = std::max(worst, (need - dF[i]) / scale);
    worst = std::max(worst, -dF.minCoeff() / scale);
    ++samples;
  }
  return make_report(name, std::max(0.0, worst), samples, tol);
}

CheckReport descent_trace_check(const RunResult& r, double tol) {
  return descent_trace_check(r, r.beta_certificates, tol);
}

CheckReport square_summability_check(const RunResult& r, double beta, double tol) {
  const char* name = "square_summability";
  if (r.trace.size() < 2) return make_report(name, 0.0, 0, tol, "single iterate");
  if (!(beta > 0.0)) return make_report(name, std::numeric_limits<double>::infinity(), 0, tol, "beta must be > 0");
  const VectorXd total = r.trace.front().F_values - r.trace.back().F_values;
  const double budget = total.minCoeff();
  double sum = 0.0, worst = 0.0;
  long samples = 0;
  for (const IterationRecord& rec : r.trace) {
    if (!rec.accepted) continue;
    sum += rec.eta_norm * rec.eta_norm;
    worst = std::max(worst, beta * sum - budget);
    ++samples;
  }
  const double scale = std::max(1.0, max_abs(r.trace.front().F_values));
  std::ostringstream d;
  d << "sum=" << format_double(sum) << " bound=" << format_double(budget / beta);
  return make_report(name, worst / scale, samples, tol, d.str());
}

CheckReport iteration_bound_check(const RunResult& r, double beta, double eps) {
  const char* name = "iteration_bound";
  if (!(beta > 0.0)) return make_report(name, std::numeric_limits<double>::infinity(), 0, 0.0, "beta must be > 0");
  if (r.trace.empty()) return make_report(name, 0.0, 0, 0.0, "empty trace");
  const auto it = std::find_if(r.trace.begin(), r.trace.end(), [&](const IterationRecord& rec) {
    return rec.eta_norm <= eps;
  });
  if (it == r.trace.end()) return skipped_report(name, "eps never reached");
  const double budget = (r.trace.front().F_values - r.trace.back().F_values).minCoeff();
  const double bound = budget / (beta * eps * eps);
  std::ostringstream d;
  d << "k=" << it->k << " bound=" << format_double(bound);
  return make_report(name, std::max(0.0, it->k - bound), 1, 0.0, d.str());
}

namespace {

double sigma_max(const RunResult& r, const TrustRegionParams& tp, double L) {
  const double sigma0 = r.trace.empty() ? 0.0 : r.trace.front().param;
  return std::max(sigma0, tp.tau3 * L / (1.0 - tp.s2));
}

}  // namespace

CheckReport tr_sigma_bound_check(const RunResult& r, const TrustRegionParams& tp, double smoothness_bound) {
  const double smax = sigma_max(r, tp, smoothness_bound);
  double worst = 0.0;
  for (const IterationRecord& rec : r.trace) worst = std::max(worst, (rec.param - smax) / smax);
  return make_report("tr_sigma_bound", std::max(0.0, worst), static_cast<long>(r.trace.size()), 1e-12,
                     "sigma_max=" + format_double(smax));
}

CheckReport tr_unsuccessful_run_check(const RunResult& r, const TrustRegionParams& tp, double smoothness_bound) {
  const double smax = sigma_max(r, tp, smoothness_bound);
  const double bound = std::ceil(std::log(smax / tp.sigma_min) / std::log(tp.tau2));
  long run = 0, longest = 0;
  for (const IterationRecord& rec : r.trace) {
    if (rec.rho && !rec.accepted) {
      longest = std::max(longest, ++run);
    } else {
      run = 0;
    }
  }
  return make_report("tr_unsuccessful_run", std::max(0.0, static_cast<double>(longest) - bound),
                     static_cast<long>(r.trace.size()), 0.0,
                     "longest=" + std::to_string(longest) + " bound=" + format_double(bound));
}

CheckReport tr_very_successful_check(const RunResult& r, const TrustRegionParams& tp, double smoothness_bound) {
  const double threshold = smoothness_bound / (1.0 - tp.s2);
  double worst = 0.0;
  long samples = 0;
  for (const IterationRecord& rec : r.trace) {
    if (!rec.rho || rec.param < threshold) continue;
    worst = std::max(worst, tp.s2 - *rec.rho);
    ++samples;
  }
  return make_report("tr_very_successful", worst, samples, 0.0);
}

CheckReport tr_predicted_reduction_check(const RunResult& r, double tol) {
  double worst = 0.0;
  long samples = 0;
  for (const IterationRecord& rec : r.trace) {
    if (!rec.rho) continue;
    const double need = 0.5 * rec.param * rec.eta_norm * rec.eta_norm;
    worst = std::max(worst, (need - rec.model_decrease) / std::max(1.0, need));
    ++samples;
  }
  return make_report("tr_predicted_reduction", worst, samples, tol);
}

CheckReport tr_trace_check(const RunResult& r, const TrustRegionParams& tp, double smoothness_bound) {
  if (r.algorithm != Algorithm::TrustRegion) return skipped_report("tr_trace", "not a trust-region trace");
  const CheckReport parts[] = {tr_sigma_bound_check(r, tp, smoothness_bound),
                               tr_unsuccessful_run_check(r, tp, smoothness_bound),
                               tr_very_successful_check(r, tp, smoothness_bound)};
  CheckReport out;
  out.name = "tr_trace";
  out.samples = static_cast<long>(r.trace.size());
  for (const CheckReport& p : parts) {
    out.worst_violation = std::max(out.worst_violation, p.worst_violation);
    if (!p.passed) {
      out.passed = false;
      out.detail += (out.detail.empty() ? "" : "; ") + p.name + " failed";
    }
  }
  return out;
}

}  // namespace riemopt
