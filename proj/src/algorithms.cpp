#include "riemopt/algorithms.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

namespace riemopt {

using Eigen::Index;
using Eigen::VectorXd;

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Rmpgm: return "rmpgm";
    case Algorithm::Inexact: return "inexact";
    case Algorithm::TrustRegion: return "tr";
    case Algorithm::Rmsd: return "rmsd";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(const std::string& s) {
  for (Algorithm a : {Algorithm::Rmpgm, Algorithm::Inexact, Algorithm::TrustRegion, Algorithm::Rmsd})
    if (s == to_string(a)) return a;
  return std::nullopt;
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIter: return "max_iter";
    case RunStatus::Stalled: return "stalled";
  }
  return "unknown";
}

void TrustRegionParams::validate() const {
  if (!(0.0 < tau1 && tau1 < 1.0 && 1.0 < tau2 && tau2 <= tau3))
    throw Error(ErrorCode::InvalidArgument, "trust region: need 0 < tau1 < 1 < tau2 <= tau3");
  if (!(0.0 < s1 && s1 < s2 && s2 < 1.0)) throw Error(ErrorCode::InvalidArgument, "trust region: need 0 < s1 < s2 < 1");
  if (!(sigma_min > 0.0)) throw Error(ErrorCode::InvalidArgument, "trust region: sigma_min must be positive");
  if (sigma0 > 0.0 && !(sigma0 > sigma_min))
    throw Error(ErrorCode::InvalidArgument, "trust region: sigma0 must exceed sigma_min");
}

void SolverConfig::validate() const {
  if (max_iter < 0) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 0");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be >= 0");
  if (!(growth > 1.0)) throw Error(ErrorCode::InvalidArgument, "backtracking growth must exceed 1");
  if (!(inner.tol_kkt > 0.0)) throw Error(ErrorCode::InvalidArgument, "inner tol_kkt must be positive");
  if (!(inner.armijo_sigma > 0.0 && inner.armijo_sigma < 1.0))
    throw Error(ErrorCode::InvalidArgument, "armijo sigma must lie in (0,1)");
  tr.validate();
}

double RunResult::certified_beta() const {
  if (beta_certificates.empty()) return 0.0;
  return *std::min_element(beta_certificates.begin(), beta_certificates.end());
}

namespace {

using Clock = std::chrono::steady_clock;

class Runner {
 public:
  Runner(Algorithm algo, const CompositeObjective& obj, const Point& x0, const SolverConfig& cfg)
      : obj_(cfg.retraction ? obj.with_manifold(obj.manifold().with_retraction(*cfg.retraction)) : obj),
        M_(obj_.manifold()), cfg_(cfg), start_(Clock::now()) {
    cfg.validate();
    if (x0.dim() != M_.dim()) throw Error(ErrorCode::DimensionMismatch, "x0 has the wrong dimension");
    if (!M_.contains(x0, 1e-10)) throw Error(ErrorCode::InvalidArgument, "x0 is not on the manifold");
    result_.algorithm = algo;
    x_ = x0;
    Fx_ = evaluate(x_);
    const auto hint = obj_.max_lipschitz_hint();
    const double h = hint && *hint > 0.0 ? *hint : 1.0;
    Ltilde0_ = cfg.Ltilde_init > 0.0 ? cfg.Ltilde_init : h;
    Lhat_ = cfg.smoothness_estimate.value_or(0.0);
  }

  RunResult proximal_gradient(bool inexact) {
    double Ltilde = Ltilde0_;
    for (int k = 0;; ++k) {
      const auto grads = obj_.riemannian_grads(x_);
      InnerSolverConfig inner = cfg_.inner;
      if (inexact) inner.inexact_epsilon = std::max(0.0, cfg_.eps_schedule(k));
      for (;;) {
        if (cfg_.backtracking && !(Ltilde > Lhat_)) {
          Ltilde = std::max(Ltilde * cfg_.growth, Lhat_ * (1.0 + 1e-12));
          continue;
        }
        const SubproblemSolution sol = solve_proximal_mapping(obj_, x_, grads, Ltilde, inner);
        result_.total_inner_iters += sol.inner_iters;
        const double nrm = sol.eta.norm();
        IterationRecord rec = base_record(k, nrm, Ltilde, sol.inner_iters);
        rec.model_decrease = -sol.p_value;
        if (stop_check(rec, k)) return finish();

        const Point y = M_.retract(sol.eta);
        const VectorXd Fy = evaluate(y);
        const double sq = nrm * nrm;
        double beta;
        if (cfg_.backtracking) {
          for (std::size_t i = 0; i < obj_.size(); ++i) {
            const double curv = obj_.smooth_value(i, y) - obj_.smooth_value(i, x_) - grads[i].vec().dot(sol.eta.vec());
            Lhat_ = std::max(Lhat_, 2.0 * curv / sq);
          }
          beta = 0.5 * (Ltilde - Lhat_);
          const bool ok = beta > 0.0 && ((Fx_ - Fy).array() >= beta * sq).all();
          if (!ok) {
            Ltilde *= cfg_.growth;
            if (!std::isfinite(Ltilde)) return stall("backtracking diverged");
            continue;
          }
        } else {
          beta = (Fx_ - Fy).minCoeff() / sq;
        }
        rec.accepted = true;
        rec.beta = beta;
        result_.beta_certificates.push_back(beta);
        result_.trace.push_back(std::move(rec));
        x_ = y;
        Fx_ = Fy;
        break;
      }
    }
  }

  RunResult trust_region() {
    const TrustRegionParams& tp = cfg_.tr;
    double sigma = tp.sigma0 > 0.0 ? tp.sigma0 : std::max(Ltilde0_, 2.0 * tp.sigma_min);
    std::vector<Tangent> grads = obj_.riemannian_grads(x_);
    for (int k = 0;; ++k) {
      const SubproblemSolution sol = solve_proximal_mapping(obj_, x_, grads, sigma, cfg_.inner);
      result_.total_inner_iters += sol.inner_iters;
      const double nrm = sol.eta.norm();
      IterationRecord rec = base_record(k, nrm, sigma, sol.inner_iters);
      rec.model_decrease = -sol.p_value;
      if (stop_check(rec, k)) return finish();
      if (!(rec.model_decrease > 0.0)) return stall("nonpositive predicted reduction");

      const Point y = M_.retract(sol.eta);
      const VectorXd Fy = evaluate(y);
      const double rho = (Fx_ - Fy).minCoeff() / rec.model_decrease;
      rec.rho = rho;
      rec.accepted = rho >= tp.s1;
      if (rec.accepted) {
        ++result_.successful;
        rec.beta = tp.s1 * rec.model_decrease / (nrm * nrm);
        result_.beta_certificates.push_back(rec.beta);
      } else {
        ++result_.unsuccessful;
      }
      result_.trace.push_back(std::move(rec));
      if (rho >= tp.s2)
        sigma = std::max(tp.sigma_min, tp.tau1 * sigma);
      else if (rho < tp.s1)
        sigma = tp.tau2 * sigma;
      if (result_.trace.back().accepted) {
        x_ = y;
        Fx_ = Fy;
        grads = obj_.riemannian_grads(x_);
      }
    }
  }

  RunResult subgradient_descent() {
    for (int k = 0;; ++k) {
      const Tangent d = rmsd_direction(obj_, x_, cfg_.inner);
      const double alpha = 1.0 / std::sqrt(k + 1.0);
      IterationRecord rec = base_record(k, d.norm(), alpha, 1);
      result_.total_inner_iters += 1;
      if (stop_check(rec, k)) return finish();
      rec.accepted = true;
      result_.trace.push_back(std::move(rec));
      x_ = M_.retract(Tangent(x_, alpha * d.vec()));
      Fx_ = evaluate(x_);
    }
  }

 private:
  VectorXd evaluate(const Point& x) const {
    VectorXd F = obj_.eval_F(x);
    if (!F.allFinite()) throw Error(ErrorCode::NonFiniteObjective, "objective returned a non-finite value");
    return F;
  }

  IterationRecord base_record(int k, double eta_norm, double param, int inner) const {
    IterationRecord rec;
    rec.k = k;
    rec.F_values = Fx_;
    rec.eta_norm = eta_norm;
    rec.param = param;
    rec.inner_iters = inner;
    if (cfg_.timing)
      rec.wall_nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start_).count();
    return rec;
  }

  // Records the terminal iterate when the run ends at iteration k.
  bool stop_check(IterationRecord& rec, int k) {
    if (rec.eta_norm <= cfg_.tol) {
      result_.status = RunStatus::Converged;
    } else if (k >= cfg_.max_iter) {
      result_.status = RunStatus::MaxIter;
    } else {
      return false;
    }
    result_.iterations = k;
    result_.trace.push_back(std::move(rec));
    return true;
  }

  RunResult stall(const char* why) {
    result_.status = RunStatus::Stalled;
    result_.message = why;
    IterationRecord rec = base_record(static_cast<int>(result_.trace.size()), 0.0, 0.0, 0);
    rec.eta_norm = std::numeric_limits<double>::quiet_NaN();
    result_.iterations = rec.k;
    result_.trace.push_back(std::move(rec));
    return finish();
  }

  RunResult finish() {
    result_.final_point = x_;
    result_.smoothness_estimate = Lhat_;
    if (cfg_.timing) result_.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return std::move(result_);
  }

  CompositeObjective obj_;
  const Manifold& M_;
  const SolverConfig& cfg_;
  Clock::time_point start_;
  RunResult result_;
  Point x_;
  VectorXd Fx_;
  double Ltilde0_ = 1.0;
  double Lhat_ = 0.0;
};

}  // namespace

RunResult rmpgm_run(const CompositeObjective& obj, const Point& x0, const SolverConfig& cfg) {
  return Runner(Algorithm::Rmpgm, obj, x0, cfg).proximal_gradient(false);
}

RunResult inexact_rmpgm_run(const CompositeObjective& obj, const Point& x0, const SolverConfig& cfg) {
  return Runner(Algorithm::Inexact, obj, x0, cfg).proximal_gradient(true);
}

RunResult tr_rmpgm_run(const CompositeObjective& obj, const Point& x0, const SolverConfig& cfg) {
  return Runner(Algorithm::TrustRegion, obj, x0, cfg).trust_region();
}

RunResult rmsd_run(const CompositeObjective& obj, const Point& x0, const SolverConfig& cfg) {
  return Runner(Algorithm::Rmsd, obj, x0, cfg).subgradient_descent();
}

RunResult run_algorithm(Algorithm a, const CompositeObjective& obj, const Point& x0, const SolverConfig& cfg) {
  switch (a) {
    case Algorithm::Rmpgm: return rmpgm_run(obj, x0, cfg);
    case Algorithm::Inexact: return inexact_rmpgm_run(obj, x0, cfg);
    case Algorithm::TrustRegion: return tr_rmpgm_run(obj, x0, cfg);
    case Algorithm::Rmsd: return rmsd_run(obj, x0, cfg);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm");
}

Tangent rmsd_direction(const CompositeObjective& obj, const Point& x, const InnerSolverConfig& cfg) {
  const Manifold& M = obj.manifold();
  TransferredProblem prob;
  prob.y = x;
  prob.Ltilde = 1.0;
  prob.smooth_only = true;
  prob.offsets = VectorXd::Zero(static_cast<Index>(obj.size()));
  for (std::size_t i = 0; i < obj.size(); ++i) {
    prob.indices.push_back(i);
    const VectorXd zeta = obj.nonsmooth(i).subgradient(x.coords());
    prob.w.push_back(obj.riemannian_grad_f(i, x).vec() + M.project_tangent(x, zeta).vec());
  }
  return solve_minimax(obj, prob, cfg).xi;
}

double merit_u0_estimate(const CompositeObjective& obj, const Point& x, const std::vector<Point>& reference_set) {
  if (reference_set.empty()) throw Error(ErrorCode::InvalidArgument, "merit estimate needs a reference point");
  const VectorXd Fx = obj.eval_F(x);
  double best = -std::numeric_limits<double>::infinity();
  for (const Point& y : reference_set) best = std::max(best, (Fx - obj.eval_F(y)).minCoeff());
  return best;
}

std::vector<double> ergodic_merit(const std::vector<VectorXd>& iterate_F, const std::vector<VectorXd>& reference_F) {
  if (reference_F.empty()) throw Error(ErrorCode::InvalidArgument, "ergodic merit needs a reference point");
  std::vector<double> out;
  std::vector<double> sums(reference_F.size(), 0.0);
  for (std::size_t k = 1; k < iterate_F.size(); ++k) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < reference_F.size(); ++j) {
      sums[j] += (iterate_F[k] - reference_F[j]).minCoeff();
      best = std::max(best, sums[j] / static_cast<double>(k));
    }
    out.push_back(best);
  }
  return out;
}

std::vector<VectorXd> accepted_iterates_F(const RunResult& r) {
  std::vector<VectorXd> out;
  if (r.trace.empty()) return out;
  out.push_back(r.trace.front().F_values);
  for (std::size_t j = 0; j + 1 < r.trace.size(); ++j)
    if (r.trace[j].accepted) out.push_back(r.trace[j + 1].F_values);
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const RunResult& r) {
  const Index m = r.trace.empty() ? 0 : r.trace.front().F_values.size();
  os << "k";
  for (Index i = 0; i < m; ++i) os << ",F" << (i + 1);
  os << ",eta_norm,param,rho,accepted,wall_nanos\n";
  for (const IterationRecord& rec : r.trace) {
    os << rec.k;
    for (Index i = 0; i < m; ++i) os << ',' << format_double(rec.F_values[i]);
    os << ',' << format_double(rec.eta_norm) << ',' << format_double(rec.param) << ',';
    if (rec.rho) os << format_double(*rec.rho);
    os << ',' << (rec.accepted ? 1 : 0) << ',' << rec.wall_nanos << '\n';
  }
}

}  // namespace riemopt
