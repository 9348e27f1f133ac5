#include "riemopt/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include <boost/math/tools/roots.hpp>

namespace riemopt {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::InexactAccepted: return "inexact_accepted";
    case SolveStatus::MaxIterExceeded: return "max_iter_exceeded";
    case SolveStatus::ArmijoStall: return "armijo_stall";
  }
  return "unknown";
}

VectorXd model_components(const CompositeObjective& obj, const std::vector<Tangent>& grads, const Tangent& eta) {
  const Point& x = eta.base();
  const Point y = obj.manifold().retract(eta);
  VectorXd comps(static_cast<Index>(obj.size()));
  for (std::size_t i = 0; i < obj.size(); ++i) {
    const NonsmoothTerm& g = obj.nonsmooth(i);
    comps[static_cast<Index>(i)] = grads[i].vec().dot(eta.vec()) + g.value(y.coords()) - g.value(x.coords());
  }
  return comps;
}

double psi(const CompositeObjective& obj, const Point& x, const Tangent& eta) {
  if (!eta.base().same_as(x)) throw Error(ErrorCode::BaseMismatch, "psi: eta is not based at x");
  return model_components(obj, obj.riemannian_grads(x), eta).maxCoeff();
}

double p_eval(const CompositeObjective& obj, const Point& x, const Tangent& eta, double Ltilde) {
  if (!(Ltilde > 0.0)) throw Error(ErrorCode::InvalidArgument, "p_eval: Ltilde must be positive");
  return psi(obj, x, eta) + 0.5 * Ltilde * eta.vec().squaredNorm();
}

namespace {

constexpr int kRootMaxIter = 200;

template <class F>
double monotone_root(F&& f, double lo, double hi, double f_lo, double f_hi) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  std::uintmax_t iters = kRootMaxIter;
  const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi,
                                                         boost::math::tools::eps_tolerance<double>(52), iters);
  const double a = bracket.first, b = bracket.second;
  if (a == b) return a;
  const double fa = f(a), fb = f(b);
  if (fa == fb) return 0.5 * (a + b);
  const double s = a - fa * (b - a) / (fb - fa);
  return std::clamp(s, std::min(a, b), std::max(a, b));
}

// Minimizer of the mu-weighted transferred objective for fixed simplex weights.
struct FixedWeight {
  VectorXd xi;
  VectorXd comps;  // offsets_k + <w_k, xi> + g(y + xi) - g(y), per participating k
  double quad = 0.0;
  std::vector<VectorXd> zetas;  // per participating k, in dg(y + xi)
  bool inexact = false;

  double primal() const { return comps.maxCoeff() + quad; }
  double dual(const VectorXd& mu) const { return mu.dot(comps) + quad; }
};

class MinimaxSolver {
 public:
  MinimaxSolver(const CompositeObjective& obj, const TransferredProblem& prob, const InnerSolverConfig& cfg)
      : obj_(obj), prob_(prob), cfg_(cfg), M_(obj.manifold()), y_(prob.y.coords()),
        K_(static_cast<Index>(prob.indices.size())) {
    if (K_ == 0) throw Error(ErrorCode::InvalidArgument, "transferred problem without objectives");
    if (static_cast<Index>(prob.w.size()) != K_ || prob.offsets.size() != K_)
      throw Error(ErrorCode::DimensionMismatch, "transferred problem: w/offsets do not match indices");
    if (!(prob.Ltilde > 0.0)) throw Error(ErrorCode::InvalidArgument, "transferred problem: Ltilde must be positive");
    g_at_y_.resize(K_);
    for (Index k = 0; k < K_; ++k) g_at_y_[k] = prob.smooth_only ? 0.0 : term(k).value(y_);
    method_ = cfg.inner_method;
    if (prob.smooth_only) {
      method_ = InnerMethod::HyperplaneMultiplier;
    } else if (method_ == InnerMethod::Auto) {
      method_ = obj.nonsmooth_share_base() ? InnerMethod::HyperplaneMultiplier : InnerMethod::Splitting;
    } else if (method_ == InnerMethod::HyperplaneMultiplier && !obj.nonsmooth_share_base()) {
      throw Error(ErrorCode::InvalidArgument, "hyperplane inner method needs nonsmooth terms with a shared base");
    }
  }

  TransferredSolution solve() {
    VectorXd mu;
    FixedWeight fw;
    bool exceeded = false;
    int iters = 0;
    if (K_ == 1) {
      mu = VectorXd::Ones(1);
      fw = fixed(mu);
      iters = 1;
    } else {
      SimplexSolver method = cfg_.simplex_solver;
      if (method == SimplexSolver::Auto) method = K_ == 2 ? SimplexSolver::DualBisection : SimplexSolver::MirrorDescent;
      if (method == SimplexSolver::DualBisection && K_ != 2)
        throw Error(ErrorCode::InvalidArgument, "dual bisection supports exactly two objectives");
      if (method == SimplexSolver::DualBisection)
        std::tie(mu, fw, iters) = bisect();
      else
        std::tie(mu, fw, iters, exceeded) = mirror_ascent();
    }

    TransferredSolution out;
    out.xi = Tangent(prob_.y, fw.xi);
    out.lambda = VectorXd::Zero(static_cast<Index>(obj_.size()));
    out.subgradients.resize(obj_.size());
    const VectorXd z = y_ + fw.xi;
    for (std::size_t i = 0; i < obj_.size(); ++i) out.subgradients[i] = obj_.nonsmooth(i).subgradient(z);
    for (Index k = 0; k < K_; ++k) {
      out.lambda[static_cast<Index>(prob_.indices[k])] = mu[k];
      if (!prob_.smooth_only) out.subgradients[prob_.indices[k]] = fw.zetas[k];
    }
    out.primal = fw.primal();
    out.dual = fw.dual(mu);
    out.gap = std::max(0.0, out.primal - out.dual);
    out.iterations = iters;
    out.max_iter_exceeded = exceeded || fw.inexact;
    return out;
  }

 private:
  const NonsmoothTerm& term(Index k) const { return obj_.nonsmooth(prob_.indices[k]); }
  bool sphere() const { return M_.geometry() == Geometry::Sphere; }

  VectorXd project(const VectorXd& v) const { return sphere() ? VectorXd(v - y_.dot(v) * y_) : v; }

  void finish(FixedWeight& fw) const {
    const double L = prob_.Ltilde;
    fw.quad = 0.5 * L * fw.xi.squaredNorm();
    fw.comps.resize(K_);
    const VectorXd z = y_ + fw.xi;
    for (Index k = 0; k < K_; ++k) {
      double c = prob_.offsets[k] + prob_.w[k].dot(fw.xi);
      if (!prob_.smooth_only) c += term(k).value(z) - g_at_y_[k];
      fw.comps[k] = c;
    }
  }

  FixedWeight fixed(const VectorXd& mu) const {
    return method_ == InnerMethod::Splitting ? fixed_splitting(mu) : fixed_hyperplane(mu);
  }

  // argmin over z in {<y,z> = 1} (sphere) or R^n of lam*h(z) + (L/2)||z - c||^2,
  // c = y - wbar/L, through the scalar multiplier of the affine constraint.
  FixedWeight fixed_hyperplane(const VectorXd& mu) const {
    const double L = prob_.Ltilde;
    VectorXd wbar = VectorXd::Zero(y_.size());
    double lam = 0.0;
    for (Index k = 0; k < K_; ++k) {
      if (mu[k] == 0.0) continue;
      wbar += mu[k] * prob_.w[k];
      if (!prob_.smooth_only) lam += mu[k] * term(k).weight();
    }
    const VectorXd c = y_ - wbar / L;
    const double tau = lam / L;
    const ConvexBase* base = prob_.smooth_only ? nullptr : &term(0).base();
    auto prox = [&](const VectorXd& v) -> VectorXd { return tau > 0.0 ? base->prox(v, tau) : v; };

    double s = 0.0;
    if (sphere() && tau > 0.0) {
      auto h = [&](double t) { return y_.dot(prox(c - t * y_)) - 1.0; };
      const double B = tau * y_.lpNorm<1>() * (1.0 + 1e-12) + std::numeric_limits<double>::min();
      s = monotone_root(h, -B, B, h(-B), h(B));
    }
    const VectorXd v = c - s * y_;
    const VectorXd z = prox(v);

    FixedWeight fw;
    fw.xi = project(z - y_);
    finish(fw);
    if (!prob_.smooth_only) {
      fw.zetas.resize(K_);
      VectorXd unit;
      if (tau > 0.0)
        unit = (v - z) / tau;
      else
        unit = base->subgradient(z);
      for (Index k = 0; k < K_; ++k) fw.zetas[k] = term(k).weight() * unit;
    }
    return fw;
  }

  // Consensus splitting: xi in T_y, copies z_k = y + xi for every weighted term.
  FixedWeight fixed_splitting(const VectorXd& mu) const {
    const double L = prob_.Ltilde;
    const double rho = L;
    const Index n = y_.size();
    VectorXd wbar = VectorXd::Zero(n);
    std::vector<Index> active;
    for (Index k = 0; k < K_; ++k) {
      wbar += mu[k] * prob_.w[k];
      if (mu[k] > 0.0 && term(k).weight() > 0.0) active.push_back(k);
    }
    FixedWeight fw;
    if (active.empty()) {
      fw.xi = project(-wbar / L);
      finish(fw);
      fw.zetas.resize(K_);
      for (Index k = 0; k < K_; ++k) fw.zetas[k] = term(k).subgradient(y_ + fw.xi);
      return fw;
    }
    const double J = static_cast<double>(active.size());
    std::vector<VectorXd> z(active.size(), y_), u(active.size(), VectorXd::Zero(n));
    VectorXd xi = VectorXd::Zero(n);
    const double scale = 1.0 + y_.norm() + wbar.norm() / L;
    bool converged = false;
    for (int it = 0; it < cfg_.splitting_max_iter; ++it) {
      VectorXd r = VectorXd::Zero(n);
      for (std::size_t j = 0; j < active.size(); ++j) r += z[j] - u[j] - y_;
      xi = project((-wbar + rho * r) / (L + J * rho));
      double primal_res = 0.0, dual_res = 0.0;
      for (std::size_t j = 0; j < active.size(); ++j) {
        const Index k = active[j];
        const VectorXd znew = term(k).prox(y_ + xi + u[j], mu[k] / rho);
        dual_res += (znew - z[j]).squaredNorm();
        z[j] = znew;
        const VectorXd gap = y_ + xi - z[j];
        u[j] += gap;
        primal_res += gap.squaredNorm();
      }
      if (std::sqrt(primal_res) <= 1e-13 * scale && rho * std::sqrt(dual_res) <= 1e-13 * scale * L) {
        converged = true;
        break;
      }
    }
    fw.xi = xi;
    fw.inexact = !converged;
    finish(fw);
    fw.zetas.resize(K_);
    const VectorXd zc = y_ + xi;
    for (Index k = 0; k < K_; ++k) fw.zetas[k] = term(k).subgradient(zc);
    for (std::size_t j = 0; j < active.size(); ++j) {
      const Index k = active[j];
      fw.zetas[k] = rho * u[j] / mu[k];
    }
    return fw;
  }

  std::tuple<VectorXd, FixedWeight, int> bisect() const {
    int evals = 0;
    auto weights = [](double t) {
      VectorXd mu(2);
      mu << t, 1.0 - t;
      return mu;
    };
    auto slope = [&](double t) {
      ++evals;
      const FixedWeight fw = fixed(weights(t));
      return fw.comps[0] - fw.comps[1];
    };
    const double d1 = slope(1.0);
    if (d1 >= 0.0) return {weights(1.0), fixed(weights(1.0)), evals};
    const double d0 = slope(0.0);
    if (d0 <= 0.0) return {weights(0.0), fixed(weights(0.0)), evals};

    const double t = monotone_root(slope, 0.0, 1.0, d0, d1);
    FixedWeight best = fixed(weights(t));
    VectorXd best_mu = weights(t);
    // The dual derivative must be nonincreasing in t for a convex model.
    const double d_mid = best.comps[0] - best.comps[1];
    const double slack = 1e-8 * (1.0 + std::abs(d0) + std::abs(d1));
    if (d_mid > d0 + slack || d_mid < d1 - slack)
      throw Error(ErrorCode::NonConvexDetected, "dual slope is not monotone; broken oracle?");
    return {best_mu, best, evals};
  }

  std::tuple<VectorXd, FixedWeight, int, bool> mirror_ascent() const {
    VectorXd mu = VectorXd::Constant(K_, 1.0 / static_cast<double>(K_));
    FixedWeight fw = fixed(mu);
    VectorXd best_mu = mu;
    FixedWeight best = fw;
    double best_gap = std::max(0.0, fw.primal() - fw.dual(mu));
    double prev_dual = fw.dual(mu);
    const double spread = fw.comps.maxCoeff() - fw.comps.minCoeff();
    double gamma = 1.0 / std::max(spread, 1e-12);
    int it = 1;
    for (; it < cfg_.max_inner && best_gap > cfg_.tol_gap; ++it) {
      const VectorXd a = fw.comps.array() - fw.comps.maxCoeff();
      VectorXd next = mu.array() * (gamma * a.array()).exp();
      next /= next.sum();
      FixedWeight cand = fixed(next);
      const double dual = cand.dual(next);
      if (dual < prev_dual) {
        gamma *= 0.5;
        if (gamma < 1e-300) break;
        continue;
      }
      gamma *= 1.2;
      mu = next;
      fw = std::move(cand);
      prev_dual = dual;
      const double gap = std::max(0.0, fw.primal() - dual);
      if (gap < best_gap) {
        best_gap = gap;
        best_mu = mu;
        best = fw;
      }
    }
    return {best_mu, best, it, best_gap > cfg_.tol_gap};
  }

  const CompositeObjective& obj_;
  const TransferredProblem& prob_;
  const InnerSolverConfig& cfg_;
  const Manifold& M_;
  const VectorXd& y_;
  Index K_;
  VectorXd g_at_y_;
  InnerMethod method_;
};

TransferredProblem build_transferred(const CompositeObjective& obj, const std::vector<Tangent>& grads,
                                     const Tangent& eta, const VectorXd& comps, double Ltilde,
                                     const InnerSolverConfig& cfg) {
  const Manifold& M = obj.manifold();
  TransferredProblem prob;
  prob.y = M.retract(eta);
  prob.Ltilde = Ltilde;
  const double top = comps.maxCoeff();
  const double tol = cfg.active_set_tol * std::max(1.0, std::abs(top));
  std::vector<double> offsets;
  for (std::size_t i = 0; i < obj.size(); ++i) {
    const double ci = comps[static_cast<Index>(i)];
    if (cfg.model == TransferredModel::ActiveSet && ci < top - tol) continue;
    prob.indices.push_back(i);
    offsets.push_back(cfg.model == TransferredModel::ActiveSet ? 0.0 : ci - top);
    const Tangent shifted(eta.base(), grads[i].vec() + Ltilde * eta.vec());
    prob.w.push_back(M.d_retract_adjoint_inverse(eta, shifted).vec());
  }
  prob.offsets = Eigen::Map<const VectorXd>(offsets.data(), static_cast<Index>(offsets.size()));
  return prob;
}

std::vector<std::size_t> active_indices(const VectorXd& comps, double rel_tol) {
  const double top = comps.maxCoeff();
  const double tol = rel_tol * std::max(1.0, std::abs(top));
  std::vector<std::size_t> out;
  for (Index i = 0; i < comps.size(); ++i)
    if (comps[i] >= top - tol) out.push_back(static_cast<std::size_t>(i));
  return out;
}

}  // namespace

TransferredSolution solve_minimax(const CompositeObjective& obj, const TransferredProblem& prob,
                                  const InnerSolverConfig& cfg) {
  return MinimaxSolver(obj, prob, cfg).solve();
}

TransferredSolution solve_transferred(const CompositeObjective& obj, const Point& x, const Tangent& eta_cur,
                                      double Ltilde, const InnerSolverConfig& cfg) {
  if (!eta_cur.base().same_as(x)) throw Error(ErrorCode::BaseMismatch, "solve_transferred: eta not based at x");
  const auto grads = obj.riemannian_grads(x);
  const VectorXd comps = model_components(obj, grads, eta_cur);
  return solve_minimax(obj, build_transferred(obj, grads, eta_cur, comps, Ltilde, cfg), cfg);
}

SubproblemSolution solve_proximal_mapping(const CompositeObjective& obj, const Point& x, double Ltilde,
                                          const InnerSolverConfig& cfg) {
  return solve_proximal_mapping(obj, x, obj.riemannian_grads(x), Ltilde, cfg);
}

SubproblemSolution solve_proximal_mapping(const CompositeObjective& obj, const Point& x,
                                          const std::vector<Tangent>& grads, double Ltilde,
                                          const InnerSolverConfig& cfg) {
  if (!(Ltilde > 0.0)) throw Error(ErrorCode::InvalidArgument, "solve_proximal_mapping: Ltilde must be positive");
  if (grads.size() != obj.size()) throw Error(ErrorCode::DimensionMismatch, "one gradient per objective expected");
  const Manifold& M = obj.manifold();
  const Index m = static_cast<Index>(obj.size());

  SubproblemSolution sol;
  sol.eta = M.zero(x);
  sol.ell_trace.push_back(0.0);

  bool trivial = true;
  for (std::size_t i = 0; i < obj.size(); ++i)
    if (!grads[i].vec().isZero(0.0) || obj.nonsmooth(i).weight() != 0.0) trivial = false;
  if (trivial) {
    sol.lambda = VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    for (std::size_t i = 0; i < obj.size(); ++i) {
      sol.active_set.push_back(i);
      sol.subgradients.push_back(VectorXd::Zero(M.dim()));
    }
    return sol;
  }

  auto ell = [&](const Tangent& eta, VectorXd* comps_out) {
    VectorXd comps = model_components(obj, grads, eta);
    const double value = comps.maxCoeff() + 0.5 * Ltilde * eta.vec().squaredNorm();
    if (comps_out) *comps_out = std::move(comps);
    return value;
  };

  Tangent eta = sol.eta;
  VectorXd comps = VectorXd::Zero(m);
  double ell_cur = 0.0;
  for (int it = 0;; ++it) {
    const TransferredProblem prob = build_transferred(obj, grads, eta, comps, Ltilde, cfg);
    const TransferredSolution ts = solve_minimax(obj, prob, cfg);
    ++sol.inner_iters;
    sol.lambda = ts.lambda;
    sol.subgradients = ts.subgradients;
    sol.duality_gap = ts.gap;
    const double res = ts.xi.norm();
    sol.kkt_residual = res;
    sol.eta = eta;

    if (res <= cfg.tol_kkt) {
      sol.status = SolveStatus::Converged;
      break;
    }
    if (cfg.inexact_epsilon > 0.0 && ell_cur <= 0.0 && eta.norm() > 0.0) {
      const double v = kkt_vector(obj, x, sol, Ltilde).norm();
      if (v <= cfg.inexact_epsilon * eta.norm()) {
        sol.status = SolveStatus::InexactAccepted;
        break;
      }
    }
    if (it + 1 >= cfg.max_outer) {
      sol.status = SolveStatus::MaxIterExceeded;
      break;
    }

    const VectorXd pull = M.d_retract_inverse(eta, ts.xi).vec();
    double alpha = 1.0;
    bool stalled = false;
    Tangent cand;
    VectorXd cand_comps;
    double cand_ell = 0.0;
    for (;;) {
      cand = Tangent(x, eta.vec() + alpha * pull);
      cand_ell = ell(cand, &cand_comps);
      if (cand_ell <= ell_cur - cfg.armijo_sigma * alpha * res * res) break;
      alpha *= 0.5;
      if (alpha < cfg.armijo_min_step) {
        stalled = true;
        break;
      }
    }
    if (stalled) {
      sol.status = SolveStatus::ArmijoStall;
      break;
    }
    eta = cand;
    comps = std::move(cand_comps);
    ell_cur = cand_ell;
    sol.ell_trace.push_back(ell_cur);
  }

  sol.eta = eta;
  sol.p_value = ell_cur;
  sol.active_set = active_indices(comps, cfg.active_set_tol);
  sol.stationarity_residual = kkt_vector(obj, x, sol, Ltilde).norm();
  return sol;
}

Tangent kkt_vector(const CompositeObjective& obj, const Point& x, const SubproblemSolution& sol, double Ltilde) {
  const Manifold& M = obj.manifold();
  const Tangent& eta = sol.eta;
  if (!eta.base().same_as(x)) throw Error(ErrorCode::BaseMismatch, "kkt_vector: eta not based at x");
  if (sol.lambda.size() != static_cast<Index>(obj.size()))
    throw Error(ErrorCode::DimensionMismatch, "kkt_vector: lambda has the wrong length");
  const Point y = M.retract(eta);
  VectorXd out = Ltilde * eta.vec();
  for (std::size_t i = 0; i < obj.size(); ++i) {
    const double li = sol.lambda[static_cast<Index>(i)];
    if (li == 0.0) continue;
    const VectorXd zeta =
        sol.subgradients.size() == obj.size() ? sol.subgradients[i] : obj.nonsmooth(i).subgradient(y.coords());
    out += li * obj.riemannian_grad_f(i, x).vec();
    out += li * M.d_retract_adjoint(eta, M.project_tangent(y, zeta)).vec();
  }
  return M.project_tangent(x, out);
}

double kkt_residual_check(const CompositeObjective& obj, const Point& x, const SubproblemSolution& sol,
                          double Ltilde) {
  return kkt_vector(obj, x, sol, Ltilde).norm();
}

BruteForceResult brute_force_oracle(const CompositeObjective& obj, const Point& x, double Ltilde, double grid_radius,
                                    double grid_step) {
  const Manifold& M = obj.manifold();
  const Index d = M.tangent_dim();
  if (d > 3) throw Error(ErrorCode::DimensionTooLarge, "brute force oracle supports tangent dimension <= 3");
  if (!(grid_radius > 0.0) || !(grid_step > 0.0))
    throw Error(ErrorCode::InvalidArgument, "brute force oracle needs positive radius and step");
  const MatrixXd basis = M.tangent_basis(x);
  const auto grads = obj.riemannian_grads(x);

  BruteForceResult out;
  auto p_at = [&](const VectorXd& coeffs) {
    ++out.evaluations;
    const Tangent eta(x, basis * coeffs);
    return model_components(obj, grads, eta).maxCoeff() + 0.5 * Ltilde * coeffs.squaredNorm();
  };

  const long steps = static_cast<long>(std::floor(grid_radius / grid_step));
  VectorXd best_c = VectorXd::Zero(d);
  double best = p_at(best_c);
  VectorXd c(d);
  std::vector<long> idx(static_cast<std::size_t>(d), -steps);
  for (;;) {
    for (Index j = 0; j < d; ++j) c[j] = static_cast<double>(idx[static_cast<std::size_t>(j)]) * grid_step;
    if (c.norm() <= grid_radius) {
      const double v = p_at(c);
      if (v < best) {
        best = v;
        best_c = c;
      }
    }
    Index j = 0;
    while (j < d && ++idx[static_cast<std::size_t>(j)] > steps) idx[static_cast<std::size_t>(j++)] = -steps;
    if (j == d) break;
  }
  out.boundary_hit = best_c.norm() >= grid_radius - 1.5 * grid_step;

  // Nested local grids around the incumbent; unlike coordinate search this
  // does not stall on the kinks of the nonsmooth terms.
  constexpr long kHalf = 6;
  std::vector<long> local(static_cast<std::size_t>(d));
  for (double h = grid_step / 4.0; h > 1e-12;) {
    const VectorXd center = best_c;
    const double before = best;
    std::fill(local.begin(), local.end(), -kHalf);
    for (;;) {
      for (Index j = 0; j < d; ++j) c[j] = center[j] + static_cast<double>(local[static_cast<std::size_t>(j)]) * h;
      const double v = p_at(c);
      if (v < best) {
        best = v;
        best_c = c;
      }
      Index j = 0;
      while (j < d && ++local[static_cast<std::size_t>(j)] > kHalf) local[static_cast<std::size_t>(j++)] = -kHalf;
      if (j == d) break;
    }
    if (!(best < before)) h /= 4.0;
  }

  // Lattices cannot follow a kink valley that is oblique to the axes; finish
  // with golden-section line searches along a dense fan of directions.
  std::vector<VectorXd> fan;
  if (d == 1) {
    fan = {VectorXd::Ones(1), -VectorXd::Ones(1)};
  } else if (d == 2) {
    for (int k = 0; k < 3600; ++k) {
      const double a = 2.0 * M_PI * k / 3600.0;
      fan.push_back((VectorXd(2) << std::cos(a), std::sin(a)).finished());
    }
  } else if (d == 3) {
    const int N = 2000;
    const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < N; ++k) {
      const double zc = 1.0 - 2.0 * (k + 0.5) / N, r = std::sqrt(1.0 - zc * zc);
      fan.push_back((VectorXd(3) << r * std::cos(golden_angle * k), r * std::sin(golden_angle * k), zc).finished());
    }
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double reach = grid_step;
  for (int sweep = 0; sweep < 100 && !fan.empty(); ++sweep) {
    const double before = best;
    const VectorXd start = best_c;
    for (const VectorXd& u : fan) {
      const VectorXd origin = best_c;
      if (!(p_at(origin + 1e-3 * reach * u) < best)) continue;
      double lo = 0.0, hi = reach;
      double m1 = hi - inv_phi * (hi - lo), m2 = lo + inv_phi * (hi - lo);
      double f1 = p_at(origin + m1 * u), f2 = p_at(origin + m2 * u);
      while (hi - lo > 1e-13) {
        if (f1 < f2) {
          hi = m2, m2 = m1, f2 = f1;
          m1 = hi - inv_phi * (hi - lo);
          f1 = p_at(origin + m1 * u);
        } else {
          lo = m1, m1 = m2, f1 = f2;
          m2 = lo + inv_phi * (hi - lo);
          f2 = p_at(origin + m2 * u);
        }
      }
      for (double t : {m1, m2}) {
        const VectorXd trial = origin + t * u;
        const double v = p_at(trial);
        if (v < best) {
          best = v;
          best_c = trial;
        }
      }
    }
    if (!(best < before)) break;
    reach = std::max(2.0 * (best_c - start).norm(), 1e-9);
  }
  out.eta = Tangent(x, basis * best_c);
  out.p_value = best;
  return out;
}

}  // namespace riemopt
