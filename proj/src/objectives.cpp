#include "riemopt/objectives.hpp"

#include <cmath>

#include "riemopt/random.hpp"

namespace riemopt {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

NonsmoothTerm::NonsmoothTerm(std::shared_ptr<const ConvexBase> base, double weight)
    : base_(std::move(base)), weight_(weight) {
  if (!base_) throw Error(ErrorCode::InvalidArgument, "nonsmooth term without a base function");
  if (!(weight_ >= 0.0) || !std::isfinite(weight_))
    throw Error(ErrorCode::InvalidArgument, "nonsmooth term weight must be finite and >= 0");
}

double NonsmoothTerm::value(const VectorXd& v) const {
  return weight_ == 0.0 ? 0.0 : weight_ * base_->value(v);
}

VectorXd NonsmoothTerm::subgradient(const VectorXd& v) const {
  if (weight_ == 0.0) return VectorXd::Zero(v.size());
  return weight_ * base_->subgradient(v);
}

VectorXd NonsmoothTerm::prox(const VectorXd& v, double tau) const {
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "prox step must be positive");
  if (weight_ == 0.0) return v;
  return base_->prox(v, tau * weight_);
}

double NonsmoothTerm::lipschitz_const(Index n) const { return weight_ * base_->lipschitz(n); }

namespace {

std::shared_ptr<const ConvexBase> l1_base() {
  static const auto base = std::make_shared<const ConvexBase>(ConvexBase{
      "l1",
      [](const VectorXd& v) { return v.lpNorm<1>(); },
      [](const VectorXd& v) {
        return v.unaryExpr([](double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }).eval();
      },
      [](const VectorXd& v, double tau) {
        return v.unaryExpr([tau](double t) {
                  const double mag = std::abs(t) - tau;
                  return mag > 0.0 ? std::copysign(mag, t) : 0.0;
                })
            .eval();
      },
      [](Index n) { return std::sqrt(static_cast<double>(n)); },
  });
  return base;
}

}  // namespace

NonsmoothTerm make_l1(double lambda) {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "l1 weight must be >= 0");
  return NonsmoothTerm(l1_base(), lambda);
}

NonsmoothTerm make_zero_nonsmooth() { return NonsmoothTerm(l1_base(), 0.0); }

NonsmoothTerm make_custom_nonsmooth(ConvexBase base) {
  return NonsmoothTerm(std::make_shared<const ConvexBase>(std::move(base)), 1.0);
}

double power_iteration_lambda_max(const MatrixXd& sym, double tol, int max_iter) {
  const Index n = sym.rows();
  if (n == 0 || sym.cols() != n) throw Error(ErrorCode::DimensionMismatch, "power iteration needs a square matrix");
  CounterRng rng(0x5eed, 0);
  VectorXd v = rng.normal_vector(n).normalized();
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    VectorXd w = sym * v;
    const double next = v.dot(w);
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    v = w / nrm;
    if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) return next;
    lambda = next;
  }
  return lambda;
}

SmoothTerm make_least_squares(MatrixXd A, VectorXd b) {
  if (A.rows() != b.size()) throw Error(ErrorCode::DimensionMismatch, "least squares: rows(A) != size(b)");
  const double hint = power_iteration_lambda_max(A.transpose() * A);
  auto shared = std::make_shared<const std::pair<MatrixXd, VectorXd>>(std::move(A), std::move(b));
  return SmoothTerm{
      [shared](const VectorXd& x) { return 0.5 * (shared->first * x - shared->second).squaredNorm(); },
      [shared](const VectorXd& x) -> VectorXd {
        return shared->first.transpose() * (shared->first * x - shared->second);
      },
      hint,
  };
}

SmoothTerm make_quadratic(MatrixXd Q, VectorXd center) {
  if (Q.rows() != Q.cols() || Q.rows() != center.size())
    throw Error(ErrorCode::DimensionMismatch, "quadratic: Q must be square and match the center");
  const double hint = power_iteration_lambda_max(Q);
  auto shared = std::make_shared<const std::pair<MatrixXd, VectorXd>>(std::move(Q), std::move(center));
  return SmoothTerm{
      [shared](const VectorXd& x) {
        const VectorXd d = x - shared->second;
        return 0.5 * d.dot(shared->first * d);
      },
      [shared](const VectorXd& x) -> VectorXd { return shared->first * (x - shared->second); },
      hint,
  };
}

SmoothTerm make_linear(VectorXd a, double offset) {
  auto shared = std::make_shared<const VectorXd>(std::move(a));
  return SmoothTerm{
      [shared, offset](const VectorXd& x) { return shared->dot(x) + offset; },
      [shared](const VectorXd&) -> VectorXd { return *shared; },
      0.0,
  };
}

CompositeObjective::CompositeObjective(Manifold manifold, std::vector<std::pair<SmoothTerm, NonsmoothTerm>> terms)
    : manifold_(std::move(manifold)), terms_(std::move(terms)) {
  if (terms_.empty()) throw Error(ErrorCode::InvalidArgument, "composite objective needs m >= 1 terms");
  for (const auto& [f, g] : terms_) {
    if (!f.value || !f.ambient_gradient) throw Error(ErrorCode::InvalidArgument, "smooth term is missing an oracle");
    if (!g.shares_base_with(terms_.front().second)) shared_base_ = false;
  }
}

const SmoothTerm& CompositeObjective::smooth(std::size_t i) const {
  if (i >= terms_.size()) throw Error(ErrorCode::IndexOutOfRange, "objective index " + std::to_string(i));
  return terms_[i].first;
}

const NonsmoothTerm& CompositeObjective::nonsmooth(std::size_t i) const {
  if (i >= terms_.size()) throw Error(ErrorCode::IndexOutOfRange, "objective index " + std::to_string(i));
  return terms_[i].second;
}

VectorXd CompositeObjective::eval_F(const Point& x) const {
  VectorXd out(static_cast<Index>(terms_.size()));
  for (std::size_t i = 0; i < terms_.size(); ++i)
    out[static_cast<Index>(i)] = terms_[i].first.value(x.coords()) + terms_[i].second.value(x.coords());
  return out;
}

double CompositeObjective::smooth_value(std::size_t i, const Point& x) const { return smooth(i).value(x.coords()); }

Tangent CompositeObjective::riemannian_grad_f(std::size_t i, const Point& x) const {
  const VectorXd g = smooth(i).ambient_gradient(x.coords());
  if (g.size() != manifold_.dim()) throw Error(ErrorCode::DimensionMismatch, "gradient oracle returned wrong size");
  return manifold_.project_tangent(x, g);
}

std::vector<Tangent> CompositeObjective::riemannian_grads(const Point& x) const {
  std::vector<Tangent> grads;
  grads.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) grads.push_back(riemannian_grad_f(i, x));
  return grads;
}

std::optional<double> CompositeObjective::max_lipschitz_hint() const {
  double best = 0.0;
  for (const auto& t : terms_) {
    if (!t.first.lipschitz_hint) return std::nullopt;
    best = std::max(best, *t.first.lipschitz_hint);
  }
  return best;
}

CompositeObjective CompositeObjective::with_manifold(Manifold manifold) const {
  if (manifold.dim() != manifold_.dim()) throw Error(ErrorCode::DimensionMismatch, "with_manifold: dimension changed");
  CompositeObjective copy = *this;
  copy.manifold_ = std::move(manifold);
  return copy;
}

}  // namespace riemopt
