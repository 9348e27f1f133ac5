#pragma once

// Composite vector objectives F_i = f_i + g_i with f_i smooth and g_i convex.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "riemopt/manifold.hpp"

namespace riemopt {

/// Smooth term f_i, evaluated through its ambient extension.
struct SmoothTerm {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> ambient_gradient;
  /// Upper estimate of the gradient's Lipschitz constant, if known.
  std::optional<double> lipschitz_hint;
};

/// A unit-weight convex function on R^n with subgradient and prox oracles.
/// Nonsmooth terms are positive multiples of a shared base, so a weighted sum
/// of terms with the same base has an exact prox.
struct ConvexBase {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> subgradient;
  /// argmin_u h(u) + ||u - v||^2 / (2 tau)
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double tau)> prox;
  /// Lipschitz constant of h on R^n.
  std::function<double(Eigen::Index n)> lipschitz;
};

class NonsmoothTerm {
 public:
  NonsmoothTerm(std::shared_ptr<const ConvexBase> base, double weight);

  double value(const Eigen::VectorXd& v) const;
  Eigen::VectorXd subgradient(const Eigen::VectorXd& v) const;
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double tau) const;
  double lipschitz_const(Eigen::Index n) const;

  double weight() const { return weight_; }
  const ConvexBase& base() const { return *base_; }
  bool shares_base_with(const NonsmoothTerm& other) const { return base_ == other.base_; }

 private:
  std::shared_ptr<const ConvexBase> base_;
  double weight_;
};

/// lambda * ||x||_1 with the minimal-norm subgradient (0 at zero coordinates).
NonsmoothTerm make_l1(double lambda);
/// g = 0, the same base as make_l1 so it combines exactly with L1 terms.
NonsmoothTerm make_zero_nonsmooth();
/// A standalone convex term; it never shares a base with another term.
NonsmoothTerm make_custom_nonsmooth(ConvexBase base);

/// f(x) = 0.5 ||A x - b||^2; lipschitz_hint = lambda_max(A^T A).
SmoothTerm make_least_squares(Eigen::MatrixXd A, Eigen::VectorXd b);
/// f(x) = 0.5 (x - c)^T Q (x - c) with Q symmetric PSD; lipschitz_hint = lambda_max(Q).
SmoothTerm make_quadratic(Eigen::MatrixXd Q, Eigen::VectorXd center);
/// f(x) = <a, x> + offset.
SmoothTerm make_linear(Eigen::VectorXd a, double offset = 0.0);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration_lambda_max(const Eigen::MatrixXd& sym, double tol = 1e-8, int max_iter = 10000);

class CompositeObjective {
 public:
  CompositeObjective(Manifold manifold, std::vector<std::pair<SmoothTerm, NonsmoothTerm>> terms);

  const Manifold& manifold() const { return manifold_; }
  Eigen::Index dim() const { return manifold_.dim(); }
  std::size_t size() const { return terms_.size(); }

  const SmoothTerm& smooth(std::size_t i) const;
  const NonsmoothTerm& nonsmooth(std::size_t i) const;

  Eigen::VectorXd eval_F(const Point& x) const;
  double smooth_value(std::size_t i, const Point& x) const;
  Tangent riemannian_grad_f(std::size_t i, const Point& x) const;
  std::vector<Tangent> riemannian_grads(const Point& x) const;

  /// True when every nonsmooth term is a multiple of one base function.
  bool nonsmooth_share_base() const { return shared_base_; }
  /// max_i lipschitz_hint, or nullopt if any term lacks a hint.
  std::optional<double> max_lipschitz_hint() const;

  CompositeObjective with_manifold(Manifold manifold) const;

 private:
  Manifold manifold_;
  std::vector<std::pair<SmoothTerm, NonsmoothTerm>> terms_;
  bool shared_base_ = true;
};

}  // namespace riemopt
