#pragma once

// Embedded-submanifold geometry for the unit sphere S^{n-1} and for R^n.
//
// Points and tangent vectors are stored in ambient coordinates. A Tangent
// always carries its base point; operations check that arguments live at the
// base they are documented to live at and throw BaseMismatch otherwise.

#include <memory>

#include <Eigen/Core>

#include "riemopt/error.hpp"

namespace riemopt {

enum class Geometry { Sphere, Euclidean };
enum class RetractionKind { Exponential, Projective };

const char* to_string(Geometry g);
const char* to_string(RetractionKind k);

/// Immutable point on a manifold. Copies share the coordinate buffer.
class Point {
 public:
  Point() = default;
  explicit Point(Eigen::VectorXd coords)
      : coords_(std::make_shared<const Eigen::VectorXd>(std::move(coords))) {}

  const Eigen::VectorXd& coords() const { return *coords_; }
  Eigen::Index dim() const { return coords_ ? coords_->size() : 0; }

  bool same_as(const Point& other) const;

 private:
  std::shared_ptr<const Eigen::VectorXd> coords_;
};

/// Tangent vector in ambient coordinates, paired with its base point.
class Tangent {
 public:
  Tangent() = default;
  Tangent(Point base, Eigen::VectorXd vec) : base_(std::move(base)), vec_(std::move(vec)) {}

  const Point& base() const { return base_; }
  const Eigen::VectorXd& vec() const { return vec_; }
  Eigen::Index dim() const { return vec_.size(); }
  double norm() const { return vec_.norm(); }

 private:
  Point base_;
  Eigen::VectorXd vec_;
};

double inner(const Tangent& a, const Tangent& b);

class Manifold {
 public:
  static Manifold sphere(Eigen::Index n, RetractionKind kind = RetractionKind::Projective);
  static Manifold euclidean(Eigen::Index n);

  Geometry geometry() const { return geometry_; }
  RetractionKind retraction() const { return kind_; }
  Eigen::Index dim() const { return n_; }
  /// Dimension of every tangent space.
  Eigen::Index tangent_dim() const { return geometry_ == Geometry::Sphere ? n_ - 1 : n_; }

  Manifold with_retraction(RetractionKind kind) const;

  /// Builds a point; on the sphere the input is normalized (zero is rejected).
  Point point(Eigen::VectorXd coords) const;
  bool contains(const Point& x, double tol = 1e-12) const;

  Tangent zero(const Point& x) const;
  /// Wraps an ambient vector as a tangent; throws if it is not tangent at x.
  Tangent tangent(const Point& x, Eigen::VectorXd v, double tol = 1e-10) const;
  Tangent project_tangent(const Point& x, const Eigen::VectorXd& v) const;
  bool is_tangent(const Point& x, const Eigen::VectorXd& v, double tol = 1e-10) const;

  Point retract(const Tangent& eta) const;
  Tangent inverse_retract(const Point& x, const Point& y) const;

  /// DR_x(eta)[zeta], a tangent at R_x(eta). zeta must be based at eta's base.
  Tangent d_retract(const Tangent& eta, const Tangent& zeta) const;
  /// DR_x(eta)^*[xi] for xi at R_x(eta); result based at x.
  Tangent d_retract_adjoint(const Tangent& eta, const Tangent& xi) const;
  /// (DR_x(eta)^*)^{-1}[nu] for nu at x; result based at R_x(eta).
  Tangent d_retract_adjoint_inverse(const Tangent& eta, const Tangent& nu) const;
  /// DR_x(eta)^{-1}[xi] for xi at R_x(eta); result based at x.
  Tangent d_retract_inverse(const Tangent& eta, const Tangent& xi) const;

  /// Same transports computed from the restricted (n-1)x(n-1) matrix in
  /// orthonormal tangent bases. Used for the exponential retraction and as a
  /// cross-check of the closed forms.
  Tangent d_retract_generic(const Tangent& eta, const Tangent& zeta) const;
  Tangent d_retract_adjoint_generic(const Tangent& eta, const Tangent& xi) const;
  Tangent d_retract_adjoint_inverse_generic(const Tangent& eta, const Tangent& nu) const;
  Tangent d_retract_inverse_generic(const Tangent& eta, const Tangent& xi) const;

  /// Orthonormal basis of T_x M as columns (Gram-Schmidt against the normal).
  Eigen::MatrixXd tangent_basis(const Point& x) const;

  /// Threshold on the restricted map's condition number.
  static constexpr double kMaxTransportCondition = 1e12;

 private:
  Manifold(Geometry g, RetractionKind k, Eigen::Index n) : geometry_(g), kind_(k), n_(n) {}

  void check_point(const Point& x) const;
  void check_base(const Tangent& t, const Point& x, const char* what) const;
  Eigen::MatrixXd ambient_jacobian(const Tangent& eta) const;

  Geometry geometry_;
  RetractionKind kind_;
  Eigen::Index n_;
};

}  // namespace riemopt
