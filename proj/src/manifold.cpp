#include "riemopt/manifold.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

namespace riemopt {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string dims(Index a, Index b) { return std::to_string(a) + " vs " + std::to_string(b); }

// Geodesic frame of the exponential map: eta = t*u, y = cos(t)x + sin(t)u.
struct ExpFrame {
  double t = 0.0;
  VectorXd u;
};

ExpFrame exp_frame(const Tangent& eta) {
  ExpFrame f;
  f.t = eta.norm();
  if (f.t > 0.0) f.u = eta.vec() / f.t;
  return f;
}

double sinc(double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; }

}  // namespace

const char* to_string(Geometry g) { return g == Geometry::Sphere ? "sphere" : "euclidean"; }

const char* to_string(RetractionKind k) {
  return k == RetractionKind::Projective ? "projective" : "exponential";
}

bool Point::same_as(const Point& other) const {
  if (coords_ == other.coords_) return true;
  if (!coords_ || !other.coords_) return false;
  return coords_->size() == other.coords_->size() && *coords_ == *other.coords_;
}

double inner(const Tangent& a, const Tangent& b) {
  if (!a.base().same_as(b.base()))
    throw Error(ErrorCode::BaseMismatch, "inner product of tangents at different points");
  return a.vec().dot(b.vec());
}

Manifold Manifold::sphere(Index n, RetractionKind kind) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "sphere needs ambient dimension >= 2");
  return Manifold(Geometry::Sphere, kind, n);
}

Manifold Manifold::euclidean(Index n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "euclidean space needs dimension >= 1");
  return Manifold(Geometry::Euclidean, RetractionKind::Projective, n);
}

Manifold Manifold::with_retraction(RetractionKind kind) const {
  Manifold m = *this;
  m.kind_ = kind;
  return m;
}

Point Manifold::point(VectorXd coords) const {
  if (coords.size() != n_) throw Error(ErrorCode::DimensionMismatch, "point: " + dims(coords.size(), n_));
  if (geometry_ == Geometry::Sphere) {
    const double nrm = coords.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm))
      throw Error(ErrorCode::InvalidArgument, "cannot normalize vector onto the sphere");
    coords /= nrm;
  }
  return Point(std::move(coords));
}

bool Manifold::contains(const Point& x, double tol) const {
  if (x.dim() != n_) return false;
  if (geometry_ == Geometry::Euclidean) return x.coords().allFinite();
  return std::abs(x.coords().norm() - 1.0) <= tol;
}

void Manifold::check_point(const Point& x) const {
  if (x.dim() != n_) throw Error(ErrorCode::DimensionMismatch, "point: " + dims(x.dim(), n_));
}

void Manifold::check_base(const Tangent& t, const Point& x, const char* what) const {
  if (t.dim() != n_) throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": " + dims(t.dim(), n_));
  if (!t.base().same_as(x))
    throw Error(ErrorCode::BaseMismatch, std::string(what) + ": tangent based at the wrong point");
}

Tangent Manifold::zero(const Point& x) const {
  check_point(x);
  return Tangent(x, VectorXd::Zero(n_));
}

bool Manifold::is_tangent(const Point& x, const VectorXd& v, double tol) const {
  if (v.size() != n_ || x.dim() != n_) return false;
  if (geometry_ == Geometry::Euclidean) return true;
  return std::abs(x.coords().dot(v)) <= tol * std::max(1.0, v.norm());
}

Tangent Manifold::tangent(const Point& x, VectorXd v, double tol) const {
  check_point(x);
  if (v.size() != n_) throw Error(ErrorCode::DimensionMismatch, "tangent: " + dims(v.size(), n_));
  if (!is_tangent(x, v, tol)) throw Error(ErrorCode::InvalidArgument, "vector is not tangent at the base point");
  return Tangent(x, std::move(v));
}

Tangent Manifold::project_tangent(const Point& x, const VectorXd& v) const {
  check_point(x);
  if (v.size() != n_) throw Error(ErrorCode::DimensionMismatch, "project_tangent: " + dims(v.size(), n_));
  if (geometry_ == Geometry::Euclidean) return Tangent(x, v);
  const VectorXd& p = x.coords();
  return Tangent(x, v - p.dot(v) * p);
}

Point Manifold::retract(const Tangent& eta) const {
  const Point& x = eta.base();
  check_base(eta, x, "retract");
  if (eta.vec().isZero(0.0)) return x;
  if (geometry_ == Geometry::Euclidean) return Point(x.coords() + eta.vec());
  if (kind_ == RetractionKind::Projective) {
    VectorXd y = x.coords() + eta.vec();
    y.normalize();
    return Point(std::move(y));
  }
  const ExpFrame f = exp_frame(eta);
  VectorXd y = std::cos(f.t) * x.coords() + std::sin(f.t) * f.u;
  y.normalize();
  return Point(std::move(y));
}

Tangent Manifold::inverse_retract(const Point& x, const Point& y) const {
  check_point(x);
  check_point(y);
  if (geometry_ == Geometry::Euclidean) return Tangent(x, y.coords() - x.coords());
  const double c = x.coords().dot(y.coords());
  if (kind_ == RetractionKind::Projective) {
    if (!(c > 0.0))
      throw Error(ErrorCode::AntipodalOrOutOfDomain, "projective inverse retraction needs <x,y> > 0");
    return project_tangent(x, y.coords() / c - x.coords());
  }
  VectorXd v = y.coords() - c * x.coords();
  const double s = v.norm();
  if (s == 0.0) {
    if (c > 0.0) return zero(x);
    throw Error(ErrorCode::AntipodalOrOutOfDomain, "exponential inverse retraction at antipodal point");
  }
  if (c < 0.0 && s < 1e-14)
    throw Error(ErrorCode::AntipodalOrOutOfDomain, "exponential inverse retraction at antipodal point");
  const double theta = std::atan2(s, c);
  return project_tangent(x, (theta / s) * v);
}

Tangent Manifold::d_retract(const Tangent& eta, const Tangent& zeta) const {
  const Point& x = eta.base();
  check_base(eta, x, "d_retract");
  check_base(zeta, x, "d_retract");
  const Point y = retract(eta);
  if (geometry_ == Geometry::Euclidean || eta.vec().isZero(0.0)) return Tangent(y, zeta.vec());
  if (kind_ == RetractionKind::Projective) {
    const double c = (x.coords() + eta.vec()).norm();
    return project_tangent(y, zeta.vec() / c);
  }
  const ExpFrame f = exp_frame(eta);
  const double a = f.u.dot(zeta.vec());
  const VectorXd perp = zeta.vec() - a * f.u;
  VectorXd out = a * (-std::sin(f.t) * x.coords() + std::cos(f.t) * f.u) + sinc(f.t) * perp;
  return project_tangent(y, out);
}

Tangent Manifold::d_retract_adjoint(const Tangent& eta, const Tangent& xi) const {
  const Point& x = eta.base();
  check_base(eta, x, "d_retract_adjoint");
  const Point y = retract(eta);
  check_base(xi, y, "d_retract_adjoint");
  if (geometry_ == Geometry::Euclidean || eta.vec().isZero(0.0)) return Tangent(x, xi.vec());
  if (kind_ == RetractionKind::Projective) {
    const double c = (x.coords() + eta.vec()).norm();
    return project_tangent(x, xi.vec() / c);
  }
  const ExpFrame f = exp_frame(eta);
  const double b = (-std::sin(f.t) * x.coords() + std::cos(f.t) * f.u).dot(xi.vec());
  const VectorXd perp = xi.vec() - f.u.dot(xi.vec()) * f.u;
  return project_tangent(x, b * f.u + sinc(f.t) * perp);
}

Tangent Manifold::d_retract_adjoint_inverse(const Tangent& eta, const Tangent& nu) const {
  const Point& x = eta.base();
  check_base(eta, x, "d_retract_adjoint_inverse");
  check_base(nu, x, "d_retract_adjoint_inverse");
  const Point y = retract(eta);
  if (geometry_ == Geometry::Euclidean || eta.vec().isZero(0.0)) return Tangent(y, nu.vec());
  if (kind_ == RetractionKind::Projective) {
    // Solve P_x(xi)/c = nu with xi in T_y: xi = c*nu - c^2 <y,nu> x.
    const double c = (x.coords() + eta.vec()).norm();
    if (c > kMaxTransportCondition)
      throw Error(ErrorCode::SingularTransport, "projective transport condition number too large");
    const double yn = y.coords().dot(nu.vec());
    return project_tangent(y, c * nu.vec() - c * c * yn * x.coords());
  }
  const ExpFrame f = exp_frame(eta);
  const double s = sinc(f.t);
  if (std::abs(s) * kMaxTransportCondition < 1.0)
    throw Error(ErrorCode::SingularTransport, "exponential transport near a conjugate point");
  // The adjoint maps u -> u_y component-wise and scales the rest by sinc(t).
  const VectorXd uy = -std::sin(f.t) * x.coords() + std::cos(f.t) * f.u;
  const double a = f.u.dot(nu.vec());
  const VectorXd perp = nu.vec() - a * f.u;
  return project_tangent(y, a * uy + perp / s);
}

Tangent Manifold::d_retract_inverse(const Tangent& eta, const Tangent& xi) const {
  const Point& x = eta.base();
  check_base(eta, x, "d_retract_inverse");
  const Point y = retract(eta);
  check_base(xi, y, "d_retract_inverse");
  if (geometry_ == Geometry::Euclidean || eta.vec().isZero(0.0)) return Tangent(x, xi.vec());
  if (kind_ == RetractionKind::Projective) {
    // Solve (I - yy^T) zeta / c = xi with zeta in T_x: zeta = c*xi - c^2 <x,xi> y.
    const double c = (x.coords() + eta.vec()).norm();
    if (c > kMaxTransportCondition)
      throw Error(ErrorCode::SingularTransport, "projective transport condition number too large");
    const double xx = x.coords().dot(xi.vec());
    return project_tangent(x, c * xi.vec() - c * c * xx * y.coords());
  }
  const ExpFrame f = exp_frame(eta);
  const double s = sinc(f.t);
  if (std::abs(s) * kMaxTransportCondition < 1.0)
    throw Error(ErrorCode::SingularTransport, "exponential transport near a conjugate point");
  const VectorXd uy = -std::sin(f.t) * x.coords() + std::cos(f.t) * f.u;
  const double b = uy.dot(xi.vec());
  const VectorXd perp = xi.vec() - b * uy;
  return project_tangent(x, b * f.u + perp / s);
}

MatrixXd Manifold::tangent_basis(const Point& x) const {
  check_point(x);
  if (geometry_ == Geometry::Euclidean) return MatrixXd::Identity(n_, n_);
  const VectorXd& normal = x.coords();
  Index skip = 0;
  normal.cwiseAbs().maxCoeff(&skip);
  MatrixXd basis(n_, n_ - 1);
  Index col = 0;
  for (Index j = 0; j < n_; ++j) {
    if (j == skip) continue;
    VectorXd v = VectorXd::Unit(n_, j);
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      v -= normal.dot(v) * normal;
      for (Index k = 0; k < col; ++k) v -= basis.col(k).dot(v) * basis.col(k);
    }
    basis.col(col++) = v.normalized();
  }
  return basis;
}

MatrixXd Manifold::ambient_jacobian(const Tangent& eta) const {
  const Point& x = eta.base();
  if (geometry_ == Geometry::Euclidean || eta.vec().isZero(0.0)) return MatrixXd::Identity(n_, n_);
  if (kind_ == RetractionKind::Projective) {
    const VectorXd xe = x.coords() + eta.vec();
    const double c = xe.norm();
    const VectorXd y = xe / c;
    return (MatrixXd::Identity(n_, n_) - y * y.transpose()) / c;
  }
  const ExpFrame f = exp_frame(eta);
  const MatrixXd uu = f.u * f.u.transpose();
  return -std::sin(f.t) * x.coords() * f.u.transpose() + std::cos(f.t) * uu +
         sinc(f.t) * (MatrixXd::Identity(n_, n_) - uu);
}

namespace {

// Restricted linear map B_y^T J B_x with a condition-number guard.
struct RestrictedMap {
  MatrixXd bx, by, mat;
  Eigen::PartialPivLU<MatrixXd> lu;

  void check() const {
    const double rc = lu.rcond();
    if (!(rc * Manifold::kMaxTransportCondition >= 1.0))
      throw Error(ErrorCode::SingularTransport, "restricted transport is numerically singular");
  }
};

}  // namespace

Tangent Manifold::d_retract_generic(const Tangent& eta, const Tangent& zeta) const {
  const Point& x = eta.base();
  check_base(eta, x, "d_retract_generic");
  check_base(zeta, x, "d_retract_generic");
  const Point y = retract(eta);
  const MatrixXd bx = tangent_basis(x), by = tangent_basis(y);
  const MatrixXd mat = by.transpose() * ambient_jacobian(eta) * bx;
  return Tangent(y, by * (mat * (bx.transpose() * zeta.vec())));
}

Tangent Manifold::d_retract_adjoint_generic(const Tangent& eta, const Tangent& xi) const {
  const Point& x = eta.base();
  check_base(eta, x, "d_retract_adjoint_generic");
  const Point y = retract(eta);
  check_base(xi, y, "d_retract_adjoint_generic");
  const MatrixXd bx = tangent_basis(x), by = tangent_basis(y);
  const MatrixXd mat = by.transpose() * ambient_jacobian(eta) * bx;
  return Tangent(x, bx * (mat.transpose() * (by.transpose() * xi.vec())));
}

Tangent Manifold::d_retract_adjoint_inverse_generic(const Tangent& eta, const Tangent& nu) const {
  const Point& x = eta.base();
  check_base(eta, x, "d_retract_adjoint_inverse_generic");
  check_base(nu, x, "d_retract_adjoint_inverse_generic");
  const Point y = retract(eta);
  RestrictedMap r;
  r.bx = tangent_basis(x);
  r.by = tangent_basis(y);
  r.mat = r.by.transpose() * ambient_jacobian(eta) * r.bx;
  r.lu.compute(r.mat.transpose());
  r.check();
  return Tangent(y, r.by * r.lu.solve(r.bx.transpose() * nu.vec()));
}

Tangent Manifold::d_retract_inverse_generic(const Tangent& eta, const Tangent& xi) const {
  const Point& x = eta.base();
  check_base(eta, x, "d_retract_inverse_generic");
  const Point y = retract(eta);
  check_base(xi, y, "d_retract_inverse_generic");
  RestrictedMap r;
  r.bx = tangent_basis(x);
  r.by = tangent_basis(y);
  r.mat = r.by.transpose() * ambient_jacobian(eta) * r.bx;
  r.lu.compute(r.mat);
  r.check();
  return Tangent(x, r.bx * r.lu.solve(r.by.transpose() * xi.vec()));
}

}  // namespace riemopt
