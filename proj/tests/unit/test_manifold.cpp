#include <doctest.h>

#include <cmath>
#include <numbers>

#include "riemopt/error.hpp"
#include "riemopt/manifold.hpp"
#include "riemopt/random.hpp"

using namespace riemopt;
using Eigen::VectorXd;

namespace {

VectorXd e(int n, int i) { return VectorXd::Unit(n, i); }

VectorXd vec3(double a, double b, double c) {
  VectorXd v(3);
  v << a, b, c;
  return v;
}

Tangent random_tangent(const Manifold& M, const Point& x, CounterRng& rng, double scale = 1.0) {
  return M.project_tangent(x, scale * rng.normal_vector(M.dim()));
}

}  // namespace

TEST_CASE("project_tangent on the sphere") {
  const Manifold S = Manifold::sphere(3);
  const Point x = S.point(e(3, 0));
  CHECK(S.project_tangent(x, e(3, 0)).vec().norm() == 0.0);
  CHECK((S.project_tangent(x, e(3, 1)).vec() - e(3, 1)).norm() == 0.0);

  const Point x2 = S.point(vec3(1, 1, 0));
  const Tangent t = S.project_tangent(x2, vec3(1, 0, 0));
  CHECK((t.vec() - vec3(0.5, -0.5, 0)).norm() < 1e-15);
  // idempotent
  CHECK((S.project_tangent(x2, t.vec()).vec() - t.vec()).norm() < 1e-15);
  CHECK_THROWS_AS(S.project_tangent(x2, VectorXd::Ones(4)), Error);
}

TEST_CASE("project_tangent on Euclidean space is the identity") {
  const Manifold E = Manifold::euclidean(3);
  const Point x = E.point(vec3(1, 2, 3));
  CHECK((E.project_tangent(x, vec3(4, 5, 6)).vec() - vec3(4, 5, 6)).norm() == 0.0);
}

TEST_CASE("retractions") {
  const Manifold P = Manifold::sphere(3, RetractionKind::Projective);
  const Manifold X = Manifold::sphere(3, RetractionKind::Exponential);
  const Point x = P.point(e(3, 0));

  SUBCASE("zero step returns x") {
    CHECK(P.retract(P.zero(x)).same_as(x));
    CHECK(X.retract(X.zero(x)).same_as(x));
  }
  SUBCASE("projective normalizes x + eta") {
    const Point y = P.retract(P.tangent(x, e(3, 1)));
    CHECK((y.coords() - vec3(1, 1, 0) / std::sqrt(2.0)).norm() < 1e-15);
  }
  SUBCASE("exponential: quarter great circle") {
    const Point y = X.retract(X.tangent(x, std::numbers::pi / 2 * e(3, 1)));
    CHECK((y.coords() - e(3, 1)).norm() < 1e-15);
  }
  SUBCASE("results stay on the sphere") {
    CounterRng rng(3, 1);
    for (int s = 0; s < 50; ++s) {
      const Point z = P.point(rng.normal_vector(3));
      const Tangent eta = random_tangent(P, z, rng, 3.0);
      CHECK(std::abs(P.retract(eta).coords().norm() - 1.0) <= 1e-12);
      CHECK(std::abs(X.retract(Tangent(z, eta.vec())).coords().norm() - 1.0) <= 1e-12);
    }
  }
  SUBCASE("Euclidean ignores the retraction tag") {
    const Manifold E = Manifold::euclidean(3);
    const Point p = E.point(vec3(1, 2, 3));
    CHECK((E.retract(E.tangent(p, vec3(1, 1, 1))).coords() - vec3(2, 3, 4)).norm() == 0.0);
  }
  SUBCASE("non-tangent input is rejected") {
    CHECK_THROWS_AS(P.tangent(x, e(3, 0)), Error);
  }
}

TEST_CASE("mixing bases is detected") {
  const Manifold S = Manifold::sphere(3);
  const Point x = S.point(e(3, 0));
  const Point y = S.point(e(3, 1));
  const Tangent eta = S.tangent(x, e(3, 1));
  const Tangent at_y = S.tangent(y, e(3, 2));
  try {
    S.d_retract(eta, at_y);
    FAIL("expected BaseMismatch");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::BaseMismatch);
  }
}

TEST_CASE("inverse retraction") {
  const Manifold P = Manifold::sphere(3, RetractionKind::Projective);
  const Manifold X = Manifold::sphere(3, RetractionKind::Exponential);
  const Point x = P.point(e(3, 0));

  CHECK(P.inverse_retract(x, x).vec().norm() == 0.0);
  CHECK(X.inverse_retract(x, x).vec().norm() == 0.0);
  CHECK((X.inverse_retract(x, X.point(e(3, 1))).vec() - std::numbers::pi / 2 * e(3, 1)).norm() < 1e-15);
  CHECK((P.inverse_retract(x, P.point(vec3(1, 1, 0))).vec() - e(3, 1)).norm() < 1e-15);

  CounterRng rng(5, 1);
  for (int s = 0; s < 50; ++s) {
    const Point a = P.point(rng.normal_vector(3));
    const Point b = P.point(rng.normal_vector(3));
    if (a.coords().dot(b.coords()) > 0.05)
      CHECK((P.retract(P.inverse_retract(a, b)).coords() - b.coords()).norm() <= 1e-10);
    if (a.coords().dot(b.coords()) > -0.95)
      CHECK((X.retract(X.inverse_retract(a, b)).coords() - b.coords()).norm() <= 1e-10);
  }

  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& err) {
      return err.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code_of([&] { P.inverse_retract(x, P.point(-e(3, 0))); }) == ErrorCode::AntipodalOrOutOfDomain);
  CHECK(code_of([&] { P.inverse_retract(x, P.point(e(3, 1))); }) == ErrorCode::AntipodalOrOutOfDomain);
  CHECK(code_of([&] { X.inverse_retract(x, X.point(-e(3, 0))); }) == ErrorCode::AntipodalOrOutOfDomain);
}

TEST_CASE("differentiated retraction") {
  const Manifold P = Manifold::sphere(3, RetractionKind::Projective);
  const Point x = P.point(e(3, 0));

  SUBCASE("identity at eta = 0") {
    const Tangent zeta = P.tangent(x, vec3(0, 0.3, -0.7));
    CHECK((P.d_retract(P.zero(x), zeta).vec() - zeta.vec()).norm() < 1e-15);
  }
  SUBCASE("closed form example") {
    const Tangent eta = P.tangent(x, e(3, 1));
    const Tangent zeta = P.tangent(x, e(3, 2));
    CHECK((P.d_retract(eta, zeta).vec() - e(3, 2) / std::sqrt(2.0)).norm() < 1e-15);
  }
  SUBCASE("matches central differences") {
    for (RetractionKind kind : {RetractionKind::Projective, RetractionKind::Exponential}) {
      const Manifold M = Manifold::sphere(8, kind);
      CounterRng rng(11, 2);
      for (int s = 0; s < 20; ++s) {
        const Point z = M.point(rng.normal_vector(8));
        const Tangent eta = random_tangent(M, z, rng, 0.7);
        const Tangent zeta = random_tangent(M, z, rng);
        const double t = 1e-6;
        const VectorXd fd = (M.retract(Tangent(z, eta.vec() + t * zeta.vec())).coords() -
                             M.retract(Tangent(z, eta.vec() - t * zeta.vec())).coords()) /
                            (2 * t);
        const VectorXd an = M.d_retract(eta, zeta).vec();
        CHECK((fd - an).norm() <= 1e-6 * std::max(1.0, an.norm()));
      }
    }
  }
}

TEST_CASE("adjoint pairing, inverse adjoint and generic route") {
  for (RetractionKind kind : {RetractionKind::Projective, RetractionKind::Exponential}) {
    const Manifold M = Manifold::sphere(8, kind);
    CounterRng rng(13, static_cast<std::uint32_t>(kind) + 1);
    double worst_pair = 0, worst_round = 0, worst_generic = 0;
    for (int s = 0; s < 1000; ++s) {
      const Point x = M.point(rng.normal_vector(8));
      const Tangent eta = random_tangent(M, x, rng, 0.8);
      const Point y = M.retract(eta);
      const Tangent zeta = random_tangent(M, x, rng);
      const Tangent xi = random_tangent(M, y, rng);
      const double lhs = M.d_retract(eta, zeta).vec().dot(xi.vec());
      const double rhs = zeta.vec().dot(M.d_retract_adjoint(eta, xi).vec());
      worst_pair = std::max(worst_pair, std::abs(lhs - rhs));

      const Tangent nu = M.d_retract_adjoint_inverse(eta, zeta);
      CHECK(nu.base().same_as(y));
      worst_round = std::max(worst_round, (M.d_retract_adjoint(eta, nu).vec() - zeta.vec()).norm());
      worst_round =
          std::max(worst_round, (M.d_retract_inverse(eta, M.d_retract(eta, zeta)).vec() - zeta.vec()).norm());

      if (s < 100) {
        worst_generic = std::max(worst_generic, (M.d_retract_generic(eta, zeta).vec() - M.d_retract(eta, zeta).vec()).norm());
        worst_generic = std::max(
            worst_generic, (M.d_retract_adjoint_generic(eta, xi).vec() - M.d_retract_adjoint(eta, xi).vec()).norm());
        worst_generic = std::max(worst_generic, (M.d_retract_adjoint_inverse_generic(eta, zeta).vec() -
                                                 M.d_retract_adjoint_inverse(eta, zeta).vec())
                                                    .norm());
      }
    }
    CHECK(worst_pair <= 1e-10);
    CHECK(worst_round <= 1e-9);
    CHECK(worst_generic <= 1e-9);
  }
}

TEST_CASE("projective adjoint is the scaled tangent projection at x") {
  const Manifold M = Manifold::sphere(8);
  CounterRng rng(17, 1);
  for (int s = 0; s < 20; ++s) {
    const Point x = M.point(rng.normal_vector(8));
    const Tangent eta = random_tangent(M, x, rng, 0.5);
    const Tangent xi = random_tangent(M, M.retract(eta), rng);
    const VectorXd expected = M.project_tangent(x, xi.vec()).vec() / (x.coords() + eta.vec()).norm();
    CHECK((M.d_retract_adjoint(eta, xi).vec() - expected).norm() < 1e-14);
  }
}

TEST_CASE("transports at eta = 0 are the identity") {
  const Manifold M = Manifold::sphere(5);
  CounterRng rng(19, 1);
  const Point x = M.point(rng.normal_vector(5));
  const Tangent v = random_tangent(M, x, rng);
  const Tangent z = M.zero(x);
  CHECK((M.d_retract_adjoint(z, v).vec() - v.vec()).norm() < 1e-15);
  CHECK((M.d_retract_adjoint_inverse(z, v).vec() - v.vec()).norm() < 1e-15);
}

TEST_CASE("Euclidean transports are the identity") {
  const Manifold E = Manifold::euclidean(4);
  CounterRng rng(23, 1);
  const Point x = E.point(rng.normal_vector(4));
  const Tangent eta(x, rng.normal_vector(4));
  const Tangent zeta(x, rng.normal_vector(4));
  CHECK((E.d_retract(eta, zeta).vec() - zeta.vec()).norm() == 0.0);
  const Tangent xi(E.retract(eta), rng.normal_vector(4));
  CHECK((E.d_retract_adjoint(eta, xi).vec() - xi.vec()).norm() == 0.0);
  CHECK((E.d_retract_adjoint_inverse(eta, zeta).vec() - zeta.vec()).norm() == 0.0);
}

TEST_CASE("retraction is first order: o(t) error") {
  const Manifold M = Manifold::sphere(6);
  CounterRng rng(29, 1);
  const Point x = M.point(rng.normal_vector(6));
  const Tangent z = random_tangent(M, x, rng);
  double prev = 0;
  for (double t : {1e-3, 1e-4, 1e-5}) {
    const double err = (M.retract(Tangent(x, t * z.vec())).coords() - x.coords() - t * z.vec()).norm();
    if (prev > 0) CHECK(err / prev < 0.05);
    prev = err;
  }
}

TEST_CASE("tangent basis is orthonormal and tangent") {
  const Manifold M = Manifold::sphere(7);
  CounterRng rng(31, 1);
  const Point x = M.point(rng.normal_vector(7));
  const Eigen::MatrixXd B = M.tangent_basis(x);
  CHECK(B.cols() == 6);
  CHECK((B.transpose() * B - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-13);
  CHECK((B.transpose() * x.coords()).norm() < 1e-13);
}
