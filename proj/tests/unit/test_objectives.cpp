#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "riemopt/diagnostics.hpp"
#include "riemopt/error.hpp"
#include "riemopt/objectives.hpp"
#include "riemopt/random.hpp"

using namespace riemopt;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

MatrixXd normal_matrix(CounterRng& rng, Eigen::Index r, Eigen::Index c) {
  return rng.normal_vector(r * c).reshaped(r, c);
}

}  // namespace

TEST_CASE("l1 prox is soft thresholding") {
  CHECK((make_l1(0.5).prox(vec({1.0, -0.3}), 1.0) - vec({0.5, 0.0})).norm() < 1e-15);
  CHECK((make_l1(0.05).prox(vec({0.06, -0.04}), 1.0) - vec({0.01, 0.0})).norm() < 1e-15);
  CHECK((make_l1(0.1).prox(vec({-1.0, 0.5}), 2.0) - vec({-0.8, 0.3})).norm() < 1e-15);
}

TEST_CASE("l1 value, subgradient and Lipschitz constant") {
  const NonsmoothTerm g = make_l1(0.05);
  CHECK(g.value(VectorXd::Zero(3)) == 0.0);
  CHECK(g.subgradient(VectorXd::Zero(3)).norm() == 0.0);
  CHECK(g.value(vec({1.0, -2.0, 0.0})) == doctest::Approx(0.15));
  CHECK((g.subgradient(vec({1.0, -2.0, 0.0})) - vec({0.05, -0.05, 0.0})).norm() < 1e-15);
  CHECK(g.lipschitz_const(16) == doctest::Approx(0.05 * 4.0));
  CHECK_THROWS_AS(make_l1(-1.0), Error);
  CHECK_THROWS_AS(g.prox(vec({1.0}), 0.0), Error);
}

TEST_CASE("l1 prox is nonexpansive") {
  const NonsmoothTerm g = make_l1(0.3);
  CounterRng rng(1, 1);
  for (int s = 0; s < 200; ++s) {
    const VectorXd u = rng.normal_vector(10), v = rng.normal_vector(10);
    CHECK((g.prox(u, 0.7) - g.prox(v, 0.7)).norm() <= (u - v).norm() + 1e-15);
  }
}

TEST_CASE("l1 oracles pass the sampling checks") {
  const NonsmoothTerm g = make_l1(0.05);
  CHECK(convexity_check(g, 12, 500, 1e-12, 1).passed);
  CHECK(subgradient_check(g, 12, 500, 1e-12, 1).passed);
  CHECK(prox_check(g, 12, 500, 1e-10, 1).passed);
}

TEST_CASE("eval_F adds smooth and nonsmooth parts") {
  const Manifold S = Manifold::sphere(3);
  const CompositeObjective obj(S, {{make_least_squares(MatrixXd::Identity(3, 3), VectorXd::Zero(3)), make_l1(0.05)},
                                   {make_least_squares(MatrixXd::Identity(3, 3), VectorXd::Zero(3)), make_l1(0.05)}});
  const VectorXd F = obj.eval_F(S.point(VectorXd::Unit(3, 0)));
  CHECK(F.size() == 2);
  CHECK(F[0] == doctest::Approx(0.55));
  CHECK(F[1] == doctest::Approx(0.55));

  const CompositeObjective zero(S, {{make_linear(VectorXd::Zero(3)), make_zero_nonsmooth()}});
  CHECK(zero.eval_F(S.point(VectorXd::Ones(3)))[0] == 0.0);
}

TEST_CASE("eval_F does not depend on the point's representation") {
  const Manifold S = Manifold::sphere(4);
  CounterRng rng(2, 1);
  const CompositeObjective obj(S, {{make_least_squares(normal_matrix(rng, 3, 4), rng.normal_vector(3)), make_l1(0.1)}});
  const VectorXd c = rng.normal_vector(4);
  CHECK(obj.eval_F(S.point(c))[0] == obj.eval_F(S.point(2.0 * c))[0]);
}

TEST_CASE("Riemannian gradients") {
  const Manifold S = Manifold::sphere(3);
  SUBCASE("constant f has zero gradient") {
    const CompositeObjective obj(S, {{make_linear(VectorXd::Zero(3), 4.0), make_zero_nonsmooth()}});
    CHECK(obj.riemannian_grad_f(0, S.point(VectorXd::Ones(3))).vec().norm() == 0.0);
  }
  SUBCASE("normal ambient gradient projects to zero") {
    const CompositeObjective obj(S, {{make_quadratic(MatrixXd::Identity(3, 3), 2.0 * VectorXd::Unit(3, 0)),
                                      make_zero_nonsmooth()}});
    const Point x = S.point(VectorXd::Unit(3, 0));
    CHECK((obj.smooth(0).ambient_gradient(x.coords()) + VectorXd::Unit(3, 0)).norm() < 1e-15);
    CHECK(obj.riemannian_grad_f(0, x).vec().norm() < 1e-15);
  }
  SUBCASE("least squares gradient is A^T (A x - b)") {
    CounterRng rng(3, 1);
    const MatrixXd A = normal_matrix(rng, 5, 3);
    const VectorXd b = rng.normal_vector(5);
    const SmoothTerm f = make_least_squares(A, b);
    const VectorXd x = rng.normal_vector(3);
    CHECK((f.ambient_gradient(x) - A.transpose() * (A * x - b)).norm() < 1e-13);
    CHECK(f.value(x) == doctest::Approx(0.5 * (A * x - b).squaredNorm()));
  }
  SUBCASE("index out of range") {
    const CompositeObjective obj(S, {{make_linear(VectorXd::Zero(3)), make_zero_nonsmooth()}});
    try {
      obj.riemannian_grad_f(1, S.point(VectorXd::Ones(3)));
      FAIL("expected IndexOutOfRange");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::IndexOutOfRange);
    }
  }
}

TEST_CASE("least squares gradient matches finite differences on the sphere") {
  CounterRng rng(4, 1);
  const Manifold S = Manifold::sphere(30);
  const SmoothTerm f = make_least_squares(normal_matrix(rng, 20, 30) / std::sqrt(20.0), rng.normal_vector(20));
  const CheckReport r = fd_gradient_check(f, S, 50, 1e-6, 4);
  CHECK(r.passed);
  CHECK(r.samples == 50);
  CHECK(r.worst_violation <= 1e-6);
}

TEST_CASE("linear f: finite differences exact in Euclidean space") {
  CounterRng rng(5, 1);
  const CheckReport r = fd_gradient_check(make_linear(rng.normal_vector(6), 1.0), Manifold::euclidean(6), 20, 1e-9, 5);
  CHECK(r.passed);
  CHECK(r.worst_violation <= 1e-9);
}

TEST_CASE("Lipschitz hints") {
  CounterRng rng(6, 1);
  const MatrixXd A = normal_matrix(rng, 8, 5);
  const MatrixXd AtA = A.transpose() * A;
  const double exact = Eigen::SelfAdjointEigenSolver<MatrixXd>(AtA).eigenvalues().maxCoeff();
  CHECK(*make_least_squares(A, VectorXd::Zero(8)).lipschitz_hint == doctest::Approx(exact).epsilon(1e-7));
  CHECK(power_iteration_lambda_max(AtA) == doctest::Approx(exact).epsilon(1e-7));

  CHECK(*make_linear(VectorXd::Ones(5)).lipschitz_hint == 0.0);

  SmoothTerm unknown = make_linear(VectorXd::Ones(5));
  unknown.lipschitz_hint.reset();
  const CompositeObjective hinted(Manifold::euclidean(5), {{make_least_squares(A, VectorXd::Zero(8)), make_l1(0.1)},
                                                           {make_linear(VectorXd::Ones(5)), make_l1(0.2)}});
  CHECK(*hinted.max_lipschitz_hint() == doctest::Approx(exact).epsilon(1e-7));
  const CompositeObjective obj(Manifold::euclidean(5), {{make_least_squares(A, VectorXd::Zero(8)), make_l1(0.1)},
                                                        {unknown, make_l1(0.2)}});
  CHECK_FALSE(obj.max_lipschitz_hint().has_value());
  CHECK(obj.nonsmooth_share_base());
}

TEST_CASE("composite objective validation") {
  CHECK_THROWS_AS(CompositeObjective(Manifold::euclidean(2), {}), Error);
  CHECK_THROWS_AS(make_least_squares(MatrixXd::Identity(2, 2), VectorXd::Zero(3)), Error);
}
