#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "fixtures.hpp"
#include "riemopt/algorithms.hpp"
#include "riemopt/diagnostics.hpp"
#include "riemopt/error.hpp"

using namespace riemopt;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

bool monotone(const RunResult& r) {
  const auto F = accepted_iterates_F(r);
  for (std::size_t k = 1; k < F.size(); ++k)
    if ((F[k].array() > F[k - 1].array()).any()) return false;
  return true;
}

}  // namespace

TEST_CASE("parse and print algorithm names") {
  for (Algorithm a : {Algorithm::Rmpgm, Algorithm::Inexact, Algorithm::TrustRegion, Algorithm::Rmsd})
    CHECK(parse_algorithm(to_string(a)) == a);
  CHECK_FALSE(parse_algorithm("bfgs").has_value());
}

TEST_CASE("config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.tr.tau1 = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.tr.s1 = 0.8;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.growth = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.max_iter = -1;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("stationary start converges at k = 0") {
  const VectorXd a = VectorXd::LinSpaced(3, 1.0, 2.0);
  const CompositeObjective obj(Manifold::euclidean(3), {{make_linear(a), make_zero_nonsmooth()},
                                                        {make_linear(-a), make_zero_nonsmooth()}});
  const Point x0 = obj.manifold().point(VectorXd::Zero(3));
  for (Algorithm alg : {Algorithm::Rmpgm, Algorithm::Inexact, Algorithm::TrustRegion, Algorithm::Rmsd}) {
    const RunResult r = run_algorithm(alg, obj, x0, {});
    CHECK(r.converged());
    CHECK(r.iterations == 0);
    CHECK(r.trace.size() == 1);
  }
}

TEST_CASE("unit-scaled gradient step reaches b in one step") {
  const VectorXd b = VectorXd::LinSpaced(4, -2.0, 1.0);
  const CompositeObjective obj(Manifold::euclidean(4),
                               {{make_least_squares(MatrixXd::Identity(4, 4), b), make_zero_nonsmooth()}});
  const Point x0 = obj.manifold().point(VectorXd::Ones(4));
  SolverConfig cfg;
  cfg.Ltilde_init = 1.0;
  cfg.backtracking = false;
  const RunResult r = rmpgm_run(obj, x0, cfg);
  REQUIRE(r.trace.size() == 2);
  CHECK(r.trace[0].eta_norm == doctest::Approx((b - x0.coords()).norm()).epsilon(1e-12));
  CHECK((r.final_point.coords() - b).norm() <= 1e-10);
  CHECK(r.converged());
  CHECK(r.iterations == 1);
}

TEST_CASE("tol = infinity stops every algorithm at k = 0") {
  const CompositeObjective obj = fixtures::small_sphere_problem(2, 8);
  const Point x0 = obj.manifold().point(VectorXd::LinSpaced(8, -1.0, 1.5));
  SolverConfig cfg;
  cfg.tol = std::numeric_limits<double>::infinity();
  for (Algorithm alg : {Algorithm::Rmpgm, Algorithm::Inexact, Algorithm::TrustRegion, Algorithm::Rmsd}) {
    const RunResult r = run_algorithm(alg, obj, x0, cfg);
    CHECK(r.converged());
    CHECK(r.iterations == 0);
  }
}

TEST_CASE("descent family on sphere LS+L1: monotone traces and certificates") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CompositeObjective obj = fixtures::small_sphere_problem(seed, 12, 0.1);
    CounterRng rng(seed, 21);
    const Point x0 = obj.manifold().point(rng.normal_vector(12));
    SolverConfig cfg;
    cfg.max_iter = 300;
    for (Algorithm alg : {Algorithm::Rmpgm, Algorithm::Inexact, Algorithm::TrustRegion}) {
      const RunResult r = run_algorithm(alg, obj, x0, cfg);
      CAPTURE(seed);
      CAPTURE(to_string(alg));
      CHECK(r.trace.size() <= static_cast<std::size_t>(cfg.max_iter) + 1);
      CHECK(r.iterations == r.trace.back().k);
      CHECK(monotone(r));
      CHECK(descent_trace_check(r).passed);
      if (r.certified_beta() > 0.0) CHECK(square_summability_check(r, r.certified_beta()).passed);
      CHECK(r.status != RunStatus::Stalled);
    }
  }
}

TEST_CASE("inexact variant with a zero schedule tracks exact RMPGM") {
  const CompositeObjective obj = fixtures::small_sphere_problem(7, 10, 0.1);
  const Point x0 = obj.manifold().point(VectorXd::LinSpaced(10, 1.0, -1.0));
  SolverConfig cfg;
  cfg.max_iter = 200;
  cfg.timing = false;
  const RunResult exact = rmpgm_run(obj, x0, cfg);
  cfg.eps_schedule = [](int) { return 0.0; };
  const RunResult inexact = inexact_rmpgm_run(obj, x0, cfg);
  CHECK(inexact.iterations == exact.iterations);
  REQUIRE(inexact.trace.size() == exact.trace.size());
  for (std::size_t k = 0; k < exact.trace.size(); ++k)
    CHECK((inexact.trace[k].F_values - exact.trace[k].F_values).norm() <= 1e-9);
}

TEST_CASE("trust region on a Euclidean quadratic with exact L") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto [obj, L] = fixtures::euclidean_quadratic_problem(seed);
    CounterRng rng(seed, 23);
    const Point x0 = obj.manifold().point(3.0 * rng.normal_vector(obj.dim()));
    SolverConfig cfg;
    cfg.max_iter = 2000;
    cfg.tol = 1e-6;
    cfg.Ltilde_init = 0.05;  // start well below L so sigma must grow
    const RunResult r = tr_rmpgm_run(obj, x0, cfg);
    CHECK(r.converged());
    CHECK(tr_trace_check(r, cfg.tr, L).passed);
    CHECK(tr_predicted_reduction_check(r).passed);
    CHECK(monotone(r));
    CHECK(r.successful + r.unsuccessful == r.iterations);
  }
}

TEST_CASE("RMSD direction") {
  SUBCASE("m = 1, g = 0 gives -grad f") {
    const VectorXd b = VectorXd::LinSpaced(3, 0.5, -0.5);
    const CompositeObjective obj(Manifold::sphere(3),
                                 {{make_least_squares(MatrixXd::Identity(3, 3), b), make_zero_nonsmooth()}});
    const Point x = obj.manifold().point(VectorXd::Ones(3));
    CHECK((rmsd_direction(obj, x).vec() + obj.riemannian_grad_f(0, x).vec()).norm() <= 1e-12);
  }
  SUBCASE("opposed gradients give d = 0") {
    const VectorXd a = VectorXd::LinSpaced(3, 1.0, 2.0);
    const CompositeObjective obj(Manifold::euclidean(3), {{make_linear(a), make_zero_nonsmooth()},
                                                          {make_linear(-a), make_zero_nonsmooth()}});
    CHECK(rmsd_direction(obj, obj.manifold().point(VectorXd::Zero(3))).norm() <= 1e-12);
  }
  SUBCASE("step sizes follow 1/sqrt(k+1)") {
    const CompositeObjective obj = fixtures::small_sphere_problem(1, 6);
    SolverConfig cfg;
    cfg.max_iter = 10;
    const RunResult r = rmsd_run(obj, obj.manifold().point(VectorXd::Ones(6)), cfg);
    for (const IterationRecord& rec : r.trace) CHECK(rec.param == doctest::Approx(1.0 / std::sqrt(rec.k + 1.0)));
  }
}

TEST_CASE("merit estimates") {
  const CompositeObjective obj = fixtures::small_sphere_problem(3, 4);
  const Manifold& M = obj.manifold();
  const Point x = M.point(VectorXd::LinSpaced(4, 1.0, 2.0));
  CHECK(merit_u0_estimate(obj, x, {x}) == 0.0);

  SolverConfig cfg;
  const RunResult r = rmpgm_run(obj, x, cfg);
  const Point y = r.final_point;
  if ((obj.eval_F(y).array() < obj.eval_F(x).array()).all()) CHECK(merit_u0_estimate(obj, x, {y}) > 0.0);
  CHECK_THROWS_AS(merit_u0_estimate(obj, x, {}), Error);

  const std::vector<VectorXd> iterF = {VectorXd::Constant(2, 3.0), VectorXd::Constant(2, 2.0),
                                       VectorXd::Constant(2, 1.0)};
  const auto u = ergodic_merit(iterF, {VectorXd::Constant(2, 1.0)});
  REQUIRE(u.size() == 2);
  CHECK(u[0] == doctest::Approx(1.0));
  CHECK(u[1] == doctest::Approx(0.5));
}

TEST_CASE("trace CSV") {
  const CompositeObjective obj = fixtures::small_sphere_problem(5, 5);
  SolverConfig cfg;
  cfg.max_iter = 5;
  cfg.timing = false;
  const RunResult r = tr_rmpgm_run(obj, obj.manifold().point(VectorXd::Ones(5)), cfg);
  std::ostringstream a, b;
  write_trace_csv(a, r);
  write_trace_csv(b, tr_rmpgm_run(obj, obj.manifold().point(VectorXd::Ones(5)), cfg));
  CHECK(a.str() == b.str());
  std::istringstream in(a.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,F1,F2,eta_norm,param,rho,accepted,wall_nanos");
  CHECK(a.str().find('\r') == std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == static_cast<int>(r.trace.size()));
  for (double v : {0.1, 1.0 / 3.0, 2.5e-300, -7.0, 123456789.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(std::nan("")) == "nan");
}
