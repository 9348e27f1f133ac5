#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "riemopt/diagnostics.hpp"

using namespace riemopt;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

SmoothTerm corrupted(SmoothTerm f) {
  auto grad = f.ambient_gradient;
  f.ambient_gradient = [grad](const VectorXd& x) -> VectorXd {
    VectorXd g = grad(x);
    g[0] *= 1.1;
    return g;
  };
  return f;
}

RunResult tr_run(std::uint64_t seed, double* L) {
  auto [obj, exact] = fixtures::euclidean_quadratic_problem(seed);
  *L = exact;
  SolverConfig cfg;
  cfg.Ltilde_init = 0.05;
  cfg.max_iter = 1000;
  return tr_rmpgm_run(obj, obj.manifold().point(VectorXd::Constant(obj.dim(), 2.0)), cfg);
}

}  // namespace

TEST_CASE("report formatting") {
  const CheckReport r = make_report("demo", 0.5, 3, 1.0, "a, b");
  CHECK(r.passed);
  CHECK(r.to_text().rfind("PASS  demo", 0) == 0);
  CHECK(r.to_csv() == "demo,1,0.5,1,3,0,a; b");
  CHECK_FALSE(make_report("x", std::nan(""), 1, 1.0).passed);
}

TEST_CASE("finite-difference gradient check and its negative control") {
  CounterRng rng(1, 1);
  const Manifold S = Manifold::sphere(20);
  const SmoothTerm f = make_least_squares(fixtures::normal_matrix(rng, 10, 20), rng.normal_vector(10));
  const CheckReport good = fd_gradient_check(f, S, 50, 1e-6, 1);
  CHECK(good.passed);
  CHECK(good.worst_violation >= 0.0);
  const CheckReport bad = fd_gradient_check(corrupted(f), S, 50, 1e-6, 1);
  CHECK_FALSE(bad.passed);
  // deterministic in the seed
  CHECK(fd_gradient_check(f, S, 50, 1e-6, 1).worst_violation == good.worst_violation);
}

TEST_CASE("nonsmooth oracle checks catch a wrong subgradient and prox") {
  ConvexBase broken;
  broken.name = "broken-l1";
  broken.value = [](const VectorXd& v) { return v.lpNorm<1>(); };
  broken.subgradient = [](const VectorXd& v) -> VectorXd { return -v.array().sign().matrix(); };
  broken.prox = [](const VectorXd& v, double) -> VectorXd { return v; };
  broken.lipschitz = [](Eigen::Index n) { return std::sqrt(static_cast<double>(n)); };
  const NonsmoothTerm g = make_custom_nonsmooth(broken);
  CHECK(convexity_check(g, 8, 100, 1e-12).passed);
  CHECK_FALSE(subgradient_check(g, 8, 100, 1e-12).passed);
  CHECK_FALSE(prox_check(g, 8, 100, 1e-10).passed);
}

TEST_CASE("geometry suite") {
  for (const Manifold& M : {Manifold::sphere(8, RetractionKind::Projective),
                            Manifold::sphere(8, RetractionKind::Exponential), Manifold::euclidean(8)}) {
    CHECK(retraction_axiom_check(M, 30).passed);
    CHECK(d_retract_fd_check(M, 30, 1e-6).passed);
    CHECK(adjoint_pairing_check(M, 1000, 1e-10).passed);
    CHECK(adjoint_inverse_roundtrip_check(M, 100, 1e-9).passed);
    CHECK(transport_consistency_check(M, 30, 1e-9).passed);
    CHECK(transport_limit_check(M, 30).passed);
  }
}

TEST_CASE("descent trace check") {
  const CompositeObjective obj = fixtures::small_sphere_problem(2, 10, 0.1);
  const Point x0 = obj.manifold().point(VectorXd::LinSpaced(10, -1.0, 1.0));
  SolverConfig cfg;
  cfg.max_iter = 100;
  const RunResult r = rmpgm_run(obj, x0, cfg);
  CHECK(descent_trace_check(r).passed);

  SUBCASE("RMSD traces are skipped") {
    const CheckReport s = descent_trace_check(rmsd_run(obj, x0, cfg));
    CHECK(s.skipped);
    CHECK(s.passed);
    CHECK(s.samples == 0);
  }
  SUBCASE("single-iterate trace is vacuous") {
    RunResult one;
    one.trace.resize(1);
    one.trace[0].F_values = VectorXd::Ones(2);
    const CheckReport s = descent_trace_check(one);
    CHECK(s.passed);
    CHECK(s.samples == 0);
  }
  SUBCASE("inflated certificates are caught") {
    std::vector<double> inflated = r.beta_certificates;
    for (double& b : inflated) b *= 1e6;
    CHECK_FALSE(descent_trace_check(r, inflated).passed);
  }
  SUBCASE("an increasing objective is caught") {
    RunResult tampered = r;
    REQUIRE(tampered.trace.size() > 2);
    tampered.trace[1].F_values = tampered.trace[0].F_values + VectorXd::Ones(2);
    CHECK_FALSE(descent_trace_check(tampered).passed);
  }
}

TEST_CASE("summability and iteration bound") {
  const CompositeObjective obj = fixtures::small_sphere_problem(4, 10, 0.1);
  SolverConfig cfg;
  cfg.max_iter = 400;
  const RunResult r = rmpgm_run(obj, obj.manifold().point(VectorXd::LinSpaced(10, 2.0, -1.0)), cfg);
  const double beta = r.certified_beta();
  REQUIRE(beta > 0.0);
  CHECK(square_summability_check(r, beta).passed);
  CHECK_FALSE(square_summability_check(r, 1e6 * beta).passed);
  if (r.converged()) CHECK(iteration_bound_check(r, beta, cfg.tol).passed);
  CHECK_FALSE(square_summability_check(r, 0.0).passed);
}

TEST_CASE("trust-region trace check and its negative control") {
  double L = 0;
  const RunResult r = tr_run(3, &L);
  const TrustRegionParams tp;
  CHECK(tr_sigma_bound_check(r, tp, L).passed);
  CHECK(tr_unsuccessful_run_check(r, tp, L).passed);
  CHECK(tr_very_successful_check(r, tp, L).passed);
  CHECK(tr_trace_check(r, tp, L).passed);

  RunResult injected = r;
  injected.trace[injected.trace.size() / 2].param = 10.0 * std::max(r.trace.front().param, tp.tau3 * L / (1.0 - tp.s2));
  CHECK_FALSE(tr_sigma_bound_check(injected, tp, L).passed);
  CHECK_FALSE(tr_trace_check(injected, tp, L).passed);

  SUBCASE("no unsuccessful iterations: run-length bound vacuous") {
    RunResult ok = r;
    for (IterationRecord& rec : ok.trace) rec.accepted = true;
    const CheckReport c = tr_unsuccessful_run_check(ok, tp, L);
    CHECK(c.passed);
    CHECK(c.worst_violation == 0.0);
  }
  SUBCASE("not a TR trace") { CHECK(tr_trace_check(RunResult{}, tp, L).skipped); }
}

TEST_CASE("measured smoothness on a Euclidean quadratic is at most exact L") {
  const auto [obj, L] = fixtures::euclidean_quadratic_problem(1);
  const double measured = measure_retraction_smoothness(obj, 100, 1);
  CHECK(measured <= L * (1.0 + 1e-8));
  CHECK(measured > 0.0);
}
