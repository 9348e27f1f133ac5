#pragma once

// Small seeded instances shared by the unit and acceptance tests.

#include <cstdint>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "riemopt/objectives.hpp"
#include "riemopt/random.hpp"

namespace fixtures {

inline Eigen::MatrixXd normal_matrix(riemopt::CounterRng& rng, Eigen::Index r, Eigen::Index c) {
  return rng.normal_vector(r * c).reshaped(r, c);
}

/// Two LS + L1 objectives on S^{n-1}; lambda large enough that the L1 kinks matter.
inline riemopt::CompositeObjective small_sphere_problem(std::uint64_t seed, Eigen::Index n = 3, double lambda = 0.3) {
  riemopt::CounterRng rng(seed, 7);
  const Eigen::MatrixXd A1 = normal_matrix(rng, n, n), A2 = normal_matrix(rng, n, n);
  const Eigen::VectorXd b1 = rng.normal_vector(n), b2 = rng.normal_vector(n);
  return riemopt::CompositeObjective(riemopt::Manifold::sphere(n),
                                     {{riemopt::make_least_squares(A1, b1), riemopt::make_l1(lambda)},
                                      {riemopt::make_least_squares(A2, b2), riemopt::make_l1(lambda)}});
}

struct QuadraticProblem {
  riemopt::CompositeObjective obj;
  /// Exact gradient Lipschitz constant: max_i lambda_max(Q_i).
  double L;
};

/// m strongly convex quadratics 0.5 (x-c_i)^T Q_i (x-c_i) + lambda ||x||_1 on R^n.
inline QuadraticProblem euclidean_quadratic_problem(std::uint64_t seed, Eigen::Index n = 6, int m = 2,
                                                    double lambda = 0.1) {
  riemopt::CounterRng rng(seed, 9);
  std::vector<std::pair<riemopt::SmoothTerm, riemopt::NonsmoothTerm>> terms;
  double L = 0.0;
  for (int i = 0; i < m; ++i) {
    const Eigen::MatrixXd B = normal_matrix(rng, n, n);
    const Eigen::MatrixXd Q = B.transpose() * B / static_cast<double>(n) + 0.5 * Eigen::MatrixXd::Identity(n, n);
    L = std::max(L, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q).eigenvalues().maxCoeff());
    terms.emplace_back(riemopt::make_quadratic(Q, 2.0 * rng.normal_vector(n)), riemopt::make_l1(lambda));
  }
  return {riemopt::CompositeObjective(riemopt::Manifold::euclidean(n), std::move(terms)), L};
}

}  // namespace fixtures
