#pragma once

// Bi-objective sparse recovery on the sphere:
//   F_i(x) = 0.5 ||A_i x - b_i||^2 + lambda_i ||x||_1,  ||x|| = 1,
// with ground-truth signals of disjoint support.
//
// File format (version 1): one line of compact JSON
//   {"n":..,"m_rows":..,"sparsity":..,"lambda1":..,"lambda2":..,"noise_std":..,"seed":..,"format_version":1}
// terminated by '\n', followed by little-endian IEEE-754 doubles:
// A1 (m_rows x n, column-major), A2, b1, b2, x1*, x2*.

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "riemopt/manifold.hpp"
#include "riemopt/objectives.hpp"

namespace riemopt::bench {

inline constexpr int kInstanceFormatVersion = 1;

struct InstanceParams {
  int n = 128;
  int m_rows = 50;
  double sparsity = 0.05;
  double lambda1 = 0.05;
  double lambda2 = 0.05;
  double noise_std = 0.01;
  std::uint64_t seed = 0;

  /// Nonzeros per ground-truth signal, ceil(sparsity * n).
  int support_size() const;
  void validate() const;
};

struct Instance {
  InstanceParams params;
  Eigen::MatrixXd A1, A2;
  Eigen::VectorXd b1, b2;
  Eigen::VectorXd x1_star, x2_star;
};

/// Deterministic in params (Threefry-2x32-20, one stream per component).
Instance generate_instance(const InstanceParams& params);

std::string serialize_instance(const Instance& inst);
Instance deserialize_instance(const std::string& bytes);
void save_instance(const std::string& path, const Instance& inst);
Instance load_instance(const std::string& path);

CompositeObjective make_objective(const Instance& inst, RetractionKind kind = RetractionKind::Projective);

/// Uniform point on S^{n-1} (normalized Gaussian) from (seed, stream).
Point random_sphere_point(const Manifold& sphere, std::uint64_t seed, std::uint32_t stream);

}  // namespace riemopt::bench
