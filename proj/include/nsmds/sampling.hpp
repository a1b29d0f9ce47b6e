#pragma once

// Farthest-point sampling, epsilon-net predicates and the planar interiority
// test used when choosing well-conditioned anchor triples.

#include "nsmds/core.hpp"

#include <vector>

namespace nsmds {

struct SampleResult {
  std::vector<Index> indices;  // selection order
  double radius = 0.0;         // d-value of the last pick; see farthest_sampling
};

/// Greedy max-min selection of m points starting from `start`. Ties on the
/// running distance go to the smallest index. For m >= 2 the radius is the
/// running distance of the last pick at the moment it was chosen; for m = 1 it
/// is the distance from `start` to the farthest point (so the result still
/// covers every point).
[[nodiscard]] SampleResult farthest_sampling(const SquaredDistanceMatrix& sdm, Index m, Index start = 0);

/// True iff every two points of `cloud` with distinct coordinates are at
/// least `eps` apart. Coincident points count as the same point.
[[nodiscard]] bool is_eps_sparse(const PointCloud& cloud, double eps);

/// True iff every point of `covered` lies within `eps` of some point of `cover`.
[[nodiscard]] bool is_eps_cover(const PointCloud& covered, const PointCloud& cover, double eps);

/// Discretized check that `cloud` is a delta-cover of the disk B(p, eps + delta).
/// Grid points inside the disk (spacing grid_step, aligned on p) must each lie
/// within delta + grid_step * sqrt(2) / 2 of a point of `cloud`.
[[nodiscard]] bool interiority_2d(const Eigen::Vector2d& p, const PointCloud& cloud, double eps, double delta,
                                  double grid_step);

/// grid_step = delta / 4.
[[nodiscard]] bool interiority_2d(const Eigen::Vector2d& p, const PointCloud& cloud, double eps, double delta);

}  // namespace nsmds
