#pragma once

// Two-stage reconstruction from an anchor graph: cMDS on the anchor block,
// then trilateration of every other vertex against the placed anchors.

#include "nsmds/core.hpp"
#include "nsmds/graph.hpp"
#include "nsmds/noise.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace nsmds {

struct Trilateration {
  Eigen::Vector2d point = Eigen::Vector2d::Zero();
  bool circle_miss = false;  // circles did not intersect; least-squares point on the center line
};

struct StageTimings {
  double sampling_seconds = 0.0;
  double anchor_seconds = 0.0;
  double placement_seconds = 0.0;
  double total_seconds = 0.0;
};

struct ReconstructionReport {
  PointCloud cloud;
  std::optional<double> loss;         // vs ground truth, when supplied
  std::optional<double> anchor_loss;  // restricted to anchors
  StageTimings timings;
  Index fallback_count = 0;    // stable-triple fallbacks carried from the graph
  Index circle_miss_count = 0;
  Index degenerate_count = 0;  // vertices placed at their anchors' centroid
  Index redraw_count = 0;      // quick_mds anchor-set redraws
  Index clamped_eigenvalues = 0;
  std::vector<bool> degenerate_vertices;
};

/// Intersects circles (r_i, d_i) and (r_j, d_j), keeping the intersection
/// nearer to the side witness r_k. Throws DegenerateConfiguration for
/// coincident centers.
[[nodiscard]] Trilateration trilaterate_2d(const Eigen::Vector2d& r_i, double d_i, const Eigen::Vector2d& r_j, double d_j,
                                           const Eigen::Vector2d& r_k);

/// Linearized multilateration: anchors are the columns of a k x (k+1) (or
/// wider) matrix; subtracting the first sphere equation leaves a linear
/// system solved in the least-squares sense. Throws DegenerateConfiguration
/// when the anchors do not affinely span R^k.
[[nodiscard]] Eigen::VectorXd trilaterate_kd(const Eigen::MatrixXd& anchors, const Eigen::VectorXd& distances);

/// `bias` supplies Sigma for debiasing the anchor block (omit for raw
/// input); `truth` enables the loss fields.
[[nodiscard]] ReconstructionReport reconstruct(const AnchorGraph& graph, const std::optional<BiasMatrix>& bias, Index k,
                                               const std::optional<PointCloud>& truth = std::nullopt);

/// Randomized anchor scheme on a full SDM: farthest-sampled anchors with
/// rho_default(n, k), k+1 random anchors per vertex (degenerate draws redrawn
/// up to 10 times, then nearest anchors).
[[nodiscard]] ReconstructionReport quick_mds(const SquaredDistanceMatrix& sdm, Index k, std::uint64_t seed,
                                             const std::optional<PointCloud>& truth = std::nullopt);

struct Sensitivity {
  double wrt_d_i = 0.0;
  double wrt_d_j = 0.0;
  double wrt_r_i = 0.0;  // operator 2-norm of the 2x2 Jacobian
  double wrt_r_j = 0.0;
  double wrt_r_k = 0.0;
  double alpha = 0.0;     // intersection angle r_i p r_j
  double analytic = 0.0;  // 1 / sin(alpha)

  [[nodiscard]] double max_primary() const;  // max over d_i, d_j, r_i, r_j
};

/// Central finite differences of trilaterate_2d with step `step`.
[[nodiscard]] Sensitivity sensitivity_probe(const Eigen::Vector2d& r_i, double d_i, const Eigen::Vector2d& r_j, double d_j,
                                            const Eigen::Vector2d& r_k, double step);

}  // namespace nsmds
