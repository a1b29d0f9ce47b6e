#pragma once

// Geometric primitives shared by every stage of the pipeline: point clouds,
// squared distance matrices, double centering, per-direction scale parameters
// and the structural loss (RMS residual after the best isometry).

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace nsmds {

using Index = std::size_t;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// n points in R^k stored column-wise as a k x n matrix.
class PointCloud {
 public:
  explicit PointCloud(Eigen::MatrixXd coords, std::vector<std::string> labels = {});

  /// One row per point; every row must have the same length.
  static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

  [[nodiscard]] Index dim() const { return static_cast<Index>(coords_.rows()); }
  [[nodiscard]] Index size() const { return static_cast<Index>(coords_.cols()); }
  [[nodiscard]] const Eigen::MatrixXd& coords() const { return coords_; }
  [[nodiscard]] Eigen::VectorXd point(Index i) const { return coords_.col(static_cast<Eigen::Index>(i)); }
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }

  [[nodiscard]] Eigen::VectorXd centroid() const { return coords_.rowwise().mean(); }
  /// Copy translated so that the centroid sits at the origin.
  [[nodiscard]] PointCloud centered() const;
  /// Columns selected by `indices`, in that order.
  [[nodiscard]] PointCloud subset(const std::vector<Index>& indices) const;

 private:
  Eigen::MatrixXd coords_;
  std::vector<std::string> labels_;
};

/// Symmetric matrix of squared pairwise distances with zero diagonal,
/// optionally restricted to an observed edge set by a symmetric mask.
///
/// Entries are normally nonnegative; bias-corrected estimates (observed minus
/// noise variance) may dip slightly below zero and are stored as-is.
class SquaredDistanceMatrix {
 public:
  /// Symmetry and the zero diagonal are checked to 1e-9 relative to the
  /// largest entry, then enforced exactly.
  explicit SquaredDistanceMatrix(Eigen::MatrixXd entries, std::optional<Mask> mask = std::nullopt);

  [[nodiscard]] Index size() const { return static_cast<Index>(entries_.rows()); }
  [[nodiscard]] const Eigen::MatrixXd& entries() const { return entries_; }
  [[nodiscard]] double operator()(Index i, Index j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  /// Euclidean length sqrt(max(0, D_ij)).
  [[nodiscard]] double distance(Index i, Index j) const;

  [[nodiscard]] bool is_full() const { return !mask_.has_value(); }
  [[nodiscard]] const std::optional<Mask>& mask() const { return mask_; }
  [[nodiscard]] bool observed(Index i, Index j) const;
  /// Number of observed unordered pairs i < j.
  [[nodiscard]] Index observed_pair_count() const;

  /// Principal submatrix on `indices`, in that order.
  [[nodiscard]] SquaredDistanceMatrix submatrix(const std::vector<Index>& indices) const;

 private:
  Eigen::MatrixXd entries_;
  std::optional<Mask> mask_;
};

/// Per-principal-direction variances pi_i = lambda_i / n of a cloud.
struct ScaleParams {
  std::vector<double> pi;  // descending, length k
  double h_val = 0.0;      // pi_1
  double j_val = 0.0;      // pi_k (0 when degenerate)
  double g_val = 0.0;      // min_i pi_i - pi_{i+1}, with pi_{k+1} = 0
  bool degenerate = false;

  /// Derives h, j, g from a descending list; throws if the list is empty,
  /// negative or not non-increasing.
  static ScaleParams from_values(std::vector<double> pi);
};

/// Isometry x -> rotation * x + translation; rotation may be a reflection.
struct Alignment {
  Eigen::MatrixXd rotation;
  Eigen::VectorXd translation;

  [[nodiscard]] PointCloud apply(const PointCloud& cloud) const;
};

struct StructuralLoss {
  double loss = 0.0;
  Alignment alignment;  // maps the reference cloud onto the estimate
};

/// Squared Euclidean distance with a fixed summation order; every module that
/// compares distances against radii derived from an SDM goes through this.
[[nodiscard]] double squared_distance(const Eigen::Ref<const Eigen::VectorXd>& a,
                                      const Eigen::Ref<const Eigen::VectorXd>& b);

[[nodiscard]] SquaredDistanceMatrix squared_distance_matrix(const PointCloud& cloud);

/// G = -1/2 H D H with H = I - 11^T / n. Requires a fully observed matrix.
[[nodiscard]] Eigen::MatrixXd gram_from_sdm(const SquaredDistanceMatrix& sdm);

[[nodiscard]] ScaleParams scale_params(const PointCloud& cloud);

/// inf over isometries S of ||estimate - S(reference)||_F / sqrt(n), solved in
/// closed form via the SVD of the k x k cross-covariance. Reflections allowed.
[[nodiscard]] StructuralLoss structural_loss(const PointCloud& estimate, const PointCloud& reference);

}  // namespace nsmds
