#pragma once

// Independent additive Gaussian noise on pairwise distances and the matching
// bias correction for squared distances.

#include "nsmds/core.hpp"

#include <cstdint>

namespace nsmds {

/// Per-pair standard deviations sigma_ij plus the seed that fixes every draw.
class NoiseSpec {
 public:
  /// sigma must be square, symmetric, nonnegative, zero on the diagonal.
  NoiseSpec(Eigen::MatrixXd sigma, std::uint64_t seed);
  static NoiseSpec uniform(Index n, double sigma, std::uint64_t seed);

  [[nodiscard]] Index size() const { return static_cast<Index>(sigma_.rows()); }
  [[nodiscard]] const Eigen::MatrixXd& sigma() const { return sigma_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] double sigma_max() const;

 private:
  Eigen::MatrixXd sigma_;
  std::uint64_t seed_;
};

/// Sigma_ij = sigma_ij^2, the expected inflation of an observed squared distance.
class BiasMatrix {
 public:
  explicit BiasMatrix(Eigen::MatrixXd entries);
  static BiasMatrix zero(Index n) { return BiasMatrix(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))); }

  [[nodiscard]] Index size() const { return static_cast<Index>(entries_.rows()); }
  [[nodiscard]] const Eigen::MatrixXd& entries() const { return entries_; }
  [[nodiscard]] double operator()(Index i, Index j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  [[nodiscard]] BiasMatrix submatrix(const std::vector<Index>& indices) const;

 private:
  Eigen::MatrixXd entries_;
};

struct PerturbedDistances {
  SquaredDistanceMatrix sdm;
  Index negative_draws = 0;  // pairs where d_ij + delta_ij < 0
};

/// The Gaussian offset delta_ij for the unordered pair {i, j}; a pure function
/// of (seed, min(i,j), max(i,j)).
[[nodiscard]] double pair_offset(std::uint64_t seed, Index i, Index j, double sigma);

/// d~_ij = d_ij + delta_ij on every observed pair, squared back into an SDM.
/// Pairs with sigma_ij = 0 are copied bit-for-bit.
[[nodiscard]] PerturbedDistances perturb_distances(const SquaredDistanceMatrix& sdm, const NoiseSpec& spec);

[[nodiscard]] BiasMatrix bias_matrix(const NoiseSpec& spec);

/// Observed-pair entries of D~ minus Sigma; diagonal forced to zero.
[[nodiscard]] SquaredDistanceMatrix debias(const SquaredDistanceMatrix& observed, const BiasMatrix& bias);

}  // namespace nsmds
