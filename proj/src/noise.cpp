#include "nsmds/noise.hpp"

#include "nsmds/error.hpp"
#include "nsmds/random.hpp"

#include <algorithm>
#include <cmath>

namespace nsmds {

NoiseSpec::NoiseSpec(Eigen::MatrixXd sigma, std::uint64_t seed) : sigma_(std::move(sigma)), seed_(seed) {
  if (sigma_.rows() != sigma_.cols() || sigma_.rows() < 1) throw InvalidInput("noise sigma must be a non-empty square matrix");
  if (!sigma_.allFinite()) throw InvalidInput("noise sigma has non-finite entries");
  for (Eigen::Index i = 0; i < sigma_.rows(); ++i) {
    if (sigma_(i, i) != 0.0) throw InvalidInput("noise sigma diagonal must be zero");
    for (Eigen::Index j = 0; j < sigma_.cols(); ++j) {
      if (sigma_(i, j) < 0.0) throw InvalidInput("noise sigma must be nonnegative");
      if (sigma_(i, j) != sigma_(j, i)) throw InvalidInput("noise sigma must be symmetric");
    }
  }
}

NoiseSpec NoiseSpec::uniform(Index n, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw InvalidInput("noise sigma must be nonnegative");
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(m, m, sigma);
  s.diagonal().setZero();
  return NoiseSpec(std::move(s), seed);
}

double NoiseSpec::sigma_max() const { return sigma_.maxCoeff(); }

BiasMatrix::BiasMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1) throw InvalidInput("bias matrix must be a non-empty square matrix");
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    if (entries_(i, i) != 0.0) throw InvalidInput("bias matrix diagonal must be zero");
    for (Eigen::Index j = i + 1; j < entries_.cols(); ++j) {
      if (entries_(i, j) != entries_(j, i)) throw InvalidInput("bias matrix must be symmetric");
    }
  }
}

BiasMatrix BiasMatrix::submatrix(const std::vector<Index>& indices) const {
  const auto m = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = (*this)(indices[static_cast<Index>(a)], indices[static_cast<Index>(b)]);
  }
  return BiasMatrix(std::move(sub));
}

double pair_offset(std::uint64_t seed, Index i, Index j, double sigma) {
  if (sigma == 0.0) return 0.0;
  return sigma * counter_normal(seed, std::min(i, j), std::max(i, j));
}

PerturbedDistances perturb_distances(const SquaredDistanceMatrix& sdm, const NoiseSpec& spec) {
  if (sdm.size() != spec.size()) throw InvalidInput("perturb_distances: size mismatch between matrix and noise spec");
  const Index n = sdm.size();
  Eigen::MatrixXd out = sdm.entries();
  Index negatives = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (!sdm.observed(i, j)) continue;
      const double sigma = spec.sigma()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (sigma == 0.0) continue;
      const double noisy = sdm.distance(i, j) + pair_offset(spec.seed(), i, j, sigma);
      if (noisy < 0.0) ++negatives;
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      out(a, b) = noisy * noisy;
      out(b, a) = out(a, b);
    }
  }
  return {SquaredDistanceMatrix(std::move(out), sdm.mask()), negatives};
}

BiasMatrix bias_matrix(const NoiseSpec& spec) { return BiasMatrix(spec.sigma().array().square().matrix()); }

SquaredDistanceMatrix debias(const SquaredDistanceMatrix& observed, const BiasMatrix& bias) {
  if (observed.size() != bias.size()) throw InvalidInput("debias: size mismatch");
  const Index n = observed.size();
  Eigen::MatrixXd out = observed.entries();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j || !observed.observed(i, j)) continue;
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= bias(i, j);
    }
  }
  out.diagonal().setZero();
  return SquaredDistanceMatrix(std::move(out), observed.mask());
}

}  // namespace nsmds
