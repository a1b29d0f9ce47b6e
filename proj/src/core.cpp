#include "nsmds/core.hpp"

#include "nsmds/error.hpp"

#include <algorithm>
#include <cmath>

namespace nsmds {

namespace {

Eigen::Index as_eigen(Index i) { return static_cast<Eigen::Index>(i); }

}  // namespace

PointCloud::PointCloud(Eigen::MatrixXd coords, std::vector<std::string> labels)
    : coords_(std::move(coords)), labels_(std::move(labels)) {
  if (coords_.rows() < 1) throw InvalidInput("point cloud dimension must be positive");
  if (coords_.cols() < 1) throw InvalidInput("point cloud must contain at least one point");
  if (!labels_.empty() && labels_.size() != size()) {
    throw InvalidInput("label count does not match point count");
  }
  if (!coords_.allFinite()) throw InvalidInput("point cloud has non-finite coordinates");
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InvalidInput("point cloud must contain at least one point");
  const Index dim = rows.front().size();
  Eigen::MatrixXd coords(as_eigen(dim), as_eigen(rows.size()));
  for (Index i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) {
      throw InvalidInput("point " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                         " coordinates, expected " + std::to_string(dim));
    }
    for (Index c = 0; c < dim; ++c) coords(as_eigen(c), as_eigen(i)) = rows[i][c];
  }
  return PointCloud(std::move(coords));
}

PointCloud PointCloud::centered() const {
  Eigen::MatrixXd c = coords_.colwise() - centroid();
  return PointCloud(std::move(c), labels_);
}

PointCloud PointCloud::subset(const std::vector<Index>& indices) const {
  if (indices.empty()) throw InvalidInput("subset must be non-empty");
  Eigen::MatrixXd out(coords_.rows(), as_eigen(indices.size()));
  std::vector<std::string> labels;
  for (Index c = 0; c < indices.size(); ++c) {
    if (indices[c] >= size()) throw InvalidInput("subset index out of range");
    out.col(as_eigen(c)) = coords_.col(as_eigen(indices[c]));
    if (!labels_.empty()) labels.push_back(labels_[indices[c]]);
  }
  return PointCloud(std::move(out), std::move(labels));
}

SquaredDistanceMatrix::SquaredDistanceMatrix(Eigen::MatrixXd entries, std::optional<Mask> mask)
    : entries_(std::move(entries)), mask_(std::move(mask)) {
  if (entries_.rows() != entries_.cols()) throw InvalidInput("squared distance matrix must be square");
  if (entries_.rows() < 1) throw InvalidInput("squared distance matrix must be non-empty");
  if (!entries_.allFinite()) throw InvalidInput("squared distance matrix has non-finite entries");
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;
  const Eigen::Index n = entries_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(entries_(i, i)) > tol) throw InvalidInput("squared distance matrix diagonal must be zero");
    entries_(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(entries_(i, j) - entries_(j, i)) > tol) {
        throw InvalidInput("squared distance matrix must be symmetric");
      }
      const double avg = 0.5 * (entries_(i, j) + entries_(j, i));
      entries_(i, j) = avg;
      entries_(j, i) = avg;
    }
  }
  if (mask_) {
    if (mask_->rows() != n || mask_->cols() != n) throw InvalidInput("mask size does not match matrix");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(*mask_)(i, i)) throw InvalidInput("mask diagonal must be true");
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if ((*mask_)(i, j) != (*mask_)(j, i)) throw InvalidInput("mask must be symmetric");
      }
    }
    if (mask_->all()) mask_.reset();
  }
}

double SquaredDistanceMatrix::distance(Index i, Index j) const {
  return std::sqrt(std::max(0.0, (*this)(i, j)));
}

bool SquaredDistanceMatrix::observed(Index i, Index j) const {
  return !mask_ || (*mask_)(as_eigen(i), as_eigen(j));
}

Index SquaredDistanceMatrix::observed_pair_count() const {
  const Index n = size();
  if (!mask_) return n * (n - 1) / 2;
  Index count = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) count += observed(i, j) ? 1 : 0;
  }
  return count;
}

SquaredDistanceMatrix SquaredDistanceMatrix::submatrix(const std::vector<Index>& indices) const {
  const auto m = as_eigen(indices.size());
  Eigen::MatrixXd sub(m, m);
  std::optional<Mask> sub_mask;
  if (mask_) sub_mask = Mask(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      const Index i = indices[static_cast<Index>(a)];
      const Index j = indices[static_cast<Index>(b)];
      if (i >= size() || j >= size()) throw InvalidInput("submatrix index out of range");
      sub(a, b) = (*this)(i, j);
      if (sub_mask) (*sub_mask)(a, b) = observed(i, j);
    }
  }
  return SquaredDistanceMatrix(std::move(sub), std::move(sub_mask));
}

ScaleParams ScaleParams::from_values(std::vector<double> pi) {
  if (pi.empty()) throw InvalidInput("scale parameters need at least one value");
  for (Index i = 0; i < pi.size(); ++i) {
    if (pi[i] < 0.0) throw InvalidInput("scale parameters must be nonnegative");
    if (i > 0 && pi[i] > pi[i - 1]) throw InvalidInput("scale parameters must be non-increasing");
  }
  ScaleParams out;
  out.pi = std::move(pi);
  out.h_val = out.pi.front();
  out.j_val = out.pi.back();
  out.g_val = out.pi.back();
  for (Index i = 0; i + 1 < out.pi.size(); ++i) out.g_val = std::min(out.g_val, out.pi[i] - out.pi[i + 1]);
  out.degenerate = out.j_val == 0.0;
  return out;
}

PointCloud Alignment::apply(const PointCloud& cloud) const {
  if (rotation.rows() != as_eigen(cloud.dim()) || translation.size() != as_eigen(cloud.dim())) {
    throw InvalidInput("alignment dimension does not match cloud");
  }
  Eigen::MatrixXd moved = (rotation * cloud.coords()).colwise() + translation;
  return PointCloud(std::move(moved), cloud.labels());
}

double squared_distance(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  double sum = 0.0;
  for (Eigen::Index c = 0; c < a.size(); ++c) {
    const double diff = a[c] - b[c];
    sum += diff * diff;
  }
  return sum;
}

SquaredDistanceMatrix squared_distance_matrix(const PointCloud& cloud) {
  const auto n = as_eigen(cloud.size());
  const Eigen::MatrixXd& x = cloud.coords();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = squared_distance(x.col(i), x.col(j));
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return SquaredDistanceMatrix(std::move(d));
}

Eigen::MatrixXd gram_from_sdm(const SquaredDistanceMatrix& sdm) {
  if (!sdm.is_full()) throw InvalidInput("double centering requires full observation");
  const Eigen::MatrixXd& d = sdm.entries();
  const Eigen::VectorXd row_mean = d.rowwise().mean();
  const double grand_mean = row_mean.mean();
  // D is symmetric, so column means equal row means.
  Eigen::MatrixXd g = d;
  g.rowwise() -= row_mean.transpose();
  g.colwise() -= row_mean;
  g.array() += grand_mean;
  g *= -0.5;
  return 0.5 * (g + g.transpose());
}

ScaleParams scale_params(const PointCloud& cloud) {
  const Eigen::MatrixXd c = cloud.centered().coords();
  const auto n = static_cast<double>(cloud.size());
  // P P^T shares its nonzero spectrum with the n x n Gram matrix P^T P.
  const Eigen::MatrixXd cov = c * c.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  std::vector<double> pi(cloud.dim());
  for (Index i = 0; i < pi.size(); ++i) {
    pi[i] = std::max(0.0, ev[ev.size() - 1 - as_eigen(i)]) / n;
  }
  const double rank_tol = 1e-12 * std::max(pi.front(), 0.0);
  bool degenerate = pi.front() <= 0.0;
  for (double& v : pi) {
    if (v <= rank_tol) {
      v = 0.0;
      degenerate = true;
    }
  }
  ScaleParams out = ScaleParams::from_values(std::move(pi));
  out.degenerate = degenerate;
  return out;
}

StructuralLoss structural_loss(const PointCloud& estimate, const PointCloud& reference) {
  if (estimate.dim() != reference.dim()) throw InvalidInput("structural loss: dimension mismatch");
  if (estimate.size() != reference.size()) throw InvalidInput("structural loss: point count mismatch");
  const Eigen::VectorXd mean_k = estimate.centroid();
  const Eigen::VectorXd mean_p = reference.centroid();
  const Eigen::MatrixXd kc = estimate.coords().colwise() - mean_k;
  const Eigen::MatrixXd pc = reference.coords().colwise() - mean_p;
  const Eigen::MatrixXd cross = kc * pc.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  StructuralLoss out;
  out.alignment.rotation = svd.matrixU() * svd.matrixV().transpose();
  out.alignment.translation = mean_k - out.alignment.rotation * mean_p;
  const Eigen::MatrixXd residual = kc - out.alignment.rotation * pc;
  out.loss = residual.norm() / std::sqrt(static_cast<double>(estimate.size()));
  return out;
}

}  // namespace nsmds
