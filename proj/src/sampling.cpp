#include "nsmds/sampling.hpp"

#include "nsmds/error.hpp"

#include <cmath>
#include <limits>

namespace nsmds {

SampleResult farthest_sampling(const SquaredDistanceMatrix& sdm, Index m, Index start) {
  if (!sdm.is_full()) throw InvalidInput("farthest_sampling requires a fully observed matrix");
  const Index n = sdm.size();
  if (m < 1 || m > n) throw InvalidInput("farthest_sampling: m must lie in [1, n]");
  if (start >= n) throw InvalidInput("farthest_sampling: start index out of range");

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(n, false);
  SampleResult out;
  out.indices.reserve(m);

  auto take = [&](Index pick) {
    chosen[pick] = true;
    out.indices.push_back(pick);
    for (Index j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], sdm.distance(pick, j));
  };

  take(start);
  for (Index t = 1; t < m; ++t) {
    Index best = n;
    for (Index i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      if (best == n || nearest[i] > nearest[best]) best = i;
    }
    out.radius = nearest[best];
    take(best);
  }
  if (m == 1) {
    out.radius = 0.0;
    for (Index j = 0; j < n; ++j) out.radius = std::max(out.radius, nearest[j]);
  }
  return out;
}

bool is_eps_sparse(const PointCloud& cloud, double eps) {
  const Eigen::MatrixXd& x = cloud.coords();
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < x.cols(); ++j) {
      const double d2 = squared_distance(x.col(i), x.col(j));
      if (d2 == 0.0) continue;
      if (std::sqrt(d2) < eps) return false;
    }
  }
  return true;
}

bool is_eps_cover(const PointCloud& covered, const PointCloud& cover, double eps) {
  if (covered.dim() != cover.dim()) throw InvalidInput("is_eps_cover: dimension mismatch");
  const Eigen::MatrixXd& x = covered.coords();
  const Eigen::MatrixXd& y = cover.coords();
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    bool hit = false;
    for (Eigen::Index j = 0; j < y.cols() && !hit; ++j) hit = std::sqrt(squared_distance(x.col(i), y.col(j))) <= eps;
    if (!hit) return false;
  }
  return true;
}

bool interiority_2d(const Eigen::Vector2d& p, const PointCloud& cloud, double eps, double delta, double grid_step) {
  if (cloud.dim() != 2) throw InvalidInput("interiority_2d requires a planar cloud");
  if (!(grid_step > 0.0)) throw InvalidInput("interiority_2d: grid_step must be positive");
  if (eps < 0.0 || delta < 0.0) throw InvalidInput("interiority_2d: eps and delta must be nonnegative");

  const double disk = eps + delta;
  const double reach = delta + grid_step * std::sqrt(2.0) / 2.0;
  // Only points that can serve some grid node matter.
  const double keep = disk + reach;
  std::vector<Eigen::Vector2d> nearby;
  for (Index i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector2d q = cloud.coords().col(static_cast<Eigen::Index>(i));
    if ((q - p).norm() <= keep) nearby.push_back(q);
  }

  const auto steps = static_cast<long>(std::floor(disk / grid_step));
  const double reach2 = reach * reach;
  for (long a = -steps; a <= steps; ++a) {
    for (long b = -steps; b <= steps; ++b) {
      const Eigen::Vector2d node = p + grid_step * Eigen::Vector2d(static_cast<double>(a), static_cast<double>(b));
      if ((node - p).norm() > disk) continue;
      bool hit = false;
      for (const auto& q : nearby) {
        if ((q - node).squaredNorm() <= reach2) {
          hit = true;
          break;
        }
      }
      if (!hit) return false;
    }
  }
  return true;
}

bool interiority_2d(const Eigen::Vector2d& p, const PointCloud& cloud, double eps, double delta) {
  return interiority_2d(p, cloud, eps, delta, delta / 4.0);
}

}  // namespace nsmds
