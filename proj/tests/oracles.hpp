#pragma once

// Independent reference implementations and hand-rolled generators for the
// test suites. Nothing here calls into the library's numerical routines, so
// agreement is evidence rather than tautology.

#include "nsmds/core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Edges = std::vector<std::pair<std::size_t, std::size_t>>;

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
// 1e-12 ||A||_F (at most 100 sweeps). Eigenvalues in descending order.
inline Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  const double scale = a.norm();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) <= 1e-12 * scale) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Eigen::VectorXd d = a.diagonal();
  std::sort(d.data(), d.data() + n, std::greater<>());
  return d;
}

inline Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = normal(rng);
  return m;
}

inline nsmds::PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, std::size_t k, double scale = 1.0) {
  std::uniform_real_distribution<double> unit(-scale, scale);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    for (Eigen::Index r = 0; r < x.rows(); ++r) x(r, c) = unit(rng);
  return nsmds::PointCloud(x);
}

inline nsmds::PointCloud random_disk(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::MatrixXd x(2, static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < x.cols();) {
    const double a = unit(rng), b = unit(rng);
    if (a * a + b * b > 1.0) continue;
    x(0, c) = a;
    x(1, c) = b;
    ++c;
  }
  return nsmds::PointCloud(x);
}

// Random orthogonal matrix (possibly a reflection) from QR of a Gaussian.
inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& rng, Eigen::Index k) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(k, k);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ();
}

inline Eigen::Matrix2d rotation2d(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

// Plain Euclidean distance between columns.
inline double dist(const Eigen::MatrixXd& x, Eigen::Index a, Eigen::Index b) { return (x.col(a) - x.col(b)).norm(); }

// Rank of the 2D rigidity matrix at random generic positions.
inline std::size_t rigidity_rank_2d(std::size_t n, const Edges& edges, std::uint64_t seed) {
  if (edges.empty()) return 0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::MatrixXd pos(2, static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < pos.size(); ++i) pos.data()[i] = unit(rng);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(edges.size()), static_cast<Eigen::Index>(2 * n));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    const Eigen::Vector2d d = pos.col(static_cast<Eigen::Index>(u)) - pos.col(static_cast<Eigen::Index>(v));
    const auto row = static_cast<Eigen::Index>(e);
    r.block<1, 2>(row, static_cast<Eigen::Index>(2 * u)) = d.transpose();
    r.block<1, 2>(row, static_cast<Eigen::Index>(2 * v)) = -d.transpose();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(r);
  lu.setThreshold(1e-9);
  return static_cast<std::size_t>(lu.rank());
}

// Connectivity by BFS over vertices not in `removed`.
inline bool connected_without(std::size_t n, const Edges& edges, const std::vector<bool>& removed) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::size_t first = n, alive = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (!removed[v]) {
      ++alive;
      if (first == n) first = v;
    }
  }
  if (alive <= 1) return true;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{first};
  seen[first] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t w : adj[u]) {
      if (!removed[w] && !seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == alive;
}

// True iff removing any set of fewer than t vertices leaves the graph
// connected (and n > t). Exhaustive over subsets of size t - 1.
inline bool brute_force_connectivity_at_least(std::size_t n, const Edges& edges, std::size_t t) {
  if (n <= t) return false;
  std::vector<bool> removed(n, false);
  std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t from, std::size_t left) -> bool {
    if (left == 0) return connected_without(n, edges, removed);
    for (std::size_t v = from; v < n; ++v) {
      removed[v] = true;
      const bool ok = rec(v + 1, left - 1);
      removed[v] = false;
      if (!ok) return false;
    }
    return true;
  };
  for (std::size_t size = 0; size < t; ++size)
    if (!rec(0, size)) return false;
  return true;
}

// Greedy max-min selection straight from coordinates, smallest index on ties.
inline std::pair<std::vector<std::size_t>, double> farthest_sampling(const Eigen::MatrixXd& x, std::size_t m,
                                                                      std::size_t start) {
  const auto n = static_cast<std::size_t>(x.cols());
  std::vector<double> d(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> picks{start};
  double radius = 0.0;
  auto relax = [&](std::size_t a) {
    for (std::size_t v = 0; v < n; ++v) {
      const double dv = dist(x, static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(a));
      d[v] = std::min(d[v], dv);
    }
  };
  relax(start);
  while (picks.size() < m) {
    std::size_t best = 0;
    for (std::size_t v = 1; v < n; ++v)
      if (d[v] > d[best]) best = v;
    radius = d[best];
    picks.push_back(best);
    relax(best);
  }
  return {picks, radius};
}

}  // namespace oracle
