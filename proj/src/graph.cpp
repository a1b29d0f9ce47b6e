#include "nsmds/graph.hpp"

#include "nsmds/cmds.hpp"
#include "nsmds/error.hpp"
#include "nsmds/random.hpp"
#include "nsmds/sampling.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <utility>

namespace nsmds {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

double angle_at(double a2, double b2, double opposite2) {
  // Law of cosines for the angle between sides of squared lengths a2, b2.
  const double denom = 2.0 * std::sqrt(a2 * b2);
  const double c = std::clamp((a2 + b2 - opposite2) / denom, -1.0, 1.0);
  return std::acos(c);
}

std::vector<Index> nearest_anchors(Index v, const std::vector<Index>& anchors, const SquaredDistanceMatrix& sdm,
                                   Index count) {
  std::vector<Index> order = anchors;
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double da = sdm(v, a);
    const double db = sdm(v, b);
    return da != db ? da < db : a < b;
  });
  order.resize(std::min(count, order.size()));
  return order;
}

std::vector<Index> random_anchors(Rng& rng, const std::vector<Index>& anchors, Index count) {
  std::vector<Index> pool = anchors;
  for (Index t = 0; t < count; ++t) {
    const Index pick = t + static_cast<Index>(rng.below(pool.size() - t));
    std::swap(pool[t], pool[pick]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace

std::string to_string(LocalStrategy strategy) {
  switch (strategy) {
    case LocalStrategy::Nearest: return "nearest";
    case LocalStrategy::Stable2D: return "stable2d";
    case LocalStrategy::Random: return "random";
  }
  return "nearest";
}

LocalStrategy parse_strategy(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "nearest") return LocalStrategy::Nearest;
  if (lower == "stable2d") return LocalStrategy::Stable2D;
  if (lower == "random") return LocalStrategy::Random;
  throw InvalidInput("unknown local edge strategy: " + name);
}

bool AnchorGraph::is_anchor(Index v) const { return std::find(anchors.begin(), anchors.end(), v) != anchors.end(); }

Index AnchorGraph::local_edge_count() const {
  Index count = 0;
  for (const auto& edges : local_edges) count += edges.size();
  return count;
}

std::vector<std::string> AnchorGraph::check_invariants() const {
  std::vector<std::string> issues;
  const Index r = anchors.size();
  if (r < k + 2) issues.push_back("fewer than k + 2 anchors");
  std::vector<bool> anchor_flag(n, false);
  for (Index a : anchors) {
    if (a >= n) {
      issues.push_back("anchor index out of range");
      continue;
    }
    if (anchor_flag[a]) issues.push_back("duplicate anchor " + std::to_string(a));
    anchor_flag[a] = true;
  }
  if (global_edges.size() != r * (r - 1) / 2) issues.push_back("global edge count is not |R|(|R|-1)/2");
  std::vector<std::pair<Index, Index>> pairs;
  for (const auto& e : global_edges) {
    if (e.i >= n || e.j >= n || !anchor_flag[e.i] || !anchor_flag[e.j] || e.i == e.j) {
      issues.push_back("global edge does not join two distinct anchors");
      break;
    }
    pairs.emplace_back(std::min(e.i, e.j), std::max(e.i, e.j));
  }
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) issues.push_back("duplicate global edge");
  if (!stable_triple.empty() && stable_triple.size() != n) issues.push_back("stable-triple flags do not cover every vertex");
  if (local_edges.size() != n) {
    issues.push_back("local edge table does not cover every vertex");
    return issues;
  }
  for (Index v = 0; v < n; ++v) {
    if (anchor_flag[v]) {
      if (!local_edges[v].empty()) issues.push_back("anchor " + std::to_string(v) + " has local edges");
      continue;
    }
    std::vector<Index> targets;
    for (const auto& e : local_edges[v]) {
      if (e.anchor >= n || !anchor_flag[e.anchor]) issues.push_back("local edge of " + std::to_string(v) + " ends at a non-anchor");
      targets.push_back(e.anchor);
    }
    std::sort(targets.begin(), targets.end());
    if (std::adjacent_find(targets.begin(), targets.end()) != targets.end()) {
      issues.push_back("vertex " + std::to_string(v) + " repeats a local anchor");
    }
    if (local_edges[v].size() < k + 1) issues.push_back("vertex " + std::to_string(v) + " has fewer than k + 1 local edges");
  }
  return issues;
}

Index rho_default(Index n, Index k) {
  if (k < 1) throw InvalidInput("rho_default: k must be positive");
  const double exponent = static_cast<double>(k) / static_cast<double>(2 * k + 1);
  const double raw = std::pow(static_cast<double>(n), exponent);
  // Snap values that are integers up to rounding so exact powers do not round up.
  const double nearest = std::round(raw);
  const double value = std::abs(raw - nearest) <= 1e-9 * std::max(1.0, raw) ? nearest : std::ceil(raw);
  return std::max<Index>(k + 2, static_cast<Index>(value));
}

double anchor_set_conditioning(const SquaredDistanceMatrix& sdm, const std::vector<Index>& anchors) {
  if (anchors.size() < 2) return 0.0;
  const auto m = static_cast<Eigen::Index>(anchors.size() - 1);
  // Gram matrix of a_m - a_0 via the polarization identity.
  Eigen::MatrixXd gram(m, m);
  const Index base = anchors.front();
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      const Index ia = anchors[static_cast<Index>(a) + 1];
      const Index ib = anchors[static_cast<Index>(b) + 1];
      gram(a, b) = 0.5 * (sdm(base, ia) + sdm(base, ib) - sdm(ia, ib));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const double hi = es.eigenvalues().maxCoeff();
  const double lo = es.eigenvalues().minCoeff();
  if (hi <= 0.0 || lo <= 0.0) return 0.0;
  return std::sqrt(lo / hi);
}

double stable_angle_tolerance(double radius, double delta) {
  if (!(radius > 0.0) || delta < 0.0) throw InvalidInput("stable_angle_tolerance: need radius > 0, delta >= 0");
  return std::acos(std::clamp(radius / (4.0 * (radius + delta)), -1.0, 1.0));
}

StableTriple select_stable_anchors_2d(Index p, const std::vector<Index>& anchors, const SquaredDistanceMatrix& sdm,
                                      double radius, double delta) {
  const double ball = 2.0 * radius + delta;
  // Candidates come from B(p, 2(e + delta)), which contains the pair whose
  // existence the angle guarantee asserts.
  const double search = 2.0 * (radius + delta);
  Index inside = 0;
  std::vector<Index> candidates;
  for (Index a : anchors) {
    if (a == p) throw InvalidInput("select_stable_anchors_2d: p is itself an anchor");
    const double d = sdm.distance(p, a);
    if (d <= ball) ++inside;
    if (d <= search) candidates.push_back(a);
  }
  if (inside < 3) throw NotInterior("fewer than three anchors within 2e + delta");

  const Index r_i = nearest_anchors(p, anchors, sdm, 1).front();
  const double d_pi2 = sdm(p, r_i);
  if (d_pi2 <= 0.0) throw NotInterior("vertex coincides with an anchor");

  Index r_j = r_i;
  double best_angle = 0.0;
  double best_offset = std::numbers::pi;
  for (Index c : candidates) {
    if (c == r_i || sdm(p, c) <= 0.0) continue;
    const double angle = angle_at(d_pi2, sdm(p, c), sdm(r_i, c));
    const double offset = std::abs(angle - kHalfPi);
    if (offset < best_offset) {
      best_offset = offset;
      best_angle = angle;
      r_j = c;
    }
  }
  if (r_j == r_i || best_offset > stable_angle_tolerance(radius, delta)) {
    throw NotInterior("no anchor pair near a right angle at the vertex");
  }

  // Local frame: p at the origin, r_i on the +x axis, r_j in the upper half plane.
  const double d_pi = std::sqrt(d_pi2);
  const double d_pj = sdm.distance(p, r_j);
  const Eigen::Vector2d pi_pos(d_pi, 0.0);
  const Eigen::Vector2d pj_pos(d_pj * std::cos(best_angle), d_pj * std::sin(best_angle));
  const Eigen::Vector2d line = pj_pos - pi_pos;
  auto cross = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); };
  const double p_side = cross(line, -pi_pos) >= 0.0 ? 1.0 : -1.0;

  Index r_k = r_i;
  double best_side = 0.0;
  for (Index c : candidates) {
    if (c == r_i || c == r_j) continue;
    const double d_pc2 = sdm(p, c);
    const double x = (d_pi2 + d_pc2 - sdm(r_i, c)) / (2.0 * d_pi);
    const double y = std::sqrt(std::max(0.0, d_pc2 - x * x));
    const Eigen::Vector2d up(x, y);
    const Eigen::Vector2d down(x, -y);
    const double d_jc = sdm.distance(r_j, c);
    const Eigen::Vector2d pos = std::abs((up - pj_pos).norm() - d_jc) <= std::abs((down - pj_pos).norm() - d_jc) ? up : down;
    const double side = p_side * cross(line, pos - pi_pos) / line.norm();
    if (side > best_side) {
      best_side = side;
      r_k = c;
    }
  }
  if (r_k == r_i) throw NotInterior("no side witness on the vertex's side of line r_i r_j");
  return {r_i, r_j, r_k, best_angle};
}

AnchorGraph build_anchor_graph(const SquaredDistanceMatrix& true_sdm, const SquaredDistanceMatrix& observed_sdm, Index k,
                               Index rho, const GraphOptions& options) {
  const Index n = true_sdm.size();
  if (observed_sdm.size() != n) throw InvalidInput("build_anchor_graph: true and observed matrices differ in size");
  if (k < 1) throw InvalidInput("build_anchor_graph: k must be positive");
  if (rho > n) throw InvalidInput("build_anchor_graph: rho exceeds n");
  if (rho < k + 2) throw InvalidInput("build_anchor_graph: rho must be at least k + 2");
  if (options.strategy == LocalStrategy::Stable2D && k != 2) throw InvalidInput("STABLE2D strategy requires k = 2");

  AnchorGraph g;
  g.n = n;
  g.k = k;
  g.strategy = options.strategy;
  const SampleResult sample = farthest_sampling(true_sdm, rho, options.start);
  g.anchors = sample.indices;
  g.radius = sample.radius;

  auto observed_length = [&](Index a, Index b) {
    if (!observed_sdm.observed(a, b)) {
      throw InvalidInput("pair (" + std::to_string(a) + ", " + std::to_string(b) + ") is not observed");
    }
    return observed_sdm.distance(a, b);
  };

  for (Index a = 0; a < rho; ++a) {
    for (Index b = a + 1; b < rho; ++b) {
      g.global_edges.push_back({g.anchors[a], g.anchors[b], observed_length(g.anchors[a], g.anchors[b])});
    }
  }

  std::vector<bool> anchor_flag(n, false);
  for (Index a : g.anchors) anchor_flag[a] = true;
  g.local_edges.assign(n, {});
  g.stable_triple.assign(n, false);

  std::optional<PointCloud> planar;
  if (options.strategy == LocalStrategy::Stable2D) {
    g.delta = options.delta.value_or(0.5 * g.radius);
    if (!(g.delta > 0.0)) throw InvalidInput("STABLE2D requires a positive delta");
    if (options.geometry) {
      if (options.geometry->dim() != 2 || options.geometry->size() != n) throw InvalidInput("STABLE2D geometry must be 2 x n");
      planar = options.geometry;
    } else {
      planar = cmds_embed(true_sdm, 2).cloud;
    }
  }

  for (Index v = 0; v < n; ++v) {
    if (anchor_flag[v]) continue;
    std::vector<Index> chosen;
    switch (options.strategy) {
      case LocalStrategy::Nearest:
        chosen = nearest_anchors(v, g.anchors, true_sdm, k + 1);
        break;
      case LocalStrategy::Random: {
        Rng rng(derive_seed(options.seed, v));
        chosen = random_anchors(rng, g.anchors, k + 1);
        for (Index attempt = 0; attempt < options.max_redraws; ++attempt) {
          if (anchor_set_conditioning(true_sdm, chosen) >= options.degeneracy_tol) break;
          ++g.redraw_count;
          chosen = random_anchors(rng, g.anchors, k + 1);
        }
        if (options.max_redraws > 0 && anchor_set_conditioning(true_sdm, chosen) < options.degeneracy_tol) {
          chosen = nearest_anchors(v, g.anchors, true_sdm, k + 1);
          ++g.fallback_count;
        }
        break;
      }
      case LocalStrategy::Stable2D: {
        const Eigen::Vector2d pos = planar->coords().col(static_cast<Eigen::Index>(v));
        if (interiority_2d(pos, *planar, g.radius, g.delta)) {
          try {
            const StableTriple t = select_stable_anchors_2d(v, g.anchors, true_sdm, g.radius, g.delta);
            chosen = {t.r_i, t.r_j, t.r_k};
            g.stable_triple[v] = true;
          } catch (const NotInterior&) {
          }
        }
        if (chosen.empty()) {
          chosen = nearest_anchors(v, g.anchors, true_sdm, k + 1);
          ++g.fallback_count;
        }
        break;
      }
    }
    for (Index a : chosen) g.local_edges[v].push_back({a, observed_length(v, a)});
  }
  return g;
}

CostReport cost_report(const AnchorGraph& graph, const SquaredDistanceMatrix& true_sdm) {
  if (true_sdm.size() != graph.n) throw InvalidInput("cost_report: matrix size does not match graph");
  CostReport out;
  for (const auto& e : graph.global_edges) out.global_length += true_sdm.distance(e.i, e.j);
  for (Index v = 0; v < graph.n; ++v) {
    for (const auto& e : graph.local_edges[v]) {
      const double len = true_sdm.distance(v, e.anchor);
      out.local_length += len;
      out.max_local_edge_length = std::max(out.max_local_edge_length, len);
    }
  }
  out.total_length = out.global_length + out.local_length;
  out.edge_count = graph.edge_count();
  return out;
}

}  // namespace nsmds
