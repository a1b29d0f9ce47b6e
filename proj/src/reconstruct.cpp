#include "nsmds/reconstruct.hpp"

#include "nsmds/cmds.hpp"
#include "nsmds/error.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>

namespace nsmds {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Minimizes (|t| - d_i)^2 + (|t - len| - d_j)^2 over the center line, piecewise.
double center_line_parameter(double len, double d_i, double d_j) {
  auto cost = [&](double t) {
    const double a = std::abs(t) - d_i;
    const double b = std::abs(t - len) - d_j;
    return a * a + b * b;
  };
  const std::array<double, 3> candidates = {
      std::clamp(0.5 * (len + d_i - d_j), 0.0, len),  // between the centers
      std::max(len, 0.5 * (d_i + len + d_j)),         // beyond r_j
      std::min(0.0, -0.5 * (d_i + d_j - len)),        // beyond r_i
  };
  double best = candidates[0];
  for (double t : candidates) {
    if (cost(t) < cost(best)) best = t;
  }
  return best;
}

ReconstructionReport empty_report(Index k, Index n) {
  ReconstructionReport report{PointCloud(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n))),
                              std::nullopt, std::nullopt, StageTimings{}, 0, 0, 0, 0, 0, {}};
  return report;
}

}  // namespace

Trilateration trilaterate_2d(const Eigen::Vector2d& r_i, double d_i, const Eigen::Vector2d& r_j, double d_j,
                             const Eigen::Vector2d& r_k) {
  const Eigen::Vector2d axis = r_j - r_i;
  const double len = axis.norm();
  if (len == 0.0) throw DegenerateConfiguration("trilaterate_2d: coincident circle centers");
  const Eigen::Vector2d u = axis / len;
  const Eigen::Vector2d normal(-u.y(), u.x());

  Trilateration out;
  if (d_i + d_j < len || std::abs(d_i - d_j) > len) {
    out.circle_miss = true;
    out.point = r_i + center_line_parameter(len, d_i, d_j) * u;
    return out;
  }
  const double along = (d_i * d_i - d_j * d_j + len * len) / (2.0 * len);
  const double across = std::sqrt(std::max(0.0, d_i * d_i - along * along));
  const Eigen::Vector2d base = r_i + along * u;
  const Eigen::Vector2d plus = base + across * normal;
  const Eigen::Vector2d minus = base - across * normal;
  const double to_plus = (plus - r_k).squaredNorm();
  const double to_minus = (minus - r_k).squaredNorm();
  if (to_plus < to_minus) {
    out.point = plus;
  } else if (to_minus < to_plus) {
    out.point = minus;
  } else {
    // r_k sits on the center line: neither side is preferred.
    out.point = base;
  }
  return out;
}

Eigen::VectorXd trilaterate_kd(const Eigen::MatrixXd& anchors, const Eigen::VectorXd& distances) {
  const Eigen::Index k = anchors.rows();
  const Eigen::Index m = anchors.cols();
  if (m != distances.size()) throw InvalidInput("trilaterate_kd: anchor and distance counts differ");
  if (m < k + 1) throw InvalidInput("trilaterate_kd: need at least k + 1 anchors");
  // With y = x - a_0:  2 (a_m - a_0) . y = |a_m - a_0|^2 + d_0^2 - d_m^2.
  const Eigen::VectorXd origin = anchors.col(0);
  Eigen::MatrixXd system(m - 1, k);
  Eigen::VectorXd rhs(m - 1);
  for (Eigen::Index r = 1; r < m; ++r) {
    const Eigen::VectorXd edge = anchors.col(r) - origin;
    system.row(r - 1) = 2.0 * edge.transpose();
    rhs[r - 1] = edge.squaredNorm() + distances[0] * distances[0] - distances[r] * distances[r];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  // Embedded coordinates of a flat anchor set carry sqrt-of-rounding noise
  // (about 1e-8 relative), so the rank cut sits above that.
  if (sv.size() < k || sv[0] == 0.0 || sv[k - 1] <= 1e-7 * sv[0]) {
    throw DegenerateConfiguration("trilaterate_kd: anchors do not affinely span R^k");
  }
  return origin + svd.solve(rhs);
}

ReconstructionReport reconstruct(const AnchorGraph& graph, const std::optional<BiasMatrix>& bias, Index k,
                                 const std::optional<PointCloud>& truth) {
  if (k != graph.k) throw InvalidInput("reconstruct: k does not match the graph");
  if (bias && bias->size() != graph.n) throw InvalidInput("reconstruct: bias matrix size does not match the graph");
  if (truth && (truth->size() != graph.n || truth->dim() != k)) throw InvalidInput("reconstruct: ground truth shape mismatch");
  const auto issues = graph.check_invariants();
  if (!issues.empty()) throw InvalidInput("reconstruct: malformed anchor graph: " + issues.front());

  const auto start = Clock::now();
  const Index n = graph.n;
  const Index rho = graph.anchors.size();
  std::vector<Index> slot(n, rho);
  for (Index a = 0; a < rho; ++a) slot[graph.anchors[a]] = a;

  // Stage 1: cMDS on the anchor block.
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rho), static_cast<Eigen::Index>(rho));
  for (const auto& e : graph.global_edges) {
    const auto a = static_cast<Eigen::Index>(slot[e.i]);
    const auto b = static_cast<Eigen::Index>(slot[e.j]);
    block(a, b) = e.length * e.length;
    block(b, a) = block(a, b);
  }
  SquaredDistanceMatrix anchor_sdm(std::move(block));
  if (bias) anchor_sdm = debias(anchor_sdm, bias->submatrix(graph.anchors));
  const Embedding anchor_embedding = cmds_embed(anchor_sdm, k);
  const Eigen::MatrixXd& anchor_pos = anchor_embedding.cloud.coords();

  ReconstructionReport report = empty_report(k, n);
  report.clamped_eigenvalues = anchor_embedding.clamped;
  report.fallback_count = graph.fallback_count;
  report.redraw_count = graph.redraw_count;
  report.degenerate_vertices.assign(n, false);
  report.timings.anchor_seconds = seconds_since(start);

  // Stage 2: place the remaining vertices independently.
  const auto placement_start = Clock::now();
  Eigen::MatrixXd coords(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
  for (Index a = 0; a < rho; ++a) {
    coords.col(static_cast<Eigen::Index>(graph.anchors[a])) = anchor_pos.col(static_cast<Eigen::Index>(a));
  }
  for (Index v = 0; v < n; ++v) {
    if (slot[v] != rho) continue;
    const auto& edges = graph.local_edges[v];
    auto anchor_at = [&](Index e) { return anchor_pos.col(static_cast<Eigen::Index>(slot[edges[e].anchor])); };
    const auto col = static_cast<Eigen::Index>(v);
    if (k == 2 && !graph.stable_triple.empty() && graph.stable_triple[v]) {
      try {
        const Trilateration t = trilaterate_2d(anchor_at(0), edges[0].length, anchor_at(1), edges[1].length, anchor_at(2));
        if (t.circle_miss) ++report.circle_miss_count;
        coords.col(col) = t.point;
        continue;
      } catch (const DegenerateConfiguration&) {
        // Falls through to the linear solver with all three anchors.
      }
    }
    Eigen::MatrixXd local(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(edges.size()));
    Eigen::VectorXd dists(static_cast<Eigen::Index>(edges.size()));
    for (Index e = 0; e < edges.size(); ++e) {
      local.col(static_cast<Eigen::Index>(e)) = anchor_at(e);
      dists[static_cast<Eigen::Index>(e)] = edges[e].length;
    }
    try {
      coords.col(col) = trilaterate_kd(local, dists);
    } catch (const DegenerateConfiguration&) {
      coords.col(col) = local.rowwise().mean();
      report.degenerate_vertices[v] = true;
      ++report.degenerate_count;
    }
  }
  report.cloud = PointCloud(std::move(coords));
  report.timings.placement_seconds = seconds_since(placement_start);
  report.timings.total_seconds = seconds_since(start);

  if (truth) {
    report.loss = structural_loss(report.cloud, *truth).loss;
    report.anchor_loss = structural_loss(report.cloud.subset(graph.anchors), truth->subset(graph.anchors)).loss;
  }
  return report;
}

ReconstructionReport quick_mds(const SquaredDistanceMatrix& sdm, Index k, std::uint64_t seed,
                               const std::optional<PointCloud>& truth) {
  if (!sdm.is_full()) throw InvalidInput("quick_mds requires a fully observed matrix");
  const Index n = sdm.size();
  if (n < k + 2) throw InvalidInput("quick_mds needs at least k + 2 points");
  const auto start = Clock::now();
  GraphOptions options;
  options.strategy = LocalStrategy::Random;
  options.seed = seed;
  options.max_redraws = 10;
  const AnchorGraph graph = build_anchor_graph(sdm, sdm, k, std::min(n, rho_default(n, k)), options);
  const double sampling = seconds_since(start);
  ReconstructionReport report = reconstruct(graph, std::nullopt, k, truth);
  report.timings.sampling_seconds = sampling;
  report.timings.total_seconds = seconds_since(start);
  return report;
}

double Sensitivity::max_primary() const { return std::max({wrt_d_i, wrt_d_j, wrt_r_i, wrt_r_j}); }

Sensitivity sensitivity_probe(const Eigen::Vector2d& r_i, double d_i, const Eigen::Vector2d& r_j, double d_j,
                              const Eigen::Vector2d& r_k, double step) {
  if (!(step > 0.0)) throw InvalidInput("sensitivity_probe: step must be positive");
  const Trilateration base = trilaterate_2d(r_i, d_i, r_j, d_j, r_k);
  if (base.circle_miss) throw InvalidInput("sensitivity_probe: circles do not intersect");

  auto solve = [&](const Eigen::Vector2d& ri, double di, const Eigen::Vector2d& rj, double dj, const Eigen::Vector2d& rk) {
    return trilaterate_2d(ri, di, rj, dj, rk).point;
  };
  auto jacobian_norm = [&](auto&& eval) {
    Eigen::Matrix2d jac;
    for (int c = 0; c < 2; ++c) {
      Eigen::Vector2d h = Eigen::Vector2d::Zero();
      h[c] = step;
      jac.col(c) = (eval(h) - eval(Eigen::Vector2d(-h))) / (2.0 * step);
    }
    return Eigen::JacobiSVD<Eigen::Matrix2d>(jac).singularValues()[0];
  };

  Sensitivity out;
  out.wrt_d_i = ((solve(r_i, d_i + step, r_j, d_j, r_k) - solve(r_i, d_i - step, r_j, d_j, r_k)) / (2.0 * step)).norm();
  out.wrt_d_j = ((solve(r_i, d_i, r_j, d_j + step, r_k) - solve(r_i, d_i, r_j, d_j - step, r_k)) / (2.0 * step)).norm();
  out.wrt_r_i = jacobian_norm([&](const Eigen::Vector2d& h) { return solve(r_i + h, d_i, r_j, d_j, r_k); });
  out.wrt_r_j = jacobian_norm([&](const Eigen::Vector2d& h) { return solve(r_i, d_i, r_j + h, d_j, r_k); });
  out.wrt_r_k = jacobian_norm([&](const Eigen::Vector2d& h) { return solve(r_i, d_i, r_j, d_j, r_k + h); });

  const Eigen::Vector2d a = r_i - base.point;
  const Eigen::Vector2d b = r_j - base.point;
  out.alpha = std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
  out.analytic = 1.0 / std::sin(out.alpha);
  return out;
}

}  // namespace nsmds
