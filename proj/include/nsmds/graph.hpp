#pragma once

// Anchor-point graphs: a farthest-sampled anchor set R joined pairwise by
// global edges, plus k+1 local edges from every other vertex into R.

#include "nsmds/core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nsmds {

enum class LocalStrategy { Nearest, Stable2D, Random };

[[nodiscard]] std::string to_string(LocalStrategy strategy);
/// Accepts "nearest", "stable2d", "random" (case-insensitive).
[[nodiscard]] LocalStrategy parse_strategy(const std::string& name);

struct GlobalEdge {
  Index i = 0;
  Index j = 0;
  double length = 0.0;  // observed
};

struct LocalEdge {
  Index anchor = 0;
  double length = 0.0;  // observed
};

struct AnchorGraph {
  Index n = 0;
  Index k = 0;
  std::vector<Index> anchors;                     // farthest-sampling order
  std::vector<GlobalEdge> global_edges;           // every anchor pair, i < j in anchor order
  std::vector<std::vector<LocalEdge>> local_edges;  // per vertex; empty for anchors
  /// Per vertex: local edges hold a stable triple (r_i, r_j, r_k) in that order.
  std::vector<bool> stable_triple;
  double radius = 0.0;  // sampling radius e
  double delta = 0.0;   // cover tolerance used by STABLE2D (0 otherwise)
  LocalStrategy strategy = LocalStrategy::Nearest;
  Index fallback_count = 0;  // vertices that fell back to nearest anchors
  Index redraw_count = 0;    // RANDOM anchor sets rejected as degenerate

  [[nodiscard]] bool is_anchor(Index v) const;
  [[nodiscard]] Index local_edge_count() const;
  [[nodiscard]] Index edge_count() const { return global_edges.size() + local_edge_count(); }
  /// Structural invariants (edge counts, distinct anchors, |R| >= k + 2);
  /// returns a description of every violation found.
  [[nodiscard]] std::vector<std::string> check_invariants() const;
};

struct GraphOptions {
  LocalStrategy strategy = LocalStrategy::Nearest;
  std::uint64_t seed = 0;  // RANDOM draws
  Index start = 0;         // first farthest-sampling pick
  /// STABLE2D cover tolerance; defaults to half the sampling radius.
  std::optional<double> delta;
  /// STABLE2D planar coordinates for the interiority test; recovered from the
  /// true SDM by cMDS when absent.
  std::optional<PointCloud> geometry;
  /// RANDOM: redraw anchor sets whose conditioning is below
  /// `degeneracy_tol` up to this many times, then use the nearest anchors.
  Index max_redraws = 0;
  double degeneracy_tol = 1e-3;
};

struct StableTriple {
  Index r_i = 0;
  Index r_j = 0;
  Index r_k = 0;
  double angle = 0.0;  // angle r_i p r_j in radians
};

struct CostReport {
  double total_length = 0.0;
  double global_length = 0.0;
  double local_length = 0.0;
  Index edge_count = 0;
  double max_local_edge_length = 0.0;
};

/// max(k + 2, ceil(n^(k / (2k + 1)))).
[[nodiscard]] Index rho_default(Index n, Index k);

/// Ratio of smallest to largest singular value of the edge vectors
/// a_m - a_0 of an anchor set, computed from distances alone. 0 means
/// affinely dependent.
[[nodiscard]] double anchor_set_conditioning(const SquaredDistanceMatrix& sdm, const std::vector<Index>& anchors);

/// Minimum angle to the perpendicular that a stable pair must reach:
/// phi = arccos(e / (4 (e + delta))).
[[nodiscard]] double stable_angle_tolerance(double radius, double delta);

/// Picks a well-conditioned triple for vertex p: r_i nearest anchor, r_j the
/// anchor making the angle r_i p r_j closest to pi/2, r_k the anchor farthest
/// from line r_i r_j on p's side. Throws NotInterior when fewer than three
/// anchors lie within 2e + delta, when no pair reaches
/// [pi/2 - phi, pi/2 + phi], or when no side witness exists.
[[nodiscard]] StableTriple select_stable_anchors_2d(Index p, const std::vector<Index>& anchors,
                                                    const SquaredDistanceMatrix& true_sdm, double radius, double delta);

/// Selection geometry comes from `true_sdm`, edge lengths from `observed_sdm`
/// (pass the same matrix twice in field mode).
[[nodiscard]] AnchorGraph build_anchor_graph(const SquaredDistanceMatrix& true_sdm,
                                             const SquaredDistanceMatrix& observed_sdm, Index k, Index rho,
                                             const GraphOptions& options = {});

[[nodiscard]] CostReport cost_report(const AnchorGraph& graph, const SquaredDistanceMatrix& true_sdm);

}  // namespace nsmds
