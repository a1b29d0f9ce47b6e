#pragma once

// Synthetic clouds and the scaling experiments built on them. Every trial
// draws its randomness from (seed, trial, n), so results do not depend on
// thread count or completion order.

#include "nsmds/core.hpp"
#include "nsmds/graph.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nsmds {

enum class Generator { UniformDisk, UniformBall, Grid, Annulus, CurveCardioid };

[[nodiscard]] std::string to_string(Generator generator);
/// "uniform-disk", "uniform-ball", "grid", "annulus", "curve-cardioid".
[[nodiscard]] Generator parse_generator(const std::string& name);

/// Description of the three-lobed curve used for equal-eigenvalue clouds.
[[nodiscard]] std::string curve_cardioid_parameters();

struct ExperimentConfig {
  Generator generator = Generator::UniformDisk;
  std::vector<Index> n_list;
  Index k = 2;
  double sigma = 0.0;
  Index trials = 1;
  std::uint64_t seed = 0;
  LocalStrategy strategy = LocalStrategy::Nearest;
  double zeta = 0.25;
  std::string output_path;
  bool debias = true;
  unsigned threads = 0;  // 0: hardware concurrency

  /// Throws InvalidInput unless trials >= 1, n_list is strictly ascending and
  /// non-empty, k >= 1, sigma >= 0 and 0 < zeta < 1/2.
  void validate() const;
};

/// Seeded cloud inside the unit ball. uniform-disk, annulus and
/// curve-cardioid are planar (k = 2). grid fills a centred cubic lattice
/// with ceil(n^(1/k)) points per side in lexicographic order.
[[nodiscard]] PointCloud generate(Generator generator, Index n, Index k, std::uint64_t seed);
/// First size of the list with the config seed.
[[nodiscard]] PointCloud generate(const ExperimentConfig& config);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;  // (log n, log y)
};

/// Least-squares line through (log x, log y). Throws InvalidInput with
/// "need ≥ 3 sizes to fit" for fewer than three points, and for nonpositive
/// values.
[[nodiscard]] ScalingFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y);

/// Runs fn(0) .. fn(count - 1) on up to `threads` workers (0: hardware
/// concurrency). The first exception thrown is rethrown after all finish.
template <typename Fn>
void parallel_for(Index count, unsigned threads, Fn&& fn);

/// RNG seed of one trial.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t seed, Index trial, Index n);

struct LossRow {
  Index n = 0;
  double median_loss = 0.0;
  std::vector<double> losses;     // per trial, in trial order
  std::optional<double> envelope; // large-n bound with unit prefactor, trial 0 cloud
  Index negative_draws = 0;
  Index clamped_eigenvalues = 0;
};

struct NoiseScalingResult {
  ExperimentConfig config;
  std::vector<LossRow> rows;
  std::optional<ScalingFit> fit;
  std::string fit_note;  // why the fit is absent
  double seconds = 0.0;
};

/// Per size and trial: generate, perturb every distance with N(0, sigma^2),
/// optionally debias, run full cMDS and score against the clean cloud.
[[nodiscard]] NoiseScalingResult run_noise_scaling(const ExperimentConfig& config);

struct CostRow {
  Index n = 0;
  Index rho = 0;
  Index edge_count = 0;
  double median_total_length = 0.0;
  std::vector<double> total_lengths;  // per trial
  double median_global_length = 0.0;
  double median_local_length = 0.0;
};

struct CostScalingResult {
  ExperimentConfig config;
  std::vector<CostRow> rows;
  ScalingFit fit;
  double target_slope = 0.0;  // 2k / (2k + 1)
  double seconds = 0.0;
};

/// Anchor graphs with rho_default on clean clouds; fits total edge length
/// against n.
[[nodiscard]] CostScalingResult run_cost_scaling(const ExperimentConfig& config);

struct GapTrial {
  std::uint64_t seed = 0;
  double loss = 0.0;
  double orientation = 0.0;  // angle of the fitted isometry, radians in (-pi, pi]
  bool reflection = false;
  double pi_1 = 0.0;
  double pi_2 = 0.0;
};

struct DegenerateGapResult {
  ExperimentConfig config;
  Index n = 0;
  std::vector<GapTrial> trials;
  double median_loss = 0.0;
  double seconds = 0.0;
};

/// Noisy cMDS on equal-eigenvalue clouds; reports loss and the orientation of
/// the recovered frame per trial. Uses the first size in the list.
[[nodiscard]] DegenerateGapResult run_degenerate_gap(const ExperimentConfig& config);

struct AnchorComparison {
  Index n = 0;
  std::vector<double> anchor_losses;
  std::vector<double> full_losses;
  double median_anchor_loss = 0.0;
  double median_full_loss = 0.0;
};

/// Same noisy data through the anchor pipeline and through full cMDS, both
/// debiased. Uses the first size in the list.
[[nodiscard]] AnchorComparison compare_anchor_and_full(const ExperimentConfig& config);

struct SpeedComparison {
  double quick_seconds = 0.0;
  double full_seconds = 0.0;
  [[nodiscard]] double speedup() const { return quick_seconds > 0.0 ? full_seconds / quick_seconds : 0.0; }
};

/// Best of `repeats` wall-clock runs of quick_mds and cmds_embed on `sdm`.
[[nodiscard]] SpeedComparison time_quick_and_full(const SquaredDistanceMatrix& sdm, Index k, std::uint64_t seed,
                                                  int repeats = 1);

[[nodiscard]] double median(std::vector<double> values);

/// Versioned JSON reports; wall-clock values only under "timings".
[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& config);
[[nodiscard]] nlohmann::json to_json(const ScalingFit& fit);
[[nodiscard]] nlohmann::json to_json(const NoiseScalingResult& result);
[[nodiscard]] nlohmann::json to_json(const CostScalingResult& result);
[[nodiscard]] nlohmann::json to_json(const DegenerateGapResult& result);

/// Plot-ready CSV: one row per (n, trial).
[[nodiscard]] std::string loss_table_csv(const NoiseScalingResult& result);
[[nodiscard]] std::string cost_table_csv(const CostScalingResult& result);
[[nodiscard]] std::string gap_table_csv(const DegenerateGapResult& result);

}  // namespace nsmds

#include "nsmds/detail/parallel.hpp"
