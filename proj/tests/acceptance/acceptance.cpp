// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "nsmds/cli.hpp"
#include "nsmds/cmds.hpp"
#include "nsmds/graph.hpp"
#include "nsmds/harness.hpp"
#include "nsmds/io.hpp"
#include "nsmds/reconstruct.hpp"
#include "nsmds/rigidity.hpp"
#include "nsmds/sampling.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace nsmds;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %-28s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s);
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome exact_recovery() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<Index> size(5, 400);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index k = 2 + t % 2;
    const PointCloud p = oracle::random_cloud(rng, size(rng), k);
    worst = std::max(worst, structural_loss(cmds_embed(squared_distance_matrix(p), k).cloud, p).loss);
  }
  const double s = seconds_since(start);
  return {worst <= 1e-8 && s < 30.0, fmt("max loss %.2e, %.1fs", worst, s)};
}

Outcome epsilon_net() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<Index> size(2, 1000);
  int bad = 0;
  for (int t = 0; t < 200; ++t) {
    const Index n = size(rng);
    const PointCloud p = t % 2 ? oracle::random_disk(rng, n) : oracle::random_cloud(rng, n, 1 + t % 3);
    const Index m = std::uniform_int_distribution<Index>(2, n)(rng);
    const Index start_index = std::uniform_int_distribution<Index>(0, n - 1)(rng);
    const SampleResult r = farthest_sampling(squared_distance_matrix(p), m, start_index);
    const PointCloud anchors = p.subset(r.indices);
    if (!is_eps_sparse(anchors, r.radius) || !is_eps_cover(p, anchors, r.radius)) ++bad;
  }
  const double s = seconds_since(start);
  return {bad == 0 && s < 60.0, fmt("%.0f violations in 200 runs, %.1fs", bad, s)};
}

Outcome noise_scaling() {
  const auto start = Clock::now();
  ExperimentConfig c;
  c.n_list = {100, 200, 400, 800, 1600};
  c.sigma = 0.01;
  c.trials = 20;
  c.seed = 1003;
  const NoiseScalingResult r = run_noise_scaling(c);
  const double s = seconds_since(start);
  if (!r.fit) return {false, "no fit: " + r.fit_note};
  return {r.fit->slope <= -0.35 && r.fit->r_squared >= 0.8 && s < 300.0,
          fmt("slope %.3f, r^2 %.3f, %.1fs", r.fit->slope, r.fit->r_squared, s)};
}

Outcome debias_benefit() {
  ExperimentConfig c;
  c.n_list = {300};
  c.sigma = 0.2;
  c.trials = 50;
  c.seed = 1004;
  const double fixed = run_noise_scaling(c).rows[0].median_loss;
  c.debias = false;
  const double raw = run_noise_scaling(c).rows[0].median_loss;
  return {fixed < raw, fmt("median loss debiased %.8e vs raw %.8e", fixed, raw)};
}

Outcome cost_exponent() {
  const auto start = Clock::now();
  ExperimentConfig c;
  c.n_list = {250, 500, 1000, 2000, 4000};
  c.trials = 3;
  c.seed = 1005;
  const CostScalingResult r = run_cost_scaling(c);
  const double s = seconds_since(start);
  return {r.fit.slope >= 0.65 && r.fit.slope <= 0.95 && s < 120.0,
          fmt("slope %.3f (target %.3f), %.1fs", r.fit.slope, r.target_slope, s)};
}

// Anchor graphs over the k = 2 sample set shared by the budget and rigidity checks.
std::vector<AnchorGraph> sample_graphs() {
  std::vector<AnchorGraph> graphs;
  std::mt19937_64 rng(1006);
  for (Index n : {100, 150, 200, 300, 400, 500}) {
    for (int rep = 0; rep < 2; ++rep) {
      const PointCloud p = rep == 0 ? oracle::random_disk(rng, n) : oracle::random_cloud(rng, n, 2);
      const SquaredDistanceMatrix d = squared_distance_matrix(p);
      for (LocalStrategy s : {LocalStrategy::Nearest, LocalStrategy::Stable2D, LocalStrategy::Random}) {
        GraphOptions o;
        o.strategy = s;
        o.seed = static_cast<std::uint64_t>(n * 10 + rep);
        o.max_redraws = 10;
        if (s == LocalStrategy::Stable2D) o.geometry = p;
        graphs.push_back(build_anchor_graph(d, d, 2, rho_default(n, 2), o));
      }
    }
  }
  return graphs;
}

Outcome edge_budget(const std::vector<AnchorGraph>& graphs) {
  int bad = 0;
  std::mt19937_64 rng(1007);
  std::vector<const AnchorGraph*> all;
  for (const auto& g : graphs) all.push_back(&g);
  // Add higher-dimensional graphs; the 6n bound applies to k = 2 only.
  std::vector<AnchorGraph> extra;
  for (Index k : {1, 3}) {
    const PointCloud p = oracle::random_cloud(rng, 600, k);
    const SquaredDistanceMatrix d = squared_distance_matrix(p);
    extra.push_back(build_anchor_graph(d, d, k, rho_default(600, k)));
  }
  for (const auto& g : extra) all.push_back(&g);
  for (const AnchorGraph* g : all) {
    const Index rho = g->anchors.size();
    if (g->edge_count() != rho * (rho - 1) / 2 + (g->k + 1) * (g->n - rho)) ++bad;
    if (g->k == 2 && g->n >= 100 && g->edge_count() > 6 * g->n) ++bad;
  }
  return {bad == 0, fmt("%.0f graphs, %.0f violations", static_cast<double>(all.size()), bad)};
}

Outcome rigidity(const std::vector<AnchorGraph>& graphs) {
  int bad = 0;
  for (const auto& g : graphs)
    if (!laman_check_2d(g) || !vertex_connectivity_at_least(g, 3)) ++bad;
  std::mt19937_64 rng(1008);
  int mismatch = 0;
  for (int t = 0; t < 20; ++t) {
    const Index n = std::uniform_int_distribution<Index>(4, 30)(rng);
    SimpleGraph g(n);
    if (t % 2 == 0) {
      const PointCloud p = oracle::random_disk(rng, n);
      const SquaredDistanceMatrix d = squared_distance_matrix(p);
      g = SimpleGraph::from_anchor_graph(build_anchor_graph(d, d, 2, std::min(n, rho_default(n, 2))));
    } else {
      std::bernoulli_distribution keep(std::min(1.0, 3.0 / static_cast<double>(n - 1)));
      for (Index u = 0; u < n; ++u)
        for (Index v = u + 1; v < n; ++v)
          if (keep(rng)) g.add_edge(u, v);
    }
    oracle::Edges edges(g.edges().begin(), g.edges().end());
    if (pebble_game_rank_2d(g) != oracle::rigidity_rank_2d(n, edges, 5000 + t)) ++mismatch;
  }
  return {bad == 0 && mismatch == 0,
          fmt("%.0f graphs failing, %.0f/20 pebble-rank mismatches", bad, mismatch)};
}

Outcome sensitivity() {
  double worst_ratio = 0.0;
  for (double alpha : {std::numbers::pi / 6, std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4,
                       5 * std::numbers::pi / 6}) {
    const double theta = -std::numbers::pi / 2 - alpha / 2;
    const Eigen::Vector2d ri = 1.5 * Eigen::Vector2d(std::cos(theta), std::sin(theta));
    const Eigen::Vector2d rj = 2.0 * Eigen::Vector2d(std::cos(theta + alpha), std::sin(theta + alpha));
    const Sensitivity s = sensitivity_probe(ri, 1.5, rj, 2.0, {0, 3}, 1e-6);
    worst_ratio = std::max(worst_ratio, std::abs(s.wrt_d_i * std::sin(alpha) - 1.0));
  }

  int configs = 0;
  double worst_bound = 0.0;
  std::mt19937_64 rng(1009);
  while (configs < 100) {
    const PointCloud p = oracle::random_disk(rng, 500);
    const SquaredDistanceMatrix d = squared_distance_matrix(p);
    GraphOptions o;
    o.strategy = LocalStrategy::Stable2D;
    o.geometry = p;
    const AnchorGraph g = build_anchor_graph(d, d, 2, rho_default(500, 2), o);
    const double lambda = 1.0 / std::cos(stable_angle_tolerance(g.radius, g.delta));
    for (Index v = 0; v < 500 && configs < 100; ++v) {
      if (!g.stable_triple[v]) continue;
      const auto& e = g.local_edges[v];
      const Sensitivity s = sensitivity_probe(p.point(e[0].anchor), e[0].length, p.point(e[1].anchor), e[1].length,
                                              p.point(e[2].anchor), 1e-7);
      worst_bound = std::max(worst_bound, s.max_primary() / lambda);
      ++configs;
    }
  }
  return {worst_ratio <= 0.01 && worst_bound <= 1.05,
          fmt("max |fd sin(a) - 1| %.2e, max sensitivity / lambda %.3f over %.0f triples", worst_ratio, worst_bound,
              configs)};
}

Outcome perturbation() {
  std::mt19937_64 rng(1010);
  int tested = 0, weyl_bad = 0, dk_bad = 0;
  while (tested < 100) {
    const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(4, 30)(rng);
    const Index k = std::uniform_int_distribution<Index>(1, 3)(rng);
    const PointCloud p = oracle::random_cloud(rng, static_cast<std::size_t>(n), 3);
    const Eigen::MatrixXd g = gram_from_sdm(squared_distance_matrix(p));
    const double gap = spectral_gap(symmetric_eig(g).eigenvalues, k);
    if (gap < 1e-6) continue;
    Eigen::MatrixXd e = oracle::random_symmetric(rng, n);
    const double scale = std::uniform_real_distribution<double>(0.01, 0.49)(rng) * gap;
    e *= scale / symmetric_eig(e).eigenvalues.cwiseAbs().maxCoeff();
    const PerturbationReport r = eigen_perturbation_report(g, g + e, k);
    const double e2 = r.e2norm;
    if (!(e2 < gap / 2)) continue;
    ++tested;
    for (double dl : r.eigenvalue_deltas)
      if (dl > e2 + 1e-8) ++weyl_bad;
    double worst = 0.0;
    for (double du : r.eigenvector_deltas) worst = std::max(worst, du);
    if (worst > 2 * std::sqrt(2.0) * e2 / gap + 1e-8) ++dk_bad;
  }
  return {weyl_bad == 0 && dk_bad == 0, fmt("%.0f pairs, %.0f eigenvalue and %.0f eigenvector violations", tested,
                                             weyl_bad, dk_bad)};
}

Outcome end_to_end() {
  ExperimentConfig c;
  c.n_list = {500};
  c.sigma = 0.01;
  c.trials = 20;
  c.seed = 1011;
  const AnchorComparison a = compare_anchor_and_full(c);
  const double ratio = a.median_anchor_loss / a.median_full_loss;

  std::mt19937_64 rng(1012);
  double exact = 0.0;
  for (int t = 0; t < 5; ++t) {
    const PointCloud p = oracle::random_disk(rng, 500);
    const SquaredDistanceMatrix d = squared_distance_matrix(p);
    exact = std::max(exact, *reconstruct(build_anchor_graph(d, d, 2, rho_default(500, 2)), std::nullopt, 2, p).loss);
  }

  const PointCloud big = generate(Generator::UniformDisk, 2000, 2, 1013);
  const SpeedComparison speed = time_quick_and_full(squared_distance_matrix(big), 2, 1013, 3);
  std::ostringstream detail;
  detail << fmt("median loss anchor/full %.4f/%.4f", a.median_anchor_loss, a.median_full_loss)
         << fmt(" (ratio %.2f), exact %.1e", ratio, exact)
         << fmt(", quick %.3fs vs full %.3fs", speed.quick_seconds, speed.full_seconds)
         << fmt(" (speedup %.1fx)", speed.speedup());
  return {ratio <= 10.0 && exact <= 1e-7 && speed.quick_seconds < speed.full_seconds, detail.str()};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "nsmds_acceptance";
  fs::remove_all(dir);
  const std::vector<std::vector<std::string>> runs = {
      {"noise-scaling", "--n", "100,200,400", "--sigma", "0.02", "--trials", "4", "--seed", "17"},
      {"cost-scaling", "--n", "200,400,800", "--strategy", "random", "--trials", "2", "--seed", "17"},
      {"degenerate-gap", "--n", "300", "--sigma", "0.01", "--trials", "4", "--seed", "17"},
  };
  int differ = 0;
  for (Index i = 0; i < runs.size(); ++i) {
    std::string texts[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path file = dir / (std::to_string(i) + "_" + std::to_string(rep) + ".json");
      std::vector<std::string> args = runs[i];
      args.insert(args.end(), {"--out", file.string()});
      std::ostringstream out, err;
      if (run_cli(args, out, err) != 0) return {false, "cli failed: " + err.str()};
      texts[rep] = io::dump(io::strip_timings(io::parse_json(io::read_text(file))));
    }
    if (texts[0] != texts[1]) ++differ;
  }
  return {differ == 0, fmt("%.0f of %.0f experiment reports differ", differ, static_cast<double>(runs.size()))};
}

}  // namespace

int main() {
  report(1, "exact recovery", exact_recovery);
  report(2, "epsilon-net property", epsilon_net);
  report(3, "noise scaling", noise_scaling);
  report(4, "debias benefit", debias_benefit);
  report(5, "cost exponent", cost_exponent);
  const std::vector<AnchorGraph> graphs = sample_graphs();
  report(6, "linear edge budget", [&] { return edge_budget(graphs); });
  report(7, "rigidity validators", [&] { return rigidity(graphs); });
  report(8, "trilateration sensitivity", sensitivity);
  report(9, "eigen perturbation", perturbation);
  report(10, "end-to-end reconstruction", end_to_end);
  report(11, "determinism", determinism);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
