#include "nsmds/harness.hpp"

#include "nsmds/cmds.hpp"
#include "nsmds/error.hpp"
#include "nsmds/noise.hpp"
#include "nsmds/random.hpp"
#include "nsmds/reconstruct.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace nsmds {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(); }

void require_planar(Generator generator, Index k) {
  if (k != 2) throw InvalidInput("generator " + to_string(generator) + " is planar and needs k = 2");
}

// Uniform in the unit ball by rejection from the enclosing cube.
Eigen::VectorXd ball_point(Rng& rng, Index k) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(k));
  while (true) {
    for (Eigen::Index d = 0; d < p.size(); ++d) p[d] = rng.uniform(-1.0, 1.0);
    if (p.squaredNorm() <= 1.0) return p;
  }
}

constexpr double kCurveBase = 2.0 / 3.0;
constexpr double kCurveLobe = 1.0 / 3.0;
constexpr int kCurveLobes = 3;

// Noisy distances of a clean cloud for one trial.
struct NoisyInstance {
  PointCloud cloud;
  SquaredDistanceMatrix clean;
  PerturbedDistances noisy;
  BiasMatrix bias;
};

NoisyInstance make_instance(const ExperimentConfig& config, Index n, std::uint64_t seed) {
  PointCloud cloud = generate(config.generator, n, config.k, derive_seed(seed, 0));
  SquaredDistanceMatrix clean = squared_distance_matrix(cloud);
  const NoiseSpec spec = NoiseSpec::uniform(n, config.sigma, derive_seed(seed, 1));
  PerturbedDistances noisy = perturb_distances(clean, spec);
  return {std::move(cloud), std::move(clean), std::move(noisy), bias_matrix(spec)};
}

}  // namespace

std::string to_string(Generator generator) {
  switch (generator) {
    case Generator::UniformDisk: return "uniform-disk";
    case Generator::UniformBall: return "uniform-ball";
    case Generator::Grid: return "grid";
    case Generator::Annulus: return "annulus";
    case Generator::CurveCardioid: return "curve-cardioid";
  }
  return "unknown";
}

Generator parse_generator(const std::string& name) {
  for (Generator g : {Generator::UniformDisk, Generator::UniformBall, Generator::Grid, Generator::Annulus,
                      Generator::CurveCardioid}) {
    if (to_string(g) == name) return g;
  }
  throw InvalidInput("unknown generator \"" + name + "\"");
}

std::string curve_cardioid_parameters() {
  return "r(t) = 2/3 + 1/3 cos(3 t + phase), t equispaced on [0, 2 pi), phase uniform per seed";
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw InvalidInput("trials must be at least 1");
  if (n_list.empty()) throw InvalidInput("n_list is empty");
  if (!std::is_sorted(n_list.begin(), n_list.end()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end()) {
    throw InvalidInput("n_list must be strictly ascending");
  }
  if (k < 1) throw InvalidInput("k must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("sigma must be finite and nonnegative");
  if (!(zeta > 0.0 && zeta < 0.5)) throw InvalidInput("zeta must lie in (0, 1/2)");
}

PointCloud generate(Generator generator, Index n, Index k, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("generate: n must be positive");
  if (k < 1) throw InvalidInput("generate: k must be positive");
  const auto cols = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd coords(static_cast<Eigen::Index>(k), cols);
  Rng rng(seed);
  switch (generator) {
    case Generator::UniformDisk:
      require_planar(generator, k);
      [[fallthrough]];
    case Generator::UniformBall:
      for (Eigen::Index c = 0; c < cols; ++c) coords.col(c) = ball_point(rng, k);
      break;
    case Generator::Grid: {
      Index side = 1;
      while (static_cast<double>(side) < std::pow(static_cast<double>(n), 1.0 / static_cast<double>(k)) - 1e-9) ++side;
      // Half-width 1/sqrt(k) keeps the corners on the unit sphere.
      const double half = 1.0 / std::sqrt(static_cast<double>(k));
      const double step = side > 1 ? 2.0 * half / static_cast<double>(side - 1) : 0.0;
      for (Eigen::Index c = 0; c < cols; ++c) {
        Index rest = static_cast<Index>(c);
        for (Eigen::Index d = static_cast<Eigen::Index>(k) - 1; d >= 0; --d) {
          coords(d, c) = side > 1 ? -half + step * static_cast<double>(rest % side) : 0.0;
          rest /= side;
        }
      }
      break;
    }
    case Generator::Annulus:
      require_planar(generator, k);
      for (Eigen::Index c = 0; c < cols; ++c) {
        const double r = std::sqrt(rng.uniform(0.25, 1.0));
        const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
        coords(0, c) = r * std::cos(t);
        coords(1, c) = r * std::sin(t);
      }
      break;
    case Generator::CurveCardioid: {
      require_planar(generator, k);
      // Equispaced angles cancel every harmonic below n, so for n > 8 the
      // covariance is exactly isotropic up to rounding.
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (Eigen::Index c = 0; c < cols; ++c) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(n);
        const double r = kCurveBase + kCurveLobe * std::cos(kCurveLobes * t + phase);
        coords(0, c) = r * std::cos(t);
        coords(1, c) = r * std::sin(t);
      }
      break;
    }
  }
  return PointCloud(std::move(coords));
}

PointCloud generate(const ExperimentConfig& config) {
  config.validate();
  return generate(config.generator, config.n_list.front(), config.k, config.seed);
}

ScalingFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidInput("fit_log_log: x and y differ in length");
  if (x.size() < 3) throw InvalidInput("need ≥ 3 sizes to fit");
  ScalingFit fit;
  for (Index i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidInput("fit_log_log: values must be positive");
    fit.points.emplace_back(std::log(x[i]), std::log(y[i]));
  }
  const double m = static_cast<double>(fit.points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [lx, ly] : fit.points) {
    mx += lx;
    my += ly;
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [lx, ly] : fit.points) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
    syy += (ly - my) * (ly - my);
  }
  if (sxx == 0.0) throw InvalidInput("fit_log_log: sizes must differ");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

std::uint64_t trial_seed(std::uint64_t seed, Index trial, Index n) { return derive_seed(seed, trial, n); }

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidInput("median of an empty list");
  std::sort(values.begin(), values.end());
  const Index mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

NoiseScalingResult run_noise_scaling(const ExperimentConfig& config) {
  config.validate();
  const auto start = Clock::now();
  NoiseScalingResult result;
  result.config = config;
  for (Index n : config.n_list) {
    if (n < config.k + 1) throw InvalidInput("run_noise_scaling: n must exceed k");
    LossRow row;
    row.n = n;
    row.losses.assign(config.trials, 0.0);
    std::vector<Index> negative(config.trials, 0), clamped(config.trials, 0);
    std::optional<double> envelope;
    parallel_for(config.trials, config.threads, [&](Index t) {
      NoisyInstance inst = make_instance(config, n, trial_seed(config.seed, t, n));
      const SquaredDistanceMatrix input = config.debias ? debias(inst.noisy.sdm, inst.bias) : inst.noisy.sdm;
      const Embedding emb = cmds_embed(input, config.k);
      row.losses[t] = structural_loss(emb.cloud, inst.cloud).loss;
      negative[t] = inst.noisy.negative_draws;
      clamped[t] = emb.clamped;
      if (t == 0 && config.sigma > 0.0) {
        try {
          envelope = theory_error_envelope(scale_params(inst.cloud), config.sigma, 1.0, config.k, n, config.zeta);
        } catch (const InvalidInput&) {
          // Degenerate scale parameters: no finite envelope.
        }
      }
    });
    row.envelope = envelope;
    for (Index t = 0; t < config.trials; ++t) {
      row.negative_draws += negative[t];
      row.clamped_eigenvalues += clamped[t];
    }
    row.median_loss = median(row.losses);
    result.rows.push_back(std::move(row));
  }
  if (config.sigma == 0.0) {
    result.fit_note = "sigma = 0: losses are rounding noise, fit skipped";
  } else if (result.rows.size() < 3) {
    result.fit_note = "need ≥ 3 sizes to fit";
  } else {
    std::vector<double> xs, ys;
    for (const auto& row : result.rows) {
      xs.push_back(static_cast<double>(row.n));
      ys.push_back(row.median_loss);
    }
    try {
      result.fit = fit_log_log(xs, ys);
    } catch (const InvalidInput& e) {
      result.fit_note = e.what();
    }
  }
  result.seconds = seconds_since(start);
  return result;
}

CostScalingResult run_cost_scaling(const ExperimentConfig& config) {
  config.validate();
  if (config.n_list.size() < 3) throw InvalidInput("need ≥ 3 sizes to fit");
  const auto start = Clock::now();
  CostScalingResult result;
  result.config = config;
  result.target_slope = 2.0 * static_cast<double>(config.k) / (2.0 * static_cast<double>(config.k) + 1.0);
  std::vector<double> xs, ys;
  for (Index n : config.n_list) {
    CostRow row;
    row.n = n;
    row.rho = rho_default(n, config.k);
    if (row.rho > n) throw InvalidInput("run_cost_scaling: n too small for the anchor count");
    row.total_lengths.assign(config.trials, 0.0);
    std::vector<double> global(config.trials, 0.0), local(config.trials, 0.0);
    std::vector<Index> edges(config.trials, 0);
    parallel_for(config.trials, config.threads, [&](Index t) {
      const std::uint64_t seed = trial_seed(config.seed, t, n);
      PointCloud cloud = generate(config.generator, n, config.k, derive_seed(seed, 0));
      const SquaredDistanceMatrix sdm = squared_distance_matrix(cloud);
      GraphOptions options;
      options.strategy = config.strategy;
      options.seed = derive_seed(seed, 2);
      if (config.strategy == LocalStrategy::Stable2D) options.geometry = cloud;
      if (config.strategy == LocalStrategy::Random) options.max_redraws = 10;
      const AnchorGraph graph = build_anchor_graph(sdm, sdm, config.k, row.rho, options);
      const CostReport cost = cost_report(graph, sdm);
      row.total_lengths[t] = cost.total_length;
      global[t] = cost.global_length;
      local[t] = cost.local_length;
      edges[t] = cost.edge_count;
    });
    row.edge_count = edges.front();
    row.median_total_length = median(row.total_lengths);
    row.median_global_length = median(global);
    row.median_local_length = median(local);
    xs.push_back(static_cast<double>(n));
    ys.push_back(row.median_total_length);
    result.rows.push_back(std::move(row));
  }
  result.fit = fit_log_log(xs, ys);
  result.seconds = seconds_since(start);
  return result;
}

DegenerateGapResult run_degenerate_gap(const ExperimentConfig& config) {
  config.validate();
  if (config.generator != Generator::CurveCardioid) throw InvalidInput("degenerate-gap runs on the curve-cardioid generator");
  if (config.k != 2) throw InvalidInput("degenerate-gap needs k = 2");
  const auto start = Clock::now();
  DegenerateGapResult result;
  result.config = config;
  result.n = config.n_list.front();
  result.trials.assign(config.trials, {});
  parallel_for(config.trials, config.threads, [&](Index t) {
    GapTrial& trial = result.trials[t];
    trial.seed = trial_seed(config.seed, t, result.n);
    NoisyInstance inst = make_instance(config, result.n, trial.seed);
    const SquaredDistanceMatrix input = config.debias ? debias(inst.noisy.sdm, inst.bias) : inst.noisy.sdm;
    const Embedding emb = cmds_embed(input, 2);
    const StructuralLoss loss = structural_loss(emb.cloud, inst.cloud);
    const ScaleParams pi = scale_params(inst.cloud);
    const Eigen::MatrixXd& rot = loss.alignment.rotation;
    trial.loss = loss.loss;
    trial.orientation = std::atan2(rot(1, 0), rot(0, 0));
    trial.reflection = rot.determinant() < 0.0;
    trial.pi_1 = pi.pi[0];
    trial.pi_2 = pi.pi[1];
  });
  std::vector<double> losses;
  for (const auto& t : result.trials) losses.push_back(t.loss);
  result.median_loss = median(losses);
  result.seconds = seconds_since(start);
  return result;
}

AnchorComparison compare_anchor_and_full(const ExperimentConfig& config) {
  config.validate();
  AnchorComparison out;
  out.n = config.n_list.front();
  out.anchor_losses.assign(config.trials, 0.0);
  out.full_losses.assign(config.trials, 0.0);
  const Index rho = rho_default(out.n, config.k);
  if (rho > out.n) throw InvalidInput("compare_anchor_and_full: n too small for the anchor count");
  parallel_for(config.trials, config.threads, [&](Index t) {
    const std::uint64_t seed = trial_seed(config.seed, t, out.n);
    NoisyInstance inst = make_instance(config, out.n, seed);
    const SquaredDistanceMatrix debiased = debias(inst.noisy.sdm, inst.bias);
    out.full_losses[t] = structural_loss(cmds_embed(debiased, config.k).cloud, inst.cloud).loss;
    GraphOptions options;
    options.strategy = config.strategy;
    options.seed = derive_seed(seed, 2);
    if (config.strategy == LocalStrategy::Stable2D) options.geometry = inst.cloud;
    if (config.strategy == LocalStrategy::Random) options.max_redraws = 10;
    const AnchorGraph graph = build_anchor_graph(inst.clean, inst.noisy.sdm, config.k, rho, options);
    out.anchor_losses[t] = *reconstruct(graph, inst.bias, config.k, inst.cloud).loss;
  });
  out.median_anchor_loss = median(out.anchor_losses);
  out.median_full_loss = median(out.full_losses);
  return out;
}

SpeedComparison time_quick_and_full(const SquaredDistanceMatrix& sdm, Index k, std::uint64_t seed, int repeats) {
  if (repeats < 1) throw InvalidInput("time_quick_and_full: repeats must be positive");
  SpeedComparison out{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (int r = 0; r < repeats; ++r) {
    auto start = Clock::now();
    const ReconstructionReport quick = quick_mds(sdm, k, seed);
    out.quick_seconds = std::min(out.quick_seconds, seconds_since(start));
    start = Clock::now();
    const Embedding full = cmds_embed(sdm, k);
    out.full_seconds = std::min(out.full_seconds, seconds_since(start));
    (void)quick;
    (void)full;
  }
  return out;
}

json to_json(const ExperimentConfig& config) {
  return {{"generator", to_string(config.generator)},
          {"n_list", config.n_list},
          {"k", config.k},
          {"sigma", config.sigma},
          {"trials", config.trials},
          {"seed", config.seed},
          {"strategy", to_string(config.strategy)},
          {"zeta", config.zeta},
          {"debias", config.debias}};
}

json to_json(const ScalingFit& fit) {
  json points = json::array();
  for (const auto& [x, y] : fit.points) points.push_back({x, y});
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}, {"points", std::move(points)}};
}

json to_json(const NoiseScalingResult& result) {
  json rows = json::array();
  for (const auto& row : result.rows) {
    rows.push_back({{"n", row.n},
                    {"median_loss", row.median_loss},
                    {"losses", row.losses},
                    {"envelope", optional_number(row.envelope)},
                    {"negative_draws", row.negative_draws},
                    {"clamped_eigenvalues", row.clamped_eigenvalues}});
  }
  json out = {{"schema", 1},
              {"experiment", "noise-scaling"},
              {"config", to_json(result.config)},
              {"rows", std::move(rows)},
              {"slope", result.fit ? json(result.fit->slope) : json()},
              {"fit", result.fit ? to_json(*result.fit) : json()},
              {"envelope_note", "unit prefactor; the asymptotic bound leaves it unspecified"},
              {"timings", {{"total_seconds", result.seconds}}}};
  if (!result.fit_note.empty()) out["fit_note"] = result.fit_note;
  if (result.config.generator == Generator::CurveCardioid) out["generator_parameters"] = curve_cardioid_parameters();
  return out;
}

json to_json(const CostScalingResult& result) {
  json rows = json::array();
  for (const auto& row : result.rows) {
    rows.push_back({{"n", row.n},
                    {"rho", row.rho},
                    {"edge_count", row.edge_count},
                    {"median_total_length", row.median_total_length},
                    {"total_lengths", row.total_lengths},
                    {"median_global_length", row.median_global_length},
                    {"median_local_length", row.median_local_length}});
  }
  return {{"schema", 1},
          {"experiment", "cost-scaling"},
          {"config", to_json(result.config)},
          {"rows", std::move(rows)},
          {"slope", result.fit.slope},
          {"target_slope", result.target_slope},
          {"fit", to_json(result.fit)},
          {"timings", {{"total_seconds", result.seconds}}}};
}

json to_json(const DegenerateGapResult& result) {
  json trials = json::array();
  for (const auto& t : result.trials) {
    trials.push_back({{"seed", t.seed},
                      {"loss", t.loss},
                      {"orientation", t.orientation},
                      {"reflection", t.reflection},
                      {"pi_1", t.pi_1},
                      {"pi_2", t.pi_2}});
  }
  return {{"schema", 1},
          {"experiment", "degenerate-gap"},
          {"config", to_json(result.config)},
          {"n", result.n},
          {"generator_parameters", curve_cardioid_parameters()},
          {"trials", std::move(trials)},
          {"median_loss", result.median_loss},
          {"timings", {{"total_seconds", result.seconds}}}};
}

std::string loss_table_csv(const NoiseScalingResult& result) {
  std::ostringstream out;
  out << "n,trial,loss\n";
  for (const auto& row : result.rows) {
    for (Index t = 0; t < row.losses.size(); ++t) out << row.n << ',' << t << ',' << format_double(row.losses[t]) << '\n';
  }
  return out.str();
}

std::string cost_table_csv(const CostScalingResult& result) {
  std::ostringstream out;
  out << "n,rho,edge_count,trial,total_length\n";
  for (const auto& row : result.rows) {
    for (Index t = 0; t < row.total_lengths.size(); ++t) {
      out << row.n << ',' << row.rho << ',' << row.edge_count << ',' << t << ',' << format_double(row.total_lengths[t]) << '\n';
    }
  }
  return out.str();
}

std::string gap_table_csv(const DegenerateGapResult& result) {
  std::ostringstream out;
  out << "trial,seed,loss,orientation,reflection\n";
  for (Index t = 0; t < result.trials.size(); ++t) {
    const auto& trial = result.trials[t];
    out << t << ',' << trial.seed << ',' << format_double(trial.loss) << ',' << format_double(trial.orientation) << ','
        << (trial.reflection ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace nsmds
