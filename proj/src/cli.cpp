#include "nsmds/cli.hpp"

#include "nsmds/cmds.hpp"
#include "nsmds/error.hpp"
#include "nsmds/harness.hpp"
#include "nsmds/io.hpp"
#include "nsmds/noise.hpp"
#include "nsmds/reconstruct.hpp"
#include "nsmds/rigidity.hpp"
#include "nsmds/sampling.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

namespace nsmds {

namespace {

namespace fs = std::filesystem;
using io::Json;

constexpr int kExitValidation = 1;
constexpr int kExitBadInput = 2;

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

// Where a subcommand's output goes: stdout, an explicit file, or a default
// file name inside the --out directory.
class Sink {
 public:
  Sink(const Common& common, std::ostream& stream) : common_(common), stream_(stream) {}

  [[nodiscard]] bool wants_csv() const {
    if (!common_.out.empty() && fs::path(common_.out).has_extension()) return fs::path(common_.out).extension() == ".csv";
    return common_.format == "csv";
  }

  // `csv` may be empty when the subcommand has no tabular form.
  void emit(const std::string& stem, const Json& report, const std::string& csv) const {
    const std::string json_text = io::dump(report);
    if (common_.out.empty()) {
      stream_ << (wants_csv() && !csv.empty() ? csv : json_text);
      return;
    }
    const fs::path target(common_.out);
    if (target.has_extension()) {
      if (target.extension() == ".csv" && csv.empty()) throw InvalidInput(stem + " has no CSV form");
      io::write_text(target, target.extension() == ".csv" ? csv : json_text);
      return;
    }
    io::write_text(target / (stem + ".json"), json_text);
    if (common_.format == "csv" && !csv.empty()) io::write_text(target / (stem + ".csv"), csv);
  }

 private:
  const Common& common_;
  std::ostream& stream_;
};

std::string cloud_csv(const PointCloud& cloud) {
  std::ostringstream ss;
  io::write_cloud_csv(ss, cloud);
  return ss.str();
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Input {
  std::string points;
  std::string sdm;

  void add_to(CLI::App* cmd) {
    auto* p = cmd->add_option("--points", points, "point cloud (.csv or .json)");
    auto* s = cmd->add_option("--sdm", sdm, "squared distance matrix (.csv or .json)");
    p->excludes(s);
  }

  [[nodiscard]] std::optional<PointCloud> cloud() const {
    if (points.empty()) return std::nullopt;
    return io::load_cloud(points);
  }

  [[nodiscard]] SquaredDistanceMatrix matrix(const std::optional<PointCloud>& cloud) const {
    if (cloud) return squared_distance_matrix(*cloud);
    if (sdm.empty()) throw InvalidInput("give --points or --sdm");
    return io::load_sdm(sdm);
  }
};

std::optional<PointCloud> load_optional_cloud(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return io::load_cloud(path);
}

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<Check> validate_graph(const AnchorGraph& graph, const std::optional<PointCloud>& points) {
  std::vector<Check> checks;
  const auto issues = graph.check_invariants();
  checks.push_back({"invariants", issues.empty(), issues.empty() ? "" : issues.front()});
  const Index rho = graph.anchors.size();
  const Index expected = rho * (rho - 1) / 2 + (graph.k + 1) * (graph.n - rho);
  checks.push_back({"edge_budget", graph.edge_count() == expected,
                    std::to_string(graph.edge_count()) + " edges, expected " + std::to_string(expected)});
  checks.push_back({"vertex_connectivity", vertex_connectivity_at_least(graph, graph.k + 1),
                    "at least " + std::to_string(graph.k + 1)});
  if (graph.k == 2) checks.push_back({"rigidity", laman_check_2d(graph), "pebble game rank 2n - 3"});
  if (points) {
    if (points->size() != graph.n) throw InvalidInput("--points size does not match the graph");
    const PointCloud anchors = points->subset(graph.anchors);
    checks.push_back({"eps_sparse", is_eps_sparse(anchors, graph.radius), "anchors at radius e"});
    checks.push_back({"eps_cover", is_eps_cover(*points, anchors, graph.radius), "cloud at radius e"});
  }
  return checks;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noise-stable multidimensional scaling", "nsmds"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "RNG seed");
  app.add_option("--out", common.out, "output directory, or a file path with a .json/.csv extension");
  app.add_option("--format", common.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  const Sink sink(common, out);
  std::function<int()> action;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic point cloud");
  std::string gen_generator = "uniform-disk";
  Index gen_n = 0;
  Index gen_k = 2;
  gen->add_option("--generator", gen_generator, "uniform-disk | uniform-ball | grid | annulus | curve-cardioid");
  gen->add_option("--n", gen_n, "number of points")->required();
  gen->add_option("--k", gen_k, "dimension");
  gen->callback([&] {
    action = [&] {
      const PointCloud cloud = generate(parse_generator(gen_generator), gen_n, gen_k, common.seed);
      sink.emit("cloud", io::cloud_to_json(cloud), cloud_csv(cloud));
      return 0;
    };
  });

  // cmds
  auto* cmds = app.add_subcommand("cmds", "classical MDS on a cloud or SDM");
  Input cmds_input;
  cmds_input.add_to(cmds);
  Index cmds_k = 2;
  double cmds_sigma = 0.0;
  bool cmds_raw = false;
  std::string cmds_truth;
  cmds->add_option("--k", cmds_k, "embedding dimension");
  cmds->add_option("--sigma", cmds_sigma, "Gaussian noise on distances");
  cmds->add_flag("--no-debias", cmds_raw, "skip the bias correction");
  cmds->add_option("--truth", cmds_truth, "ground-truth cloud for the loss");
  cmds->callback([&] {
    action = [&] {
      const auto start = std::chrono::steady_clock::now();
      const auto cloud = cmds_input.cloud();
      const SquaredDistanceMatrix clean = cmds_input.matrix(cloud);
      const auto truth = cmds_truth.empty() ? cloud : load_optional_cloud(cmds_truth);
      Json report = {{"schema", io::kSchemaVersion}};
      SquaredDistanceMatrix input = clean;
      if (cmds_sigma > 0.0) {
        const NoiseSpec spec = NoiseSpec::uniform(clean.size(), cmds_sigma, common.seed);
        const PerturbedDistances noisy = perturb_distances(clean, spec);
        input = cmds_raw ? noisy.sdm : debias(noisy.sdm, bias_matrix(spec));
        report["negative_draws"] = noisy.negative_draws;
        report["diagnostics"] =
            io::diagnostics_to_json(eigen_perturbation_report(gram_from_sdm(clean), gram_from_sdm(input), cmds_k));
      }
      const Embedding emb = cmds_embed(input, cmds_k);
      report["cloud"] = io::cloud_to_json(emb.cloud);
      report["top_eigenvalues"] = std::vector<double>(emb.top_eigenvalues.data(), emb.top_eigenvalues.data() + emb.top_eigenvalues.size());
      report["clamped_eigenvalues"] = emb.clamped;
      report["loss"] = truth ? Json(structural_loss(emb.cloud, *truth).loss) : Json();
      report["timings"] = {{"total_seconds", elapsed_since(start)}};
      sink.emit("cmds", report, cloud_csv(emb.cloud));
      return 0;
    };
  });

  // build-graph
  auto* build = app.add_subcommand("build-graph", "anchor graph from a cloud or SDM");
  Input build_input;
  build_input.add_to(build);
  Index build_k = 2;
  Index build_rho = 0;
  std::string build_strategy = "nearest";
  double build_sigma = 0.0;
  std::optional<double> build_delta;
  Index build_start = 0;
  build->add_option("--k", build_k, "dimension");
  build->add_option("--rho", build_rho, "anchor count (default max(k+2, ceil(n^(k/(2k+1)))))");
  build->add_option("--strategy", build_strategy, "nearest | stable2d | random");
  build->add_option("--sigma", build_sigma, "Gaussian noise on the recorded edge lengths");
  build->add_option("--delta", build_delta, "stable2d cover tolerance");
  build->add_option("--start", build_start, "first farthest-sampling pick");
  build->callback([&] {
    action = [&] {
      const auto cloud = build_input.cloud();
      const SquaredDistanceMatrix clean = build_input.matrix(cloud);
      const Index n = clean.size();
      GraphOptions options;
      options.strategy = parse_strategy(build_strategy);
      options.seed = common.seed;
      options.start = build_start;
      options.delta = build_delta;
      options.geometry = cloud;
      if (options.strategy == LocalStrategy::Random) options.max_redraws = 10;
      const Index rho = build_rho ? build_rho : std::min(n, rho_default(n, build_k));
      const SquaredDistanceMatrix observed =
          build_sigma > 0.0 ? perturb_distances(clean, NoiseSpec::uniform(n, build_sigma, common.seed)).sdm : clean;
      const AnchorGraph graph = build_anchor_graph(clean, observed, build_k, rho, options);
      sink.emit("graph", io::graph_to_json(graph), "");
      return 0;
    };
  });

  // reconstruct
  auto* recon = app.add_subcommand("reconstruct", "two-stage reconstruction from an anchor graph");
  std::string recon_graph;
  double recon_sigma = 0.0;
  std::string recon_truth;
  recon->add_option("--graph", recon_graph, "anchor graph JSON")->required();
  recon->add_option("--sigma", recon_sigma, "noise level of the edge lengths, for debiasing");
  recon->add_option("--truth", recon_truth, "ground-truth cloud for the loss");
  recon->callback([&] {
    action = [&] {
      const AnchorGraph graph = io::graph_from_json(io::parse_json(io::read_text(recon_graph)));
      std::optional<BiasMatrix> bias;
      if (recon_sigma > 0.0) bias = bias_matrix(NoiseSpec::uniform(graph.n, recon_sigma, common.seed));
      const ReconstructionReport report = reconstruct(graph, bias, graph.k, load_optional_cloud(recon_truth));
      sink.emit("reconstruction", io::report_to_json(report), cloud_csv(report.cloud));
      return 0;
    };
  });

  // quick-mds
  auto* quick = app.add_subcommand("quick-mds", "randomized anchor reconstruction of a full SDM");
  Input quick_input;
  quick_input.add_to(quick);
  Index quick_k = 2;
  double quick_sigma = 0.0;
  quick->add_option("--k", quick_k, "dimension");
  quick->add_option("--sigma", quick_sigma, "Gaussian noise on distances");
  quick->callback([&] {
    action = [&] {
      const auto cloud = quick_input.cloud();
      SquaredDistanceMatrix sdm = quick_input.matrix(cloud);
      if (quick_sigma > 0.0) sdm = perturb_distances(sdm, NoiseSpec::uniform(sdm.size(), quick_sigma, common.seed)).sdm;
      const ReconstructionReport report = quick_mds(sdm, quick_k, common.seed, cloud);
      sink.emit("quick_mds", io::report_to_json(report), cloud_csv(report.cloud));
      return 0;
    };
  });

  // experiments
  ExperimentConfig config;
  std::string exp_generator = "uniform-disk";
  std::string exp_strategy = "nearest";
  bool exp_raw = false;
  auto add_experiment_options = [&](CLI::App* cmd, bool with_n_list) {
    if (with_n_list) {
      cmd->add_option("--n", config.n_list, "comma-separated sizes")->delimiter(',')->required();
      cmd->add_option("--generator", exp_generator, "cloud generator");
    } else {
      cmd->add_option("--n", config.n_list, "cloud size")->expected(1)->required();
    }
    cmd->add_option("--k", config.k, "dimension");
    cmd->add_option("--trials", config.trials, "trials per size");
    cmd->add_option("--threads", config.threads, "worker threads (0: all cores)");
  };
  auto finish_config = [&](Generator generator) {
    config.generator = generator;
    config.seed = common.seed;
    config.strategy = parse_strategy(exp_strategy);
    config.debias = !exp_raw;
    config.output_path = common.out;
  };

  auto* noise = app.add_subcommand("noise-scaling", "loss of full cMDS against n at fixed sigma");
  add_experiment_options(noise, true);
  noise->add_option("--sigma", config.sigma, "Gaussian noise on distances");
  noise->add_option("--zeta", config.zeta, "envelope exponent in (0, 1/2)");
  noise->add_flag("--no-debias", exp_raw, "skip the bias correction");
  noise->callback([&] {
    action = [&] {
      finish_config(parse_generator(exp_generator));
      if (config.sigma > 0.5) throw InvalidInput("sigma must not exceed r / 2 = 0.5");
      const NoiseScalingResult result = run_noise_scaling(config);
      sink.emit("noise_scaling", to_json(result), loss_table_csv(result));
      return 0;
    };
  });

  auto* cost = app.add_subcommand("cost-scaling", "total anchor-graph edge length against n");
  add_experiment_options(cost, true);
  cost->add_option("--strategy", exp_strategy, "nearest | stable2d | random");
  cost->callback([&] {
    action = [&] {
      finish_config(parse_generator(exp_generator));
      const CostScalingResult result = run_cost_scaling(config);
      sink.emit("cost_scaling", to_json(result), cost_table_csv(result));
      return 0;
    };
  });

  auto* gap = app.add_subcommand("degenerate-gap", "noisy cMDS on an equal-eigenvalue curve");
  add_experiment_options(gap, false);
  gap->add_option("--sigma", config.sigma, "Gaussian noise on distances");
  gap->add_flag("--no-debias", exp_raw, "skip the bias correction");
  gap->callback([&] {
    action = [&] {
      finish_config(Generator::CurveCardioid);
      const DegenerateGapResult result = run_degenerate_gap(config);
      sink.emit("degenerate_gap", to_json(result), gap_table_csv(result));
      return 0;
    };
  });

  // validate
  auto* validate = app.add_subcommand("validate", "epsilon-net, rigidity and connectivity checks on a graph file");
  std::string validate_graph_path;
  std::string validate_points;
  validate->add_option("--graph", validate_graph_path, "anchor graph JSON")->required();
  validate->add_option("--points", validate_points, "the cloud the graph was built from");
  validate->callback([&] {
    action = [&] {
      const Json raw = io::parse_json(io::read_text(validate_graph_path));
      std::vector<Check> checks;
      try {
        checks = validate_graph(io::graph_from_json(raw), load_optional_cloud(validate_points));
      } catch (const InvalidInput& e) {
        // A graph that fails its structural invariants is a validation failure.
        if (std::string(e.what()).rfind("anchor graph JSON", 0) != 0) throw;
        checks.push_back({"invariants", false, e.what()});
      }
      Json list = Json::array();
      bool valid = true;
      for (const auto& c : checks) {
        valid = valid && c.passed;
        list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      }
      sink.emit("validation", {{"schema", io::kSchemaVersion}, {"valid", valid}, {"checks", std::move(list)}}, "");
      return valid ? 0 : kExitValidation;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitBadInput;
  }
  if (!action) {
    err << app.help();
    return kExitBadInput;
  }
  try {
    return action();
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
  } catch (const DegenerateConfiguration& e) {
    err << "error: " << e.what() << '\n';
  } catch (const NotInterior& e) {
    err << "error: " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitBadInput;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace nsmds
