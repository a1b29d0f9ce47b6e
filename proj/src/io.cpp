#include "nsmds/io.hpp"

#include "nsmds/error.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace nsmds::io {

namespace {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_number(const std::string& field, double& value) {
  if (field.empty()) return false;
  errno = 0;
  char* end = nullptr;
  value = std::strtod(field.c_str(), &end);
  return errno == 0 && end == field.c_str() + field.size();
}

// Numeric rows of a CSV stream, skipping blank lines and an optional header.
std::vector<std::vector<double>> read_numeric_rows(std::istream& in, const char* what) {
  std::vector<std::vector<double>> rows;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      double v = 0.0;
      if (!parse_number(f, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw InvalidInput(std::string(what) + ": non-numeric field on line " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput(std::string(what) + ": no data rows");
  return rows;
}

template <typename T>
T require(const Json& json, const char* key, const char* what) {
  if (!json.is_object() || !json.contains(key)) throw InvalidInput(std::string(what) + ": missing \"" + key + "\"");
  try {
    return json.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string(what) + ": bad \"" + key + "\": " + e.what());
  }
}

bool has_json_extension(const std::filesystem::path& path) { return path.extension() == ".json"; }

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
}

PointCloud read_cloud_csv(std::istream& in) { return PointCloud::from_rows(read_numeric_rows(in, "point cloud CSV")); }

void write_cloud_csv(std::ostream& out, const PointCloud& cloud, bool header) {
  const Eigen::MatrixXd& x = cloud.coords();
  if (header) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) out << (r ? "," : "") << 'x' << r;
    out << '\n';
  }
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) out << (r ? "," : "") << format_double(x(r, c));
    out << '\n';
  }
}

Json cloud_to_json(const PointCloud& cloud) {
  Json points = Json::array();
  for (Index i = 0; i < cloud.size(); ++i) {
    const Eigen::VectorXd p = cloud.point(i);
    points.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  }
  Json out = {{"dim", cloud.dim()}, {"points", std::move(points)}};
  if (!cloud.labels().empty()) out["labels"] = cloud.labels();
  return out;
}

PointCloud cloud_from_json(const Json& json) {
  const auto dim = require<Index>(json, "dim", "point cloud JSON");
  const auto rows = require<std::vector<std::vector<double>>>(json, "points", "point cloud JSON");
  for (const auto& row : rows) {
    if (row.size() != dim) throw InvalidInput("point cloud JSON: point length differs from \"dim\"");
  }
  PointCloud cloud = PointCloud::from_rows(rows);
  if (json.contains("labels")) {
    return PointCloud(cloud.coords(), require<std::vector<std::string>>(json, "labels", "point cloud JSON"));
  }
  return cloud;
}

PointCloud load_cloud(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  if (has_json_extension(path)) return cloud_from_json(parse_json(text));
  std::istringstream in(text);
  return read_cloud_csv(in);
}

SquaredDistanceMatrix read_sdm_csv(std::istream& in) {
  const auto rows = read_numeric_rows(in, "SDM CSV");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(rows[static_cast<Index>(r)].size()) != n) throw InvalidInput("SDM CSV: matrix is not square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rows[static_cast<Index>(r)][static_cast<Index>(c)];
  }
  return SquaredDistanceMatrix(std::move(m));
}

void write_sdm_csv(std::ostream& out, const SquaredDistanceMatrix& sdm) {
  if (!sdm.is_full()) throw InvalidInput("SDM CSV requires a fully observed matrix; use the JSON edge list");
  const Eigen::MatrixXd& m = sdm.entries();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
}

Json sdm_to_json(const SquaredDistanceMatrix& sdm) {
  Json edges = Json::array();
  for (Index i = 0; i < sdm.size(); ++i) {
    for (Index j = i + 1; j < sdm.size(); ++j) {
      if (sdm.observed(i, j)) edges.push_back({{"i", i}, {"j", j}, {"d2", sdm(i, j)}});
    }
  }
  return {{"n", sdm.size()}, {"edges", std::move(edges)}};
}

SquaredDistanceMatrix sdm_from_json(const Json& json) {
  const Json& edges = json.is_array() ? json : json.value("edges", Json());
  if (!edges.is_array()) throw InvalidInput("SDM JSON: expected an edge list");
  Index n = 0;
  if (json.is_object()) {
    n = require<Index>(json, "n", "SDM JSON");
  } else {
    for (const auto& e : edges) n = std::max({n, require<Index>(e, "i", "SDM JSON") + 1, require<Index>(e, "j", "SDM JSON") + 1});
  }
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nn, nn);
  Mask mask = Mask::Constant(nn, nn, false);
  for (Eigen::Index i = 0; i < nn; ++i) mask(i, i) = true;
  for (const auto& e : edges) {
    const auto i = require<Index>(e, "i", "SDM JSON");
    const auto j = require<Index>(e, "j", "SDM JSON");
    const auto d2 = require<double>(e, "d2", "SDM JSON");
    if (i >= n || j >= n) throw InvalidInput("SDM JSON: edge index out of range");
    if (i == j) {
      if (d2 != 0.0) throw InvalidInput("SDM JSON: nonzero diagonal entry");
      continue;
    }
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    if (mask(a, b) && m(a, b) != d2) throw InvalidInput("SDM JSON: conflicting duplicate edge");
    m(a, b) = m(b, a) = d2;
    mask(a, b) = mask(b, a) = true;
  }
  return SquaredDistanceMatrix(std::move(m), std::move(mask));
}

SquaredDistanceMatrix load_sdm(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  if (has_json_extension(path)) return sdm_from_json(parse_json(text));
  std::istringstream in(text);
  return read_sdm_csv(in);
}

NoiseSpec noise_from_json(const Json& json, Index n, const std::filesystem::path& base_dir) {
  const auto seed = require<std::uint64_t>(json, "seed", "noise JSON");
  const bool uniform = json.contains("sigma_uniform");
  const bool matrix = json.contains("sigma_matrix_csv");
  if (uniform == matrix) throw InvalidInput("noise JSON: give exactly one of \"sigma_uniform\" and \"sigma_matrix_csv\"");
  if (uniform) return NoiseSpec::uniform(n, require<double>(json, "sigma_uniform", "noise JSON"), seed);
  const std::filesystem::path csv = base_dir / require<std::string>(json, "sigma_matrix_csv", "noise JSON");
  std::istringstream in(read_text(csv));
  const auto rows = read_numeric_rows(in, "sigma matrix CSV");
  const auto nn = static_cast<Eigen::Index>(n);
  if (static_cast<Eigen::Index>(rows.size()) != nn) throw InvalidInput("sigma matrix CSV: wrong number of rows");
  Eigen::MatrixXd sigma(nn, nn);
  for (Eigen::Index r = 0; r < nn; ++r) {
    const auto& row = rows[static_cast<Index>(r)];
    if (static_cast<Eigen::Index>(row.size()) != nn) throw InvalidInput("sigma matrix CSV: matrix is not n x n");
    for (Eigen::Index c = 0; c < nn; ++c) sigma(r, c) = row[static_cast<Index>(c)];
  }
  return NoiseSpec(std::move(sigma), seed);
}

Json noise_to_json(double sigma_uniform, std::uint64_t seed) { return {{"sigma_uniform", sigma_uniform}, {"seed", seed}}; }

Json sample_to_json(const SampleResult& sample) { return {{"indices", sample.indices}, {"radius", sample.radius}}; }

Json graph_to_json(const AnchorGraph& graph) {
  Json edges = Json::array();
  for (const auto& e : graph.global_edges) edges.push_back({{"i", e.i}, {"j", e.j}, {"d", e.length}, {"kind", "global"}});
  std::vector<Index> stable;
  for (Index v = 0; v < graph.n; ++v) {
    for (const auto& e : graph.local_edges[v]) edges.push_back({{"i", v}, {"j", e.anchor}, {"d", e.length}, {"kind", "local"}});
    if (v < graph.stable_triple.size() && graph.stable_triple[v]) stable.push_back(v);
  }
  return {{"n", graph.n},
          {"k", graph.k},
          {"anchors", graph.anchors},
          {"edges", std::move(edges)},
          {"radius", graph.radius},
          {"delta", graph.delta},
          {"strategy", to_string(graph.strategy)},
          {"stable_vertices", std::move(stable)},
          {"fallback_count", graph.fallback_count},
          {"redraw_count", graph.redraw_count}};
}

AnchorGraph graph_from_json(const Json& json) {
  const char* what = "anchor graph JSON";
  AnchorGraph g;
  g.n = require<Index>(json, "n", what);
  g.k = require<Index>(json, "k", what);
  g.anchors = require<std::vector<Index>>(json, "anchors", what);
  g.radius = json.value("radius", 0.0);
  g.delta = json.value("delta", 0.0);
  g.strategy = parse_strategy(json.value("strategy", std::string("nearest")));
  g.fallback_count = json.value("fallback_count", Index{0});
  g.redraw_count = json.value("redraw_count", Index{0});
  g.local_edges.assign(g.n, {});
  g.stable_triple.assign(g.n, false);
  const Json& edges = json.contains("edges") ? json.at("edges") : Json();
  if (!edges.is_array()) throw InvalidInput(std::string(what) + ": \"edges\" must be an array");
  for (const auto& e : edges) {
    const auto i = require<Index>(e, "i", what);
    const auto j = require<Index>(e, "j", what);
    const auto d = require<double>(e, "d", what);
    const auto kind = require<std::string>(e, "kind", what);
    if (i >= g.n || j >= g.n) throw InvalidInput(std::string(what) + ": edge index out of range");
    if (kind == "global") {
      g.global_edges.push_back({i, j, d});
    } else if (kind == "local") {
      g.local_edges[i].push_back({j, d});
    } else {
      throw InvalidInput(std::string(what) + ": unknown edge kind \"" + kind + "\"");
    }
  }
  if (json.contains("stable_vertices")) {
    for (Index v : require<std::vector<Index>>(json, "stable_vertices", what)) {
      if (v >= g.n) throw InvalidInput(std::string(what) + ": stable vertex out of range");
      g.stable_triple[v] = true;
    }
  }
  const auto issues = g.check_invariants();
  if (!issues.empty()) throw InvalidInput(std::string(what) + ": " + issues.front());
  return g;
}

Json diagnostics_to_json(const PerturbationReport& report) {
  return {{"spectral_gap", report.diagnostics.spectral_gap},
          {"e2norm", report.e2norm},
          {"weyl_holds", report.weyl_holds},
          {"davis_kahan_holds", report.davis_kahan_holds},
          {"davis_kahan_applicable", report.davis_kahan_applicable},
          {"gershgorin_radius", report.diagnostics.gershgorin_radius}};
}

Json report_to_json(const ReconstructionReport& report) {
  Json out = {{"schema", kSchemaVersion},
              {"cloud", cloud_to_json(report.cloud)},
              {"loss", report.loss ? Json(*report.loss) : Json()},
              {"anchor_loss", report.anchor_loss ? Json(*report.anchor_loss) : Json()},
              {"fallback_count", report.fallback_count},
              {"circle_miss_count", report.circle_miss_count},
              {"degenerate_count", report.degenerate_count},
              {"redraw_count", report.redraw_count},
              {"clamped_eigenvalues", report.clamped_eigenvalues}};
  std::vector<Index> flagged;
  for (Index v = 0; v < report.degenerate_vertices.size(); ++v) {
    if (report.degenerate_vertices[v]) flagged.push_back(v);
  }
  out["degenerate_vertices"] = flagged;
  out["timings"] = {{"sampling_seconds", report.timings.sampling_seconds},
                    {"anchor_seconds", report.timings.anchor_seconds},
                    {"placement_seconds", report.timings.placement_seconds},
                    {"total_seconds", report.timings.total_seconds}};
  return out;
}

Json strip_timings(const Json& json) {
  if (json.is_object()) {
    Json out = Json::object();
    for (const auto& [key, value] : json.items()) {
      if (key != "timings") out[key] = strip_timings(value);
    }
    return out;
  }
  if (json.is_array()) {
    Json out = Json::array();
    for (const auto& value : json) out.push_back(strip_timings(value));
    return out;
  }
  return json;
}

}  // namespace nsmds::io
