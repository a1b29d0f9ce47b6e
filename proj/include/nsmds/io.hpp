#pragma once

// File formats. Clouds: CSV (one row per point, optional header) or JSON
// {"dim", "points"}. SDMs: n x n CSV, or a JSON edge list for masked input.
// Everything else is JSON.

#include "nsmds/cmds.hpp"
#include "nsmds/core.hpp"
#include "nsmds/graph.hpp"
#include "nsmds/noise.hpp"
#include "nsmds/reconstruct.hpp"
#include "nsmds/sampling.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace nsmds::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

[[nodiscard]] std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
/// Two-space indented dump with a trailing newline.
[[nodiscard]] std::string dump(const Json& json);
[[nodiscard]] Json parse_json(const std::string& text);

/// A first line containing any non-numeric field is taken as a header.
[[nodiscard]] PointCloud read_cloud_csv(std::istream& in);
void write_cloud_csv(std::ostream& out, const PointCloud& cloud, bool header = false);
[[nodiscard]] Json cloud_to_json(const PointCloud& cloud);
[[nodiscard]] PointCloud cloud_from_json(const Json& json);
/// Dispatches on the extension: ".json" or anything else as CSV.
[[nodiscard]] PointCloud load_cloud(const std::filesystem::path& path);

[[nodiscard]] SquaredDistanceMatrix read_sdm_csv(std::istream& in);
void write_sdm_csv(std::ostream& out, const SquaredDistanceMatrix& sdm);
/// {"n", "edges": [{"i", "j", "d2"}]} over observed pairs i < j.
[[nodiscard]] Json sdm_to_json(const SquaredDistanceMatrix& sdm);
/// Accepts the object form or a bare edge list (n = largest index + 1).
/// Pairs absent from the list are unobserved.
[[nodiscard]] SquaredDistanceMatrix sdm_from_json(const Json& json);
[[nodiscard]] SquaredDistanceMatrix load_sdm(const std::filesystem::path& path);

/// {"sigma_uniform", "seed"} or {"sigma_matrix_csv", "seed"}; the CSV path is
/// resolved against `base_dir`.
[[nodiscard]] NoiseSpec noise_from_json(const Json& json, Index n, const std::filesystem::path& base_dir = {});
[[nodiscard]] Json noise_to_json(double sigma_uniform, std::uint64_t seed);

[[nodiscard]] Json sample_to_json(const SampleResult& sample);

/// {"n", "k", "anchors", "edges": [{"i", "j", "d", "kind"}], ...}. Local edges
/// list the vertex as "i" and the anchor as "j", in selection order.
[[nodiscard]] Json graph_to_json(const AnchorGraph& graph);
[[nodiscard]] AnchorGraph graph_from_json(const Json& json);

[[nodiscard]] Json diagnostics_to_json(const PerturbationReport& report);

/// Versioned report; wall-clock values live under "timings" only.
[[nodiscard]] Json report_to_json(const ReconstructionReport& report);

/// Copy of `json` with every "timings" member removed, recursively.
[[nodiscard]] Json strip_timings(const Json& json);

}  // namespace nsmds::io
