#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "icspp/dataset.hpp"
#include "icspp/pipeline.hpp"
#include "icspp/synthetic.hpp"

namespace icspp::io {

struct CsvOptions {
  bool has_header = false;
  char separator = ',';
};

struct CsvData {
  DataSet data;
  std::uint64_t content_hash = 0;  // FNV-1a of the file bytes
};

/// Rectangular numeric CSV. Any empty, non-numeric or non-finite cell throws
/// ParseError naming its 1-based line and column; fewer than p+1 rows throws
/// TooFewRows.
CsvData ingest_csv(const std::filesystem::path& path, const CsvOptions& options = {});
CsvData parse_csv(std::string_view text, const CsvOptions& options = {});

std::uint64_t fnv1a(std::string_view bytes) noexcept;

/// Headerless, comma separated, %.17e.
void write_csv(std::ostream& out, const Matrix& m);
void write_csv(const std::filesystem::path& path, const Matrix& m);

/// Scatter-plot matrix of all column pairs: one <g class="panel"> per
/// lower-triangle cell, p(p−1)/2 in total.
std::string splom_svg(const Matrix& data, const std::vector<std::string>& labels = {});

/// Single 2-D scatter of the first two columns (first column against the
/// observation index when there is only one).
std::string scatter_svg(const Matrix& points, const std::string& title);

struct RunInfo {
  std::string input_path;
  std::uint64_t content_hash = 0;
  double seconds_total = 0.0;
  double seconds_pipeline = 0.0;
};

nlohmann::json config_to_json(const PipelineConfig& cfg);
nlohmann::json manifest_json(const PipelineResult& result, const PipelineConfig& cfg,
                             const RunInfo& info);

/// One JSON object per optimizer iteration per start.
void write_trace_jsonl(std::ostream& out, const PipelineResult& result);

nlohmann::json truth_json(const LabeledDataSet& truth, const GeneratorSpec& spec);

/// Writes projected.csv, transform_B.csv, manifest.json, trace.jsonl,
/// splom.svg and snapshot_iter_<k>.svg into `dir` (created if missing).
void write_run_outputs(const std::filesystem::path& dir, const PipelineResult& result,
                       const PipelineConfig& cfg, const RunInfo& info);

}  // namespace icspp::io
