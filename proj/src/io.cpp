#include "icspp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "icspp/error.hpp"

namespace icspp::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

[[noreturn]] void parse_fail(std::size_t line, std::size_t column, const std::string& what) {
  throw Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

json tuple_json(const StartTuple& t) {
  json a = json::array();
  for (int j : t) a.push_back(j + 1);
  return a;
}

}  // namespace

CsvData parse_csv(std::string_view text, const CsvOptions& options) {
  std::vector<std::string> names;
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  bool header_pending = options.has_header;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty()) continue;

    const std::vector<std::string_view> cells = split(line, options.separator);
    if (header_pending) {
      for (std::string_view c : cells) names.emplace_back(c);
      cols = cells.size();
      header_pending = false;
      continue;
    }
    if (cols == 0) cols = cells.size();
    if (cells.size() != cols)
      parse_fail(line_no, std::min(cells.size(), cols) + 1,
                 "expected " + std::to_string(cols) + " cells, found " + std::to_string(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string_view cell = cells[c];
      if (cell.empty()) parse_fail(line_no, c + 1, "missing value");
      double v = 0.0;
      const char* first = cell.data();
      const char* last = first + cell.size();
      if (*first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) parse_fail(line_no, c + 1, "non-numeric value '" + std::string(cell) + "'");
      if (!std::isfinite(v)) parse_fail(line_no, c + 1, "non-finite value '" + std::string(cell) + "'");
      values.push_back(v);
    }
    ++rows;
  }

  if (rows == 0) throw Error(ErrorCode::TooFewRows, "no data rows");
  if (rows <= cols)
    throw Error(ErrorCode::TooFewRows, "need more rows than columns (rows=" + std::to_string(rows) +
                                           ", columns=" + std::to_string(cols) + ")");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * cols + j];
  return CsvData{DataSet(std::move(m), Stage::Raw, std::move(names)), fnv1a(text)};
}

CsvData ingest_csv(const fs::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), options);
}

void write_csv(std::ostream& out, const Matrix& m) {
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17e", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void write_csv(const fs::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_csv(out, m);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

namespace {

constexpr double kPanel = 480.0;
constexpr double kPad = 28.0;

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range range_of(const Eigen::Ref<const Vector>& v) {
  Range r{v.minCoeff(), v.maxCoeff()};
  if (r.hi - r.lo < 1e-12) {
    r.lo -= 0.5;
    r.hi += 0.5;
  }
  return r;
}

// One framed panel at (ox, oy); x and y are mapped into the inner box.
void panel(std::ostream& os, double ox, double oy, const Eigen::Ref<const Vector>& x,
           const Eigen::Ref<const Vector>& y, const std::string& xlabel, const std::string& ylabel,
           const std::string& attrs) {
  const Range rx = range_of(x);
  const Range ry = range_of(y);
  const double inner = kPanel - 2 * kPad;
  os << "<g class=\"panel\" " << attrs << " transform=\"translate(" << ox << ',' << oy << ")\">\n";
  os << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << inner << "\" height=\"" << inner
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<text x=\"" << kPad << "\" y=\"" << kPanel - 8 << "\" font-size=\"10\">" << fmt(rx.lo) << "</text>\n";
  os << "<text x=\"" << kPanel - kPad << "\" y=\"" << kPanel - 8 << "\" font-size=\"10\" text-anchor=\"end\">"
     << fmt(rx.hi) << "</text>\n";
  os << "<text x=\"4\" y=\"" << kPanel - kPad << "\" font-size=\"10\">" << fmt(ry.lo) << "</text>\n";
  os << "<text x=\"4\" y=\"" << kPad + 10 << "\" font-size=\"10\">" << fmt(ry.hi) << "</text>\n";
  os << "<text x=\"" << kPanel / 2 << "\" y=\"" << kPanel - 8 << "\" font-size=\"11\" text-anchor=\"middle\">"
     << xlabel << "</text>\n";
  os << "<text x=\"" << kPad / 2 << "\" y=\"" << kPanel / 2 << "\" font-size=\"11\" transform=\"rotate(-90 "
     << kPad / 2 << ' ' << kPanel / 2 << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  char buf[96];
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double px = kPad + (x(i) - rx.lo) / (rx.hi - rx.lo) * inner;
    const double py = kPad + inner - (y(i) - ry.lo) / (ry.hi - ry.lo) * inner;
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1\"/>\n", px, py);
    os << buf;
  }
  os << "</g>\n";
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string label_for(const std::vector<std::string>& labels, Eigen::Index j) {
  if (j < static_cast<Eigen::Index>(labels.size())) return xml_escape(labels[static_cast<std::size_t>(j)]);
  return "x" + std::to_string(j + 1);
}

}  // namespace

std::string splom_svg(const Matrix& data, const std::vector<std::string>& labels) {
  const Eigen::Index p = data.cols();
  const double side = kPanel * static_cast<double>(std::max<Eigen::Index>(p - 1, 1));
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side << "\" height=\"" << side
     << "\" viewBox=\"0 0 " << side << ' ' << side << "\">\n";
  os << "<g fill=\"#1f4e79\">\n";
  for (Eigen::Index i = 1; i < p; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const std::string attrs = "data-row=\"" + std::to_string(i + 1) + "\" data-col=\"" + std::to_string(j + 1) + "\"";
      panel(os, kPanel * static_cast<double>(j), kPanel * static_cast<double>(i - 1), data.col(j), data.col(i),
            label_for(labels, j), label_for(labels, i), attrs);
    }
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::string scatter_svg(const Matrix& points, const std::string& title) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPanel << "\" height=\"" << kPanel + 20
     << "\" viewBox=\"0 0 " << kPanel << ' ' << kPanel + 20 << "\">\n";
  os << "<text x=\"" << kPanel / 2 << "\" y=\"14\" font-size=\"12\" text-anchor=\"middle\">" << xml_escape(title) << "</text>\n";
  os << "<g fill=\"#1f4e79\" transform=\"translate(0,20)\">\n";
  if (points.cols() >= 2) {
    panel(os, 0, 0, points.col(0), points.col(1), "x1", "x2", "data-row=\"2\" data-col=\"1\"");
  } else {
    const Vector index = Vector::LinSpaced(points.rows(), 1.0, static_cast<double>(points.rows()));
    panel(os, 0, 0, points.col(0), index, "x1", "observation", "data-row=\"0\" data-col=\"1\"");
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

json config_to_json(const PipelineConfig& cfg) {
  json starts = json::array();
  for (const StartTuple& t : cfg.explicit_starts) starts.push_back(tuple_json(t));
  return json{
      {"d", cfg.d},
      {"mode", std::string(to_string(cfg.mode))},
      {"starts", std::string(to_string(cfg.effective_starts()))},
      {"explicit_starts", starts},
      {"h", cfg.optimizer.entropy.bandwidth},
      {"nu", cfg.scatter.nu},
      {"gamma", cfg.scatter.gamma},
      {"scatter_normalization", cfg.scatter.normalization == ScatterNormalization::TraceP ? "trace-p" : "none"},
      {"delta0", cfg.optimizer.threshold},
      {"max_outer_iters", cfg.optimizer.max_outer_iters},
      {"max_halvings", cfg.optimizer.max_halvings},
      {"restarts", cfg.restarts},
      {"seed", cfg.seed},
      {"jobs", cfg.jobs},
      {"snapshot_iters", cfg.optimizer.snapshot_iters},
  };
}

json manifest_json(const PipelineResult& result, const PipelineConfig& cfg, const RunInfo& info) {
  json starts = json::array();
  for (const StartOutcome& o : result.per_start) {
    starts.push_back(json{
        {"restart", o.restart},
        {"indices", tuple_json(o.indices)},
        {"initial_H", o.initial_H},
        {"final_H", o.final_H},
        {"iterations", o.iterations},
        {"termination", o.optimized ? std::string(to_string(o.termination)) : std::string("NotOptimized")},
        {"optimized", o.optimized},
    });
  }
  const Matrix& x = result.centered_raw;
  json snapshots = json::array();
  for (const auto& [iter, _] : result.best.snapshots) snapshots.push_back(iter);
  return json{
      {"config", config_to_json(cfg)},
      {"input",
       {{"path", info.input_path},
        {"rows", x.rows()},
        {"cols", x.cols()},
        {"content_hash", "fnv1a64:" + hex64(info.content_hash)}}},
      {"center", std::vector<double>(result.center.data(), result.center.data() + result.center.size())},
      {"reference_entropy", {{"d", cfg.d}, {"h", cfg.optimizer.entropy.bandwidth}, {"value", result.reference_H}}},
      {"ics_eigenvalues",
       std::vector<double>(result.stagewise.ics.eigenvalues.data(),
                           result.stagewise.ics.eigenvalues.data() + result.stagewise.ics.eigenvalues.size())},
      {"start_count", result.per_start.size()},
      {"starts", starts},
      {"best",
       {{"restart", result.best_restart},
        {"indices", tuple_json(result.best_start)},
        {"initial_H", result.best.initial_H},
        {"final_H", result.best.final_H},
        {"iterations", result.best.trace.iterations.size()},
        {"termination", std::string(to_string(result.best.trace.termination))}}},
      {"all_starts_capped", result.all_starts_capped},
      {"B_stagewise_max_abs_diff", (result.B - result.stagewise.product).cwiseAbs().maxCoeff()},
      {"snapshots", snapshots},
      {"timings", {{"pipeline_seconds", info.seconds_pipeline}, {"total_seconds", info.seconds_total}}},
  };
}

void write_trace_jsonl(std::ostream& out, const PipelineResult& result) {
  for (const StartOutcome& o : result.per_start) {
    for (const PPIteration& it : o.trace.iterations) {
      out << json{{"restart", o.restart},
                  {"start", tuple_json(o.indices)},
                  {"iter", it.iter},
                  {"H_before", it.H_before},
                  {"H_after", it.H_after},
                  {"grad_norm_sq", it.grad_norm_sq},
                  {"halvings", it.halvings},
                  {"accepted_t", it.accepted_t},
                  {"delta", it.accepted_delta}}
                 .dump()
          << '\n';
    }
  }
}

json truth_json(const LabeledDataSet& truth, const GeneratorSpec& spec) {
  auto rows_of = [](const Matrix& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json r = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
      a.push_back(r);
    }
    return a;
  };
  return json{{"n", spec.n},
              {"p", spec.p},
              {"seed", spec.seed},
              {"structure_dim", spec.structure_dim},
              {"labels", truth.labels},
              {"planted_basis", rows_of(truth.planted_basis)},
              {"mixed_planted_basis", rows_of(truth.mixed_planted_basis())},
              {"mixing", rows_of(truth.mixing)}};
}

void write_run_outputs(const fs::path& dir, const PipelineResult& result, const PipelineConfig& cfg,
                       const RunInfo& info) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + dir.string() + ": " + ec.message());

  const Matrix transformed = result.centered_raw * result.B;
  write_csv(dir / "projected.csv", transformed.leftCols(cfg.d));
  write_csv(dir / "transform_B.csv", result.B);

  auto write_text = [&](const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
  };
  write_text(dir / "manifest.json", manifest_json(result, cfg, info).dump(2) + "\n");
  {
    std::ofstream out(dir / "trace.jsonl");
    if (!out) throw Error(ErrorCode::IoError, "cannot write trace.jsonl");
    write_trace_jsonl(out, result);
  }
  write_text(dir / "splom.svg", splom_svg(result.best.rotated_data.rows()));
  for (const auto& [iter, points] : result.best.snapshots) {
    char name[48];
    std::snprintf(name, sizeof name, "snapshot_iter_%d.svg", iter);
    write_text(dir / name, scatter_svg(points, "after " + std::to_string(iter) + " iterations"));
  }
}

}  // namespace icspp::io
