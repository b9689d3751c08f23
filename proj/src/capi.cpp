#include "icspp/icspp.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "icspp/error.hpp"
#include "icspp/io.hpp"
#include "icspp/pipeline.hpp"
#include "icspp/synthetic.hpp"

struct icspp_dataset {
  icspp::DataSet data;
  std::uint64_t content_hash = 0;
};

struct icspp_config {
  icspp::PipelineConfig cfg;
};

struct icspp_result {
  icspp::PipelineResult result;
  icspp::PipelineConfig cfg;
  std::uint64_t content_hash = 0;
  double pipeline_seconds = 0.0;
};

struct icspp_generated {
  icspp::GeneratorSpec spec;
  icspp::LabeledDataSet truth;
};

namespace {

thread_local std::string g_last_error;

icspp_status status_for(icspp::ErrorCode code) {
  using icspp::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return ICSPP_ERR_INVALID_ARGUMENT;
    case ErrorCode::ParseError: return ICSPP_ERR_PARSE;
    case ErrorCode::TooFewRows: return ICSPP_ERR_TOO_FEW_ROWS;
    case ErrorCode::NotPositiveDefinite: return ICSPP_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::DimensionMismatch: return ICSPP_ERR_DIMENSION_MISMATCH;
    case ErrorCode::InvalidIndices: return ICSPP_ERR_INVALID_INDICES;
    case ErrorCode::DegeneratePairs: return ICSPP_ERR_DEGENERATE_PAIRS;
    case ErrorCode::SingularDesign: return ICSPP_ERR_SINGULAR_DESIGN;
    case ErrorCode::InvalidSpec: return ICSPP_ERR_INVALID_SPEC;
    case ErrorCode::IoError: return ICSPP_ERR_IO;
  }
  return ICSPP_ERR_INTERNAL;
}

icspp_status fail(icspp_status s, std::string message) {
  g_last_error = std::move(message);
  return s;
}

template <class Fn>
icspp_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return ICSPP_OK;
  } catch (const icspp::Error& e) {
    return fail(status_for(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ICSPP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ICSPP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ICSPP_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw icspp::Error(icspp::ErrorCode::InvalidArgument, what);
}

void copy_matrix(const icspp::Matrix& m, double* out, size_t capacity) {
  require(out != nullptr, "output buffer is null");
  const auto need = static_cast<size_t>(m.rows() * m.cols());
  require(capacity >= need, "output buffer too small");
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<size_t>(i * m.cols() + j)] = m(i, j);
}

icspp_termination termination_of(const icspp::StartOutcome& o) {
  if (!o.optimized) return ICSPP_TERM_NOT_OPTIMIZED;
  switch (o.termination) {
    case icspp::Termination::GradientBelowThreshold: return ICSPP_TERM_GRADIENT_BELOW_THRESHOLD;
    case icspp::Termination::MaxIters: return ICSPP_TERM_MAX_ITERS;
    case icspp::Termination::StepFloor: return ICSPP_TERM_STEP_FLOOR;
  }
  return ICSPP_TERM_NOT_OPTIMIZED;
}

void fill_info(const icspp::StartOutcome& o, icspp_start_info* out) {
  out->restart = o.restart;
  out->initial_H = o.initial_H;
  out->final_H = o.final_H;
  out->iterations = o.iterations;
  out->termination = termination_of(o);
}

void copy_indices(const icspp::StartTuple& t, int* out, size_t capacity) {
  require(out != nullptr, "index buffer is null");
  require(capacity >= t.size(), "index buffer too small");
  for (size_t i = 0; i < t.size(); ++i) out[i] = t[i] + 1;
}

}  // namespace

extern "C" {

const char* icspp_status_name(icspp_status status) {
  switch (status) {
    case ICSPP_OK: return "Ok";
    case ICSPP_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case ICSPP_ERR_PARSE: return "ParseError";
    case ICSPP_ERR_TOO_FEW_ROWS: return "TooFewRows";
    case ICSPP_ERR_NOT_POSITIVE_DEFINITE: return "NotPositiveDefinite";
    case ICSPP_ERR_DIMENSION_MISMATCH: return "DimensionMismatch";
    case ICSPP_ERR_INVALID_INDICES: return "InvalidIndices";
    case ICSPP_ERR_DEGENERATE_PAIRS: return "DegeneratePairs";
    case ICSPP_ERR_SINGULAR_DESIGN: return "SingularDesign";
    case ICSPP_ERR_INVALID_SPEC: return "InvalidSpec";
    case ICSPP_ERR_IO: return "IoError";
    case ICSPP_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* icspp_last_error(void) { return g_last_error.c_str(); }

icspp_status icspp_reference_entropy(int d, double h, double* out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = icspp::gaussian_reference_entropy(d, icspp::EntropyConfig{h});
  });
}

icspp_status icspp_dataset_read_csv(const char* path, int has_header, icspp_dataset** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(path != nullptr && out != nullptr, "path and out must be non-null");
    icspp::io::CsvData csv = icspp::io::ingest_csv(path, icspp::io::CsvOptions{has_header != 0, ','});
    *out = new icspp_dataset{std::move(csv.data), csv.content_hash};
  });
}

icspp_status icspp_dataset_from_rows(const double* rows, size_t n, size_t p, icspp_dataset** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(rows != nullptr && out != nullptr, "rows and out must be non-null");
    if (n <= p)
      throw icspp::Error(icspp::ErrorCode::TooFewRows,
                         "need more rows than columns, got " + std::to_string(n) + "x" + std::to_string(p));
    icspp::Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < p; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i * p + j];
    const auto bytes = std::string_view(reinterpret_cast<const char*>(rows), n * p * sizeof(double));
    *out = new icspp_dataset{icspp::DataSet(std::move(m), icspp::Stage::Raw), icspp::io::fnv1a(bytes)};
  });
}

size_t icspp_dataset_rows(const icspp_dataset* data) { return data ? static_cast<size_t>(data->data.n()) : 0; }
size_t icspp_dataset_cols(const icspp_dataset* data) { return data ? static_cast<size_t>(data->data.p()) : 0; }
uint64_t icspp_dataset_content_hash(const icspp_dataset* data) { return data ? data->content_hash : 0; }

icspp_status icspp_dataset_copy_rows(const icspp_dataset* data, double* out, size_t capacity) {
  return guarded([&] {
    require(data != nullptr, "data is null");
    copy_matrix(data->data.rows(), out, capacity);
  });
}

icspp_status icspp_dataset_write_csv(const icspp_dataset* data, const char* path) {
  return guarded([&] {
    require(data != nullptr && path != nullptr, "data and path must be non-null");
    icspp::io::write_csv(std::filesystem::path(path), data->data.rows());
  });
}

void icspp_dataset_free(icspp_dataset* data) { delete data; }

icspp_status icspp_config_create(icspp_config** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new icspp_config{};
  });
}

void icspp_config_free(icspp_config* cfg) { delete cfg; }

#define ICSPP_CFG_SETTER(name, type, body)                  \
  icspp_status icspp_config_set_##name(icspp_config* c, type v) { \
    return guarded([&] {                                    \
      require(c != nullptr, "config is null");              \
      body;                                                 \
    });                                                     \
  }

ICSPP_CFG_SETTER(d, int, require(v >= 1, "d must be >= 1"); c->cfg.d = v)
ICSPP_CFG_SETTER(bandwidth, double, icspp::EntropyConfig{v}.validate(); c->cfg.optimizer.entropy.bandwidth = v)
ICSPP_CFG_SETTER(nu, double, require(v >= 0.0, "nu must be >= 0"); c->cfg.scatter.nu = v)
ICSPP_CFG_SETTER(gamma, double, require(v > 0.0, "gamma must be > 0"); c->cfg.scatter.gamma = v)
ICSPP_CFG_SETTER(threshold, double, require(v > 0.0, "delta0 must be > 0"); c->cfg.optimizer.threshold = v)
ICSPP_CFG_SETTER(max_iters, int, require(v >= 1, "max iterations must be >= 1"); c->cfg.optimizer.max_outer_iters = v)
ICSPP_CFG_SETTER(max_halvings, int, require(v >= 1, "max halvings must be >= 1"); c->cfg.optimizer.max_halvings = v)
ICSPP_CFG_SETTER(restarts, int, require(v >= 0, "restarts must be >= 0"); c->cfg.restarts = v)
ICSPP_CFG_SETTER(seed, uint64_t, c->cfg.seed = v)
ICSPP_CFG_SETTER(jobs, int, require(v >= 1, "jobs must be >= 1"); c->cfg.jobs = v)

#undef ICSPP_CFG_SETTER

icspp_status icspp_config_set_mode(icspp_config* c, icspp_mode mode) {
  return guarded([&] {
    require(c != nullptr, "config is null");
    switch (mode) {
      case ICSPP_MODE_ICS_PP: c->cfg.mode = icspp::PipelineMode::IcsThenPP; return;
      case ICSPP_MODE_GLOBAL_PP: c->cfg.mode = icspp::PipelineMode::GlobalPP; return;
      case ICSPP_MODE_ICS_ONLY: c->cfg.mode = icspp::PipelineMode::IcsOnly; return;
    }
    require(false, "unknown mode");
  });
}

icspp_status icspp_config_set_starts(icspp_config* c, icspp_starts starts) {
  return guarded([&] {
    require(c != nullptr, "config is null");
    switch (starts) {
      case ICSPP_STARTS_DEFAULT: c->cfg.starts.reset(); return;
      case ICSPP_STARTS_ALL_PAIRS: c->cfg.starts = icspp::StartPolicy::AllPairs; return;
      case ICSPP_STARTS_ICS_ADJACENT: c->cfg.starts = icspp::StartPolicy::IcsAdjacent; return;
      case ICSPP_STARTS_BEST_INITIAL: c->cfg.starts = icspp::StartPolicy::BestInitialOnly; return;
      case ICSPP_STARTS_EXPLICIT: c->cfg.starts = icspp::StartPolicy::Explicit; return;
    }
    require(false, "unknown start policy");
  });
}

icspp_status icspp_config_set_explicit_starts(icspp_config* c, const int* indices, size_t count, int d) {
  return guarded([&] {
    require(c != nullptr, "config is null");
    require(d >= 1, "d must be >= 1");
    require(count == 0 || indices != nullptr, "indices is null");
    std::vector<icspp::StartTuple> tuples;
    for (size_t k = 0; k < count; ++k) {
      icspp::StartTuple t;
      for (int j = 0; j < d; ++j) {
        const int v = indices[k * static_cast<size_t>(d) + static_cast<size_t>(j)];
        if (v < 1 || std::find(t.begin(), t.end(), v - 1) != t.end())
          throw icspp::Error(icspp::ErrorCode::InvalidIndices, "explicit start indices must be distinct and >= 1");
        t.push_back(v - 1);
      }
      tuples.push_back(std::move(t));
    }
    c->cfg.explicit_starts = std::move(tuples);
    c->cfg.starts = icspp::StartPolicy::Explicit;
  });
}

icspp_status icspp_config_set_snapshot_iters(icspp_config* c, const int* iters, size_t count) {
  return guarded([&] {
    require(c != nullptr, "config is null");
    require(count == 0 || iters != nullptr, "iters is null");
    std::vector<int> v(iters, iters + count);
    for (int k : v) require(k >= 0, "snapshot iterations must be >= 0");
    c->cfg.optimizer.snapshot_iters = std::move(v);
  });
}

icspp_status icspp_run(const icspp_dataset* data, const icspp_config* cfg, icspp_result** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(data != nullptr && cfg != nullptr && out != nullptr, "data, cfg and out must be non-null");
    const auto t0 = std::chrono::steady_clock::now();
    auto r = std::make_unique<icspp_result>();
    r->result = icspp::run_pipeline(data->data, cfg->cfg);
    r->cfg = cfg->cfg;
    r->content_hash = data->content_hash;
    r->pipeline_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    *out = r.release();
  });
}

void icspp_result_free(icspp_result* result) { delete result; }

double icspp_result_best_H(const icspp_result* r) { return r ? r->result.best.final_H : 0.0; }
double icspp_result_reference_H(const icspp_result* r) { return r ? r->result.reference_H : 0.0; }
size_t icspp_result_start_count(const icspp_result* r) { return r ? r->result.per_start.size() : 0; }
int icspp_result_all_starts_capped(const icspp_result* r) { return r && r->result.all_starts_capped ? 1 : 0; }

icspp_status icspp_result_start_info(const icspp_result* r, size_t k, icspp_start_info* out) {
  return guarded([&] {
    require(r != nullptr && out != nullptr, "result and out must be non-null");
    if (k >= r->result.per_start.size()) throw icspp::Error(icspp::ErrorCode::InvalidIndices, "start index out of range");
    fill_info(r->result.per_start[k], out);
  });
}

icspp_status icspp_result_start_indices(const icspp_result* r, size_t k, int* out, size_t capacity) {
  return guarded([&] {
    require(r != nullptr, "result is null");
    if (k >= r->result.per_start.size()) throw icspp::Error(icspp::ErrorCode::InvalidIndices, "start index out of range");
    copy_indices(r->result.per_start[k].indices, out, capacity);
  });
}

icspp_status icspp_result_best_start(const icspp_result* r, icspp_start_info* info, int* indices, size_t capacity) {
  return guarded([&] {
    require(r != nullptr, "result is null");
    for (const icspp::StartOutcome& o : r->result.per_start) {
      if (o.restart == r->result.best_restart && o.indices == r->result.best_start) {
        if (info) fill_info(o, info);
        if (indices) copy_indices(o.indices, indices, capacity);
        return;
      }
    }
    throw icspp::Error(icspp::ErrorCode::InvalidIndices, "best start missing from the start table");
  });
}

icspp_status icspp_result_transform(const icspp_result* r, double* out, size_t capacity) {
  return guarded([&] {
    require(r != nullptr, "result is null");
    copy_matrix(r->result.B, out, capacity);
  });
}

icspp_status icspp_result_projected(const icspp_result* r, double* out, size_t capacity) {
  return guarded([&] {
    require(r != nullptr, "result is null");
    const icspp::Matrix y = (r->result.centered_raw * r->result.B).leftCols(r->cfg.d);
    copy_matrix(y, out, capacity);
  });
}

icspp_status icspp_result_write_outputs(const icspp_result* r, const char* out_dir, const char* input_label,
                                        double total_seconds) {
  return guarded([&] {
    require(r != nullptr && out_dir != nullptr, "result and out_dir must be non-null");
    icspp::io::RunInfo info;
    info.input_path = input_label ? input_label : "";
    info.content_hash = r->content_hash;
    info.seconds_pipeline = r->pipeline_seconds;
    info.seconds_total = total_seconds;
    icspp::io::write_run_outputs(out_dir, r->result, r->cfg, info);
  });
}

icspp_status icspp_generate(icspp_generator_kind kind, int n, int p, uint64_t seed, icspp_mixing mixing,
                            icspp_generated** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    icspp::Mixing mix = icspp::Mixing::None;
    switch (mixing) {
      case ICSPP_MIX_NONE: mix = icspp::Mixing::None; break;
      case ICSPP_MIX_ORTHOGONAL: mix = icspp::Mixing::RandomOrthogonal; break;
      case ICSPP_MIX_NONSINGULAR: mix = icspp::Mixing::RandomNonsingular; break;
      default: throw icspp::Error(icspp::ErrorCode::InvalidSpec, "unknown mixing");
    }
    icspp::GeneratorSpec spec;
    switch (kind) {
      case ICSPP_GEN_CLUSTERS: spec = icspp::three_cluster_spec(seed, mix); break;
      case ICSPP_GEN_CIRCLE: spec = icspp::circle_spec(seed, mix); break;
      case ICSPP_GEN_HYPERPLANES: spec = icspp::hyperplane_spec(seed, mix); break;
      case ICSPP_GEN_GAUSSIAN: spec = icspp::gaussian_spec(500, 8, seed); spec.mixing = mix; break;
      default: throw icspp::Error(icspp::ErrorCode::InvalidSpec, "unknown generator kind");
    }
    if (n > 0) spec.n = n;
    if (p > 0) spec.p = p;
    auto g = std::make_unique<icspp_generated>();
    g->truth = icspp::generate(spec);
    g->spec = spec;
    *out = g.release();
  });
}

icspp_status icspp_generated_dataset(const icspp_generated* gen, icspp_dataset** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(gen != nullptr && out != nullptr, "gen and out must be non-null");
    std::ostringstream csv;
    icspp::io::write_csv(csv, gen->truth.data.rows());
    *out = new icspp_dataset{gen->truth.data, icspp::io::fnv1a(csv.str())};
  });
}

icspp_status icspp_generated_write_truth(const icspp_generated* gen, const char* path) {
  return guarded([&] {
    require(gen != nullptr && path != nullptr, "gen and path must be non-null");
    std::ofstream out(path);
    if (!out) throw icspp::Error(icspp::ErrorCode::IoError, std::string("cannot write ") + path);
    out << icspp::io::truth_json(gen->truth, gen->spec).dump(2) << '\n';
  });
}

icspp_status icspp_generated_score(const icspp_generated* gen, const icspp_result* r, double* out) {
  return guarded([&] {
    require(gen != nullptr && r != nullptr && out != nullptr, "gen, result and out must be non-null");
    *out = icspp::recovery_score(r->result, gen->truth, r->cfg.d);
  });
}

void icspp_generated_free(icspp_generated* gen) { delete gen; }

}  // extern "C"
