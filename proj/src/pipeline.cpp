#include "icspp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "icspp/error.hpp"

namespace icspp {

std::string_view to_string(PipelineMode mode) noexcept {
  switch (mode) {
    case PipelineMode::IcsThenPP: return "ics-pp";
    case PipelineMode::GlobalPP: return "global-pp";
    case PipelineMode::IcsOnly: return "ics-only";
  }
  return "unknown";
}

std::string_view to_string(StartPolicy policy) noexcept {
  switch (policy) {
    case StartPolicy::AllPairs: return "all-pairs";
    case StartPolicy::IcsAdjacent: return "ics-adjacent";
    case StartPolicy::BestInitialOnly: return "best-initial";
    case StartPolicy::Explicit: return "explicit";
  }
  return "unknown";
}

StartPolicy PipelineConfig::effective_starts() const {
  if (starts) return *starts;
  return d == 2 ? StartPolicy::AllPairs : StartPolicy::IcsAdjacent;
}

void PipelineConfig::validate(Eigen::Index p) const {
  if (d < 1 || d >= p)
    throw Error(ErrorCode::InvalidArgument,
                "target dimension d must satisfy 1 <= d < p (d=" + std::to_string(d) + ", p=" + std::to_string(p) + ")");
  if (restarts < 0) throw Error(ErrorCode::InvalidArgument, "restarts must be >= 0");
  if (jobs < 1) throw Error(ErrorCode::InvalidArgument, "jobs must be >= 1");
  scatter.validate();
  optimizer.validate();
}

DataSet prewhiten(const DataSet& centered, SymMatrix* whitening) {
  const SymMatrix cov = sample_covariance(centered.rows());
  SymMatrix inv_root = sym_inverse_sqrt(cov);
  DataSet pre = centered.with_rows(centered.rows() * inv_root.matrix(), Stage::Pre);
  if (whitening) *whitening = std::move(inv_root);
  return pre;
}

IcsRotation ics_rotate(const DataSet& pre, const ScatterConfig& cfg) {
  const SymMatrix scatter = one_step_m_scatter(pre.rows(), cfg);
  SpectralDecomp decomp = spectral_decompose(scatter, true);
  DataSet rotated = pre.with_rows(pre.rows() * decomp.eigenvectors, Stage::Ics);
  return {std::move(rotated), std::move(decomp)};
}

namespace {

void all_combinations(int p, int d, std::vector<StartTuple>& out) {
  StartTuple current;
  auto rec = [&](auto&& self, int from) -> void {
    if (static_cast<int>(current.size()) == d) {
      out.push_back(current);
      return;
    }
    for (int j = from; j <= p - (d - static_cast<int>(current.size())); ++j) {
      current.push_back(j);
      self(self, j + 1);
      current.pop_back();
    }
  };
  rec(rec, 0);
}

}  // namespace

std::vector<StartTuple> enumerate_starts(int p, int d, StartPolicy policy,
                                         const std::vector<StartTuple>& explicit_starts) {
  if (d < 1 || d >= p)
    throw Error(ErrorCode::InvalidIndices, "need 1 <= d < p for start enumeration");
  std::vector<StartTuple> out;
  switch (policy) {
    case StartPolicy::AllPairs:
      if (d != 2) throw Error(ErrorCode::InvalidIndices, "all-pairs starts require d = 2");
      all_combinations(p, d, out);
      break;
    case StartPolicy::BestInitialOnly:
      all_combinations(p, d, out);
      break;
    case StartPolicy::IcsAdjacent:
      for (int k = 0; k <= d; ++k) {
        StartTuple t;
        for (int i = 0; i < d - k; ++i) t.push_back(i);
        for (int i = p - k; i < p; ++i) t.push_back(i);
        out.push_back(std::move(t));
      }
      break;
    case StartPolicy::Explicit:
      if (explicit_starts.empty()) throw Error(ErrorCode::InvalidIndices, "explicit start list is empty");
      for (const StartTuple& t : explicit_starts) {
        if (static_cast<int>(t.size()) != d)
          throw Error(ErrorCode::InvalidIndices, "explicit start must list exactly d components");
        permutation_matrix(p, t);  // validates range and distinctness
        out.push_back(t);
      }
      break;
  }
  return out;
}

Matrix recover_B(const Matrix& x_raw, const Matrix& x_final) {
  if (x_raw.rows() != x_final.rows())
    throw Error(ErrorCode::DimensionMismatch, "recover_B needs matching row counts");
  // Same estimator as (XᵀX)⁻¹XᵀY, solved through a rank-revealing QR of X.
  Eigen::ColPivHouseholderQR<Matrix> qr(x_raw);
  if (qr.rank() < x_raw.cols())
    throw Error(ErrorCode::SingularDesign, "raw data matrix is rank deficient (rank " +
                                               std::to_string(qr.rank()) + " < " + std::to_string(x_raw.cols()) + ")");
  return qr.solve(x_final);
}

namespace {

struct Task {
  int restart = 0;
  StartTuple indices;
  const Matrix* base = nullptr;
};

template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(jobs, static_cast<int>(count))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

bool outcome_before(const StartOutcome& a, const StartOutcome& b) {
  if (a.initial_H != b.initial_H) return a.initial_H < b.initial_H;
  if (a.restart != b.restart) return a.restart < b.restart;
  return a.indices < b.indices;
}

}  // namespace

PipelineResult run_pipeline(const DataSet& raw, const PipelineConfig& cfg) {
  const Eigen::Index p = raw.p();
  const Eigen::Index n = raw.n();
  cfg.validate(p);
  if (n <= p)
    throw Error(ErrorCode::TooFewRows, "need more observations than variables (n=" + std::to_string(n) +
                                           ", p=" + std::to_string(p) + ")");
  const int d = cfg.d;

  PipelineResult result;
  const DataSet centered = center(raw);
  result.center = centered.center();
  result.centered_raw = centered.rows();

  SymMatrix whitening;
  const DataSet pre = prewhiten(centered, &whitening);
  result.stagewise.whitening = whitening;

  DataSet base = pre;
  if (cfg.mode == PipelineMode::GlobalPP) {
    result.stagewise.ics = SpectralDecomp{Matrix::Identity(p, p), Vector::Ones(p)};
  } else {
    IcsRotation ics = ics_rotate(pre, cfg.scatter);
    base = std::move(ics.data);
    result.stagewise.ics = std::move(ics.decomposition);
  }
  result.invariant_coordinates = base.rows();

  // Pre-rotations: restart 0 is the identity; further ones only for GlobalPP.
  std::vector<Matrix> rotations{Matrix::Identity(p, p)};
  std::vector<Matrix> bases{base.rows()};
  if (cfg.mode == PipelineMode::GlobalPP) {
    std::mt19937_64 rng(cfg.seed);
    for (int s = 0; s < cfg.restarts; ++s) {
      rotations.push_back(random_orthogonal(p, rng).matrix());
      bases.push_back(base.rows() * rotations.back());
    }
  }

  const StartPolicy policy = cfg.effective_starts();
  const std::vector<StartTuple> tuples =
      enumerate_starts(static_cast<int>(p), d, policy, cfg.explicit_starts);

  std::vector<Task> tasks;
  for (std::size_t s = 0; s < bases.size(); ++s)
    for (const StartTuple& t : tuples) tasks.push_back({static_cast<int>(s), t, &bases[s]});

  const EntropyIndex index(cfg.optimizer.entropy);
  std::vector<StartOutcome> outcomes(tasks.size());
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t k) {
    const Task& task = tasks[k];
    const Matrix u = permutation_matrix(p, task.indices);
    const Matrix start = *task.base * u;
    StartOutcome& o = outcomes[k];
    o.restart = task.restart;
    o.indices = task.indices;
    o.initial_H = index.value(start.leftCols(d));
    o.final_H = o.initial_H;
  });

  // Which starts get optimized.
  std::vector<std::size_t> chosen;
  if (cfg.mode != PipelineMode::IcsOnly) {
    if (policy == StartPolicy::BestInitialOnly) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < outcomes.size(); ++k)
        if (outcome_before(outcomes[k], outcomes[best])) best = k;
      chosen.push_back(best);
    } else {
      for (std::size_t k = 0; k < outcomes.size(); ++k) chosen.push_back(k);
    }
  }

  std::vector<LocalPPResult> runs(outcomes.size());
  parallel_for(chosen.size(), cfg.jobs, [&](std::size_t c) {
    const std::size_t k = chosen[c];
    const Task& task = tasks[k];
    const DataSet start(*task.base * permutation_matrix(p, task.indices), Stage::Current);
    runs[k] = local_pp(start, d, cfg.optimizer, index);
    StartOutcome& o = outcomes[k];
    o.optimized = true;
    o.final_H = runs[k].final_H;
    o.iterations = static_cast<int>(runs[k].trace.iterations.size());
    o.termination = runs[k].trace.termination;
    o.trace = runs[k].trace;
  });

  // Best by final Ĥ; ties go to the earlier start in report order.
  std::size_t best = 0;
  for (std::size_t k = 1; k < outcomes.size(); ++k) {
    const bool better = outcomes[k].final_H < outcomes[best].final_H ||
                        (outcomes[k].final_H == outcomes[best].final_H && outcome_before(outcomes[k], outcomes[best]));
    if (better) best = k;
  }

  const Task& win = tasks[best];
  const Matrix perm = permutation_matrix(p, win.indices);
  if (outcomes[best].optimized) {
    result.best = std::move(runs[best]);
  } else {
    const DataSet start(*win.base * perm, Stage::Current);
    result.best.rotated_data = start;
    result.best.total_rotation = OrthogonalMatrix::identity(p);
    result.best.initial_H = outcomes[best].initial_H;
    result.best.final_H = outcomes[best].initial_H;
    if (std::find(cfg.optimizer.snapshot_iters.begin(), cfg.optimizer.snapshot_iters.end(), 0) !=
        cfg.optimizer.snapshot_iters.end())
      result.best.snapshots.emplace(0, start.rows().leftCols(d));
  }
  result.best_start = win.indices;
  result.best_restart = win.restart;

  result.all_starts_capped =
      !chosen.empty() && std::all_of(chosen.begin(), chosen.end(), [&](std::size_t k) {
        return outcomes[k].termination != Termination::GradientBelowThreshold;
      });

  std::sort(outcomes.begin(), outcomes.end(), outcome_before);
  result.per_start = std::move(outcomes);

  StagewiseTransforms& st = result.stagewise;
  st.pre_rotation = rotations[static_cast<std::size_t>(win.restart)];
  st.permutation = perm;
  st.optimizer_rotation = result.best.total_rotation;
  st.product = whitening.matrix() * st.ics.eigenvectors * st.pre_rotation * perm *
               st.optimizer_rotation.matrix().transpose();

  result.B = recover_B(result.centered_raw, result.best.rotated_data.rows());
  result.reference_H = gaussian_reference_entropy(d, cfg.optimizer.entropy);
  return result;
}

}  // namespace icspp
