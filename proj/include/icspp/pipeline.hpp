#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "icspp/dataset.hpp"
#include "icspp/optimizer.hpp"
#include "icspp/scatter.hpp"

namespace icspp {

enum class PipelineMode { IcsThenPP, GlobalPP, IcsOnly };

enum class StartPolicy {
  AllPairs,         // every (j, k), j < k; d = 2 only
  IcsAdjacent,      // the d+1 tuples built from the first and last components
  BestInitialOnly,  // all C(p, d) tuples screened, only the minimal Ĥ optimized
  Explicit,
};

using StartTuple = std::vector<int>;  // 0-based component indices

struct PipelineConfig {
  int d = 2;
  ScatterConfig scatter;
  OptimizerConfig optimizer;
  PipelineMode mode = PipelineMode::IcsThenPP;
  std::optional<StartPolicy> starts;  // unset: AllPairs for d = 2, IcsAdjacent otherwise
  std::vector<StartTuple> explicit_starts;
  int restarts = 0;  // random orthogonal pre-rotations, GlobalPP only
  std::uint64_t seed = 0;
  int jobs = 1;

  StartPolicy effective_starts() const;
  void validate(Eigen::Index p) const;
};

std::string_view to_string(PipelineMode mode) noexcept;
std::string_view to_string(StartPolicy policy) noexcept;

struct StartOutcome {
  int restart = 0;  // 0 = no pre-rotation
  StartTuple indices;
  double initial_H = 0.0;
  double final_H = 0.0;
  int iterations = 0;
  Termination termination = Termination::GradientBelowThreshold;
  bool optimized = false;
  PPTrace trace;
};

struct StagewiseTransforms {
  SymMatrix whitening;           // B₀⁻¹
  SpectralDecomp ics;            // identity eigenvectors outside ICS modes
  Matrix pre_rotation;           // Vₛ of the winning restart (identity for restart 0)
  Matrix permutation;            // U of the winning start
  OrthogonalMatrix optimizer_rotation;
  Matrix product;                // B₀⁻¹ Û Vₛ U Rᵀ
};

struct PipelineResult {
  LocalPPResult best;
  StartTuple best_start;
  int best_restart = 0;
  std::vector<StartOutcome> per_start;  // sorted by initial Ĥ
  Matrix B;                             // centered raw · B = final data
  StagewiseTransforms stagewise;
  Vector center;
  Matrix centered_raw;
  Matrix invariant_coordinates;         // x^ics (x^pre for GlobalPP)
  double reference_H = 0.0;
  bool all_starts_capped = false;
};

DataSet prewhiten(const DataSet& centered, SymMatrix* whitening = nullptr);

struct IcsRotation {
  DataSet data;
  SpectralDecomp decomposition;
};

IcsRotation ics_rotate(const DataSet& pre, const ScatterConfig& cfg);

/// Start tuples for a policy, 0-based. Explicit tuples are validated and
/// passed through. BestInitialOnly returns all C(p, d) tuples; the pipeline
/// screens them.
std::vector<StartTuple> enumerate_starts(int p, int d, StartPolicy policy,
                                         const std::vector<StartTuple>& explicit_starts = {});

/// Least-squares B = (XᵀX)⁻¹XᵀY. Throws SingularDesign when X is rank deficient.
Matrix recover_B(const Matrix& x_raw, const Matrix& x_final);

PipelineResult run_pipeline(const DataSet& raw, const PipelineConfig& cfg);

}  // namespace icspp
