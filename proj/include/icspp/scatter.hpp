#pragma once

#include "icspp/dataset.hpp"
#include "icspp/linalg.hpp"

namespace icspp {

enum class ScatterNormalization { TraceP, None };

/// Parameters of the one-step symmetrized M-estimator. The pair weight is
/// (nu + ‖xᵢ − xⱼ‖²)^(−gamma).
struct ScatterConfig {
  double nu = 0.0;
  double gamma = 1.0;
  ScatterNormalization normalization = ScatterNormalization::TraceP;

  void validate() const;
};

/// Squared pair distances below this are skipped when nu = 0.
inline constexpr double kDuplicatePairEpsilon = 1e-24;

/// Subtracts the column means; the result has stage Centered.
DataSet center(const DataSet& data);

/// (1/(n−1)) Σ xᵢxᵢᵀ of already-centered rows.
SymMatrix sample_covariance(const Matrix& centered_rows);

/// C · Σ_{i<j} (xᵢ−xⱼ)(xᵢ−xⱼ)ᵀ / (ν + ‖xᵢ−xⱼ‖²)^γ. C makes the trace equal p
/// under TraceP normalization and is 1 otherwise. Throws DegeneratePairs when
/// every pair is skipped as a duplicate.
SymMatrix one_step_m_scatter(const Matrix& rows, const ScatterConfig& cfg);

}  // namespace icspp
