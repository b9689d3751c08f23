#include "icspp/scatter.hpp"

#include <cmath>
#include <string>

#include "icspp/error.hpp"

namespace icspp {

void ScatterConfig::validate() const {
  if (!(nu >= 0.0) || !std::isfinite(nu))
    throw Error(ErrorCode::InvalidArgument, "nu must be finite and >= 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw Error(ErrorCode::InvalidArgument, "gamma must be finite and > 0");
}

DataSet center(const DataSet& data) {
  const Vector mean = data.rows().colwise().mean().transpose();
  Matrix centered = data.rows().rowwise() - mean.transpose();
  return DataSet(std::move(centered), mean, Stage::Centered, data.column_names());
}

SymMatrix sample_covariance(const Matrix& centered_rows) {
  const Eigen::Index n = centered_rows.rows();
  if (n < 2) throw Error(ErrorCode::TooFewRows, "sample covariance needs n >= 2");
  Matrix s = Matrix::Zero(centered_rows.cols(), centered_rows.cols());
  s.selfadjointView<Eigen::Lower>().rankUpdate(centered_rows.transpose(), 1.0 / static_cast<double>(n - 1));
  return SymMatrix(s.selfadjointView<Eigen::Lower>());
}

SymMatrix one_step_m_scatter(const Matrix& rows, const ScatterConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = rows.rows();
  const Eigen::Index p = rows.cols();
  if (n < 2) throw Error(ErrorCode::TooFewRows, "scatter estimator needs n >= 2");

  // Each row i contributes a block over j > i; blocks are folded into the
  // total with Kahan compensation in fixed row order.
  Matrix total = Matrix::Zero(p, p);
  Matrix carry = Matrix::Zero(p, p);
  Matrix block(p, p);
  Vector diff(p);
  Eigen::Index used = 0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    block.setZero();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      diff = rows.row(i) - rows.row(j);
      const double sq = diff.squaredNorm();
      if (cfg.nu == 0.0 && sq < kDuplicatePairEpsilon) continue;
      const double w = std::pow(cfg.nu + sq, -cfg.gamma);
      block.selfadjointView<Eigen::Lower>().rankUpdate(diff, w);
      ++used;
    }
    const Matrix y = block - carry;
    const Matrix t = total + y;
    carry = (t - total) - y;
    total = t;
  }
  if (used == 0)
    throw Error(ErrorCode::DegeneratePairs, "every pair of observations coincides; scatter undefined for nu = 0");

  Matrix full = total.selfadjointView<Eigen::Lower>();
  if (cfg.normalization == ScatterNormalization::TraceP) {
    const double tr = full.trace();
    if (!(tr > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "scatter estimate has zero trace");
    full *= static_cast<double>(p) / tr;
  }
  return SymMatrix(full);
}

}  // namespace icspp
