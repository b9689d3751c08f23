#include "icspp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "icspp/error.hpp"

namespace icspp {

void OptimizerConfig::validate() const {
  if (!(threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold delta0 must be > 0");
  if (max_outer_iters < 1 || max_halvings < 1)
    throw Error(ErrorCode::InvalidArgument, "iteration caps must be >= 1");
  entropy.validate();
}

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::GradientBelowThreshold: return "GradientBelowThreshold";
    case Termination::MaxIters: return "MaxIters";
    case Termination::StepFloor: return "StepFloor";
  }
  return "Unknown";
}

Matrix permutation_matrix(Eigen::Index p, const std::vector<int>& selected) {
  const auto d = static_cast<Eigen::Index>(selected.size());
  if (d < 1 || d > p) throw Error(ErrorCode::InvalidIndices, "need between 1 and p selected components");
  std::vector<bool> taken(static_cast<std::size_t>(p), false);
  for (int j : selected) {
    if (j < 0 || j >= p)
      throw Error(ErrorCode::InvalidIndices, "component index " + std::to_string(j) + " out of range");
    if (taken[static_cast<std::size_t>(j)])
      throw Error(ErrorCode::InvalidIndices, "component index " + std::to_string(j) + " repeated");
    taken[static_cast<std::size_t>(j)] = true;
  }
  Matrix u = Matrix::Zero(p, p);
  Eigen::Index col = 0;
  for (int j : selected) u(j, col++) = 1.0;
  for (Eigen::Index j = 0; j < p; ++j)
    if (!taken[static_cast<std::size_t>(j)]) u(j, col++) = 1.0;
  return u;
}

DataSet permute_components(const DataSet& data, const std::vector<int>& selected) {
  const Matrix u = permutation_matrix(data.p(), selected);
  return data.with_rows(data.rows() * u, Stage::Current);
}

bool armijo_accept(double H, double H_tmp, double delta) {
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(H), std::abs(H_tmp));
  return H - H_tmp >= delta / 3.0 - slack;
}

LocalPPResult local_pp(const DataSet& data, int d, const OptimizerConfig& cfg) {
  return local_pp(data, d, cfg, EntropyIndex(cfg.entropy));
}

LocalPPResult local_pp(const DataSet& data, int d, const OptimizerConfig& cfg, const PPIndex& index) {
  cfg.validate();
  const Eigen::Index p = data.p();
  if (d < 1 || d >= p)
    throw Error(ErrorCode::DimensionMismatch,
                "need 1 <= d < p, got d=" + std::to_string(d) + ", p=" + std::to_string(p));

  auto want_snapshot = [&](int iter) {
    return std::find(cfg.snapshot_iters.begin(), cfg.snapshot_iters.end(), iter) != cfg.snapshot_iters.end();
  };

  Matrix x = data.rows();
  Matrix total = Matrix::Identity(p, p);
  LocalPPResult out;
  if (want_snapshot(0)) out.snapshots.emplace(0, x.leftCols(d));

  PPIndex::Evaluation eval = index.evaluate(x.leftCols(d));
  double H = eval.value;
  out.initial_H = H;
  Matrix C = gradient_C_from(x, d, eval.gradients);
  double grad_sq = C.squaredNorm();
  PPTrace& trace = out.trace;
  trace.termination = Termination::GradientBelowThreshold;

  int iter = 0;
  while (grad_sq >= cfg.threshold) {
    if (iter == cfg.max_outer_iters) {
      trace.termination = Termination::MaxIters;
      break;
    }
    SvdFactors f = thin_svd(C);
    double delta = grad_sq;
    int halvings = 0;
    // Rows are observations, so applying U to every xᵢ is x · Uᵀ.
    Matrix u = structured_exp(f, d, p).matrix();
    Matrix x_tmp = x * u.transpose();
    // The trial is evaluated with gradients; halvings are rare, and an
    // accepted trial then needs no second kernel pass.
    eval = index.evaluate(x_tmp.leftCols(d));
    double H_tmp = eval.value;
    bool floor_hit = false;
    while (!(armijo_accept(H, H_tmp, delta) && H_tmp < H)) {
      if (halvings == cfg.max_halvings) {
        floor_hit = true;
        break;
      }
      delta /= 2.0;
      f.singulars /= 2.0;
      ++halvings;
      u = structured_exp(f, d, p).matrix();
      x_tmp = x * u.transpose();
      eval = index.evaluate(x_tmp.leftCols(d));
      H_tmp = eval.value;
    }
    if (floor_hit) {
      trace.termination = Termination::StepFloor;
      break;
    }

    ++iter;
    trace.iterations.push_back(PPIteration{iter, H, H_tmp, grad_sq, halvings,
                                           std::ldexp(1.0, -halvings), delta});
    x = std::move(x_tmp);
    total = u * total;
    H = H_tmp;
    C = gradient_C_from(x, d, eval.gradients);
    grad_sq = C.squaredNorm();
    if (want_snapshot(iter)) out.snapshots.emplace(iter, x.leftCols(d));
  }

  trace.final_grad_norm_sq = grad_sq;
  out.final_H = H;
  out.total_rotation = OrthogonalMatrix(std::move(total));
  out.rotated_data = data.with_rows(std::move(x), Stage::Current);
  return out;
}

}  // namespace icspp
