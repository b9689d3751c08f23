#pragma once

#include <map>
#include <string_view>
#include <vector>

#include "icspp/dataset.hpp"
#include "icspp/entropy.hpp"
#include "icspp/linalg.hpp"

namespace icspp {

struct OptimizerConfig {
  double threshold = 1e-11;  // δ₀ on ‖Ĉ‖_F²
  int max_outer_iters = 1000;
  int max_halvings = 60;
  EntropyConfig entropy;
  // Iteration counts at which the projected coordinates are kept.
  std::vector<int> snapshot_iters;

  void validate() const;
};

enum class Termination { GradientBelowThreshold, MaxIters, StepFloor };

std::string_view to_string(Termination t) noexcept;

struct PPIteration {
  int iter = 0;  // 1-based
  double H_before = 0.0;
  double H_after = 0.0;
  double grad_norm_sq = 0.0;
  int halvings = 0;
  double accepted_t = 1.0;
  double accepted_delta = 0.0;  // threshold fed to armijo_accept for the accepted step
};

struct PPTrace {
  std::vector<PPIteration> iterations;
  Termination termination = Termination::GradientBelowThreshold;
  double final_grad_norm_sq = 0.0;
};

struct LocalPPResult {
  DataSet rotated_data;
  OrthogonalMatrix total_rotation;  // rotated row i = total_rotation · input row i
  double initial_H = 0.0;
  double final_H = 0.0;
  PPTrace trace;
  std::map<int, Matrix> snapshots;  // iteration → n×d projection
};

/// Moves the selected coordinates (0-based, in the given order) to the front
/// and appends the rest in ascending order. Throws InvalidIndices.
DataSet permute_components(const DataSet& data, const std::vector<int>& selected);

/// The p×p permutation matrix U with permute_components(x) = x · U.
Matrix permutation_matrix(Eigen::Index p, const std::vector<int>& selected);

/// Armijo–Goldstein test H − H_tmp ≥ delta/3. The comparison allows a few
/// ulps of slack so that decimally exact boundary cases are accepted.
bool armijo_accept(double H, double H_tmp, double delta);

/// Gradient descent on the orthogonal group starting from the projection on
/// the first d coordinates, with step-size halving.
LocalPPResult local_pp(const DataSet& data, int d, const OptimizerConfig& cfg);
LocalPPResult local_pp(const DataSet& data, int d, const OptimizerConfig& cfg, const PPIndex& index);

}  // namespace icspp
