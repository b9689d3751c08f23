#pragma once

#include <cstdint>
#include <vector>

#include "icspp/dataset.hpp"
#include "icspp/pipeline.hpp"

namespace icspp {

enum class GeneratorKind { ClusterMixture, EmbeddedCircle, ParallelHyperplanes, PureGaussian };
enum class Mixing { None, RandomOrthogonal, RandomNonsingular };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::PureGaussian;
  int n = 500;
  int p = 8;
  int structure_dim = 2;

  // ClusterMixture: centers live in the first structure_dim coordinates.
  std::vector<Vector> cluster_centers;
  std::vector<double> cluster_weights;
  double cluster_sd = 1.0;

  // EmbeddedCircle
  double circle_radius = 3.0;
  double circle_noise = 0.2;

  // ParallelHyperplanes: the normal is the first coordinate.
  int plane_count = 4;
  double plane_spacing = 0.8;
  double plane_jitter = 0.05;

  Mixing mixing = Mixing::RandomOrthogonal;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Presets for the three structures the pipeline is exercised on.
GeneratorSpec three_cluster_spec(std::uint64_t seed, Mixing mixing = Mixing::RandomOrthogonal);
GeneratorSpec circle_spec(std::uint64_t seed, Mixing mixing = Mixing::RandomOrthogonal);
GeneratorSpec hyperplane_spec(std::uint64_t seed, Mixing mixing = Mixing::RandomOrthogonal);
GeneratorSpec gaussian_spec(int n, int p, std::uint64_t seed);

struct LabeledDataSet {
  DataSet data;              // x = mixing · latent, stage Raw
  std::vector<int> labels;   // cluster / plane id; circle: angle bucket 0..11
  std::vector<double> angles;  // circle only
  Matrix latent;             // pre-mixing coordinates
  Matrix planted_basis;      // p × structure_dim, orthonormal, pre-mixing coordinates
  Matrix mixing;             // p × p

  /// Orthonormal basis of the structure directions as seen in the mixed data
  /// (mixing⁻ᵀ · planted_basis, orthonormalized).
  Matrix mixed_planted_basis() const;
};

LabeledDataSet generate(const GeneratorSpec& spec);

/// cos² of the largest principal angle between span(found) and span(planted),
/// both p×k column bases (need not be orthonormal).
double subspace_score(const Matrix& found, const Matrix& planted);

/// Pulls the first d columns of B back to the pre-mixing coordinates and
/// scores them against the planted subspace. 1 = perfect recovery.
double recovery_score(const PipelineResult& result, const LabeledDataSet& truth, int d);

}  // namespace icspp
