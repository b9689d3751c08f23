#include "icspp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "icspp/error.hpp"

namespace icspp {

namespace {

Matrix orthonormal_basis(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace

void GeneratorSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); };
  if (n < 2) fail("generator needs n >= 2");
  if (p < 2) fail("generator needs p >= 2");
  if (structure_dim < 0 || structure_dim > p) fail("structure_dim must lie in [0, p]");
  switch (kind) {
    case GeneratorKind::ClusterMixture: {
      if (cluster_centers.empty()) fail("cluster mixture needs at least one center");
      if (cluster_weights.size() != cluster_centers.size()) fail("one weight per cluster center required");
      double total = 0.0;
      for (double w : cluster_weights) {
        if (!(w > 0.0)) fail("cluster weights must be positive");
        total += w;
      }
      if (std::abs(total - 1.0) > 1e-9) fail("cluster weights must sum to 1");
      for (const Vector& c : cluster_centers)
        if (c.size() != structure_dim) fail("cluster centers must have structure_dim entries");
      if (!(cluster_sd > 0.0)) fail("cluster_sd must be > 0");
      break;
    }
    case GeneratorKind::EmbeddedCircle:
      if (structure_dim != 2) fail("embedded circle has structure_dim 2");
      if (!(circle_radius > 0.0) || !(circle_noise >= 0.0)) fail("circle radius must be > 0, noise >= 0");
      break;
    case GeneratorKind::ParallelHyperplanes:
      if (structure_dim != 1) fail("parallel hyperplanes have structure_dim 1");
      if (plane_count < 2 || !(plane_spacing > 0.0) || !(plane_jitter >= 0.0))
        fail("need >= 2 planes, spacing > 0, jitter >= 0");
      break;
    case GeneratorKind::PureGaussian:
      break;
  }
}

GeneratorSpec three_cluster_spec(std::uint64_t seed, Mixing mixing) {
  GeneratorSpec s;
  s.kind = GeneratorKind::ClusterMixture;
  s.n = 500;
  s.p = 8;
  s.structure_dim = 2;
  s.cluster_sd = 1.0;
  // Equilateral triangle with side 5 cluster standard deviations.
  const double radius = 5.0 / std::sqrt(3.0);
  for (double deg : {90.0, 210.0, 330.0}) {
    const double a = deg * std::numbers::pi / 180.0;
    s.cluster_centers.push_back((Vector(2) << radius * std::cos(a), radius * std::sin(a)).finished());
  }
  s.cluster_weights = {0.4, 0.35, 0.25};
  s.mixing = mixing;
  s.seed = seed;
  return s;
}

GeneratorSpec circle_spec(std::uint64_t seed, Mixing mixing) {
  GeneratorSpec s;
  s.kind = GeneratorKind::EmbeddedCircle;
  s.n = 500;
  s.p = 16;
  s.structure_dim = 2;
  s.circle_radius = 3.0;
  s.circle_noise = 0.2;
  s.mixing = mixing;
  s.seed = seed;
  return s;
}

GeneratorSpec hyperplane_spec(std::uint64_t seed, Mixing mixing) {
  GeneratorSpec s;
  s.kind = GeneratorKind::ParallelHyperplanes;
  s.n = 500;
  s.p = 6;
  s.structure_dim = 1;
  s.plane_count = 4;
  s.plane_spacing = 0.8;
  s.plane_jitter = 0.05;
  s.mixing = mixing;
  s.seed = seed;
  return s;
}

GeneratorSpec gaussian_spec(int n, int p, std::uint64_t seed) {
  GeneratorSpec s;
  s.kind = GeneratorKind::PureGaussian;
  s.n = n;
  s.p = p;
  s.structure_dim = 0;
  s.mixing = Mixing::None;
  s.seed = seed;
  return s;
}

Matrix LabeledDataSet::mixed_planted_basis() const {
  if (planted_basis.cols() == 0) return planted_basis;
  return orthonormal_basis(mixing.transpose().fullPivLu().solve(planted_basis));
}

LabeledDataSet generate(const GeneratorSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = spec.n;
  const int p = spec.p;
  const int k = spec.structure_dim;

  LabeledDataSet out;
  out.labels.assign(static_cast<std::size_t>(n), 0);
  Matrix latent(n, p);

  switch (spec.kind) {
    case GeneratorKind::ClusterMixture: {
      std::discrete_distribution<int> pick(spec.cluster_weights.begin(), spec.cluster_weights.end());
      for (int i = 0; i < n; ++i) {
        const int c = pick(rng);
        out.labels[static_cast<std::size_t>(i)] = c;
        for (int j = 0; j < k; ++j)
          latent(i, j) = spec.cluster_centers[static_cast<std::size_t>(c)](j) + spec.cluster_sd * normal(rng);
      }
      break;
    }
    case GeneratorKind::EmbeddedCircle: {
      std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
      out.angles.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const double a = angle(rng);
        out.angles[static_cast<std::size_t>(i)] = a;
        out.labels[static_cast<std::size_t>(i)] = static_cast<int>(a / (2.0 * std::numbers::pi) * 12.0) % 12;
        latent(i, 0) = spec.circle_radius * std::cos(a) + spec.circle_noise * normal(rng);
        latent(i, 1) = spec.circle_radius * std::sin(a) + spec.circle_noise * normal(rng);
      }
      break;
    }
    case GeneratorKind::ParallelHyperplanes: {
      std::uniform_int_distribution<int> plane(0, spec.plane_count - 1);
      const double mid = 0.5 * (spec.plane_count - 1);
      for (int i = 0; i < n; ++i) {
        const int c = plane(rng);
        out.labels[static_cast<std::size_t>(i)] = c;
        latent(i, 0) = spec.plane_spacing * (c - mid) + spec.plane_jitter * normal(rng);
      }
      break;
    }
    case GeneratorKind::PureGaussian:
      break;
  }
  for (int i = 0; i < n; ++i)
    for (int j = k; j < p; ++j) latent(i, j) = normal(rng);

  switch (spec.mixing) {
    case Mixing::None:
      out.mixing = Matrix::Identity(p, p);
      break;
    case Mixing::RandomOrthogonal:
      out.mixing = random_orthogonal(p, rng).matrix();
      break;
    case Mixing::RandomNonsingular: {
      // Q₁ diag(s) Q₂ with log-uniform scales in [e⁻¹, e].
      const Matrix q1 = random_orthogonal(p, rng).matrix();
      const Matrix q2 = random_orthogonal(p, rng).matrix();
      std::uniform_real_distribution<double> log_scale(-1.0, 1.0);
      Vector s(p);
      for (int j = 0; j < p; ++j) s(j) = std::exp(log_scale(rng));
      out.mixing = q1 * s.asDiagonal() * q2;
      break;
    }
  }

  out.planted_basis = Matrix::Identity(p, k);
  out.latent = latent;
  out.data = DataSet(latent * out.mixing.transpose(), Stage::Raw);
  return out;
}

double subspace_score(const Matrix& found, const Matrix& planted) {
  if (found.rows() != planted.rows())
    throw Error(ErrorCode::DimensionMismatch, "subspace bases must live in the same space");
  if (found.cols() == 0 || planted.cols() == 0) return 0.0;
  const Matrix m = orthonormal_basis(found).transpose() * orthonormal_basis(planted);
  const Vector s = m.jacobiSvd().singularValues();
  const double smallest = s(s.size() - 1);
  return std::clamp(smallest * smallest, 0.0, 1.0);
}

double recovery_score(const PipelineResult& result, const LabeledDataSet& truth, int d) {
  if (result.B.rows() != truth.mixing.rows() || d < 1 || d > result.B.cols())
    throw Error(ErrorCode::DimensionMismatch, "result and ground truth dimensions disagree");
  return subspace_score(truth.mixing.transpose() * result.B.leftCols(d), truth.planted_basis);
}

}  // namespace icspp
