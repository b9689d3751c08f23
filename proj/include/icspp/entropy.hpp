#pragma once

#include <memory>

#include "icspp/linalg.hpp"

namespace icspp {

/// Gaussian-kernel bandwidth. Values between 0.3 and 0.5 suit cluster
/// structure on whitened data; finer structure needs smaller h.
struct EntropyConfig {
  double bandwidth = 0.5;

  void validate() const;
};

/// ĝ_h(query) = n⁻¹ Σⱼ φ_h(query − yⱼ) with φ_h the N(0, h²I) density.
/// `points` is n×d, one point per row.
double kernel_density(const Matrix& points, const Vector& query, const EntropyConfig& cfg);

/// Ĥ = −n⁻¹ Σᵢ log ĝ_h(yᵢ), the inner sum including j = i.
double estimate_entropy(const Matrix& points, const EntropyConfig& cfg);

/// Value Ĥ converges to for N(0, I_d) data:
/// (d/2)((1+h²)⁻¹ + log(1+h²) + log 2π).
double gaussian_reference_entropy(int d, const EntropyConfig& cfg);

/// Gradient block Ĉ ∈ R^{(p−d)×d} of Ĥ under the rotation exp(Δ)ᵀ, with the
/// rows of `data` split as (yᵢ, zᵢ) at column d:
///
///   Ĉ = n⁻¹h⁻² Σᵢ [Σⱼ φ_h(yᵢ−yⱼ)(zᵢ−zⱼ)(yᵢ−yⱼ)ᵀ] / [Σⱼ φ_h(yᵢ−yⱼ)]
///
/// This is the literal double sum; the optimizer goes through
/// pp_index_gradient_C instead.
Matrix entropy_gradient_C(const Matrix& data, int d, const EntropyConfig& cfg);

/// A smooth projection-pursuit index on n points in R^d that is invariant
/// under orthogonal maps of R^d.
class PPIndex {
 public:
  struct Evaluation {
    double value = 0.0;
    Matrix gradients;
  };

  virtual ~PPIndex() = default;

  virtual double value(const Matrix& points) const = 0;

  /// Row i holds γᵢ, the gradient of the index with respect to point i.
  virtual Matrix pointwise_gradients(const Matrix& points) const = 0;

  /// Both at once; implementations may share work between the two.
  virtual Evaluation evaluate(const Matrix& points) const {
    return {value(points), pointwise_gradients(points)};
  }
};

/// Ĥ as a PPIndex. γᵢ = n⁻¹h⁻² Σⱼ φᵢⱼ(yᵢ−yⱼ)(1/Sᵢ + 1/Sⱼ) with
/// Sᵢ = Σⱼ φᵢⱼ.
class EntropyIndex final : public PPIndex {
 public:
  explicit EntropyIndex(EntropyConfig cfg);

  double value(const Matrix& points) const override;
  Matrix pointwise_gradients(const Matrix& points) const override;
  Evaluation evaluate(const Matrix& points) const override;

  const EntropyConfig& config() const noexcept { return cfg_; }

 private:
  EntropyConfig cfg_;
};

/// Ĉ = Σᵢ zᵢγᵢᵀ for any orthogonally invariant index.
Matrix pp_index_gradient_C(const Matrix& data, int d, const PPIndex& index);
/// Same, from precomputed γᵢ of the first d columns of `data`.
Matrix gradient_C_from(const Matrix& data, int d, const Matrix& gamma);

}  // namespace icspp
