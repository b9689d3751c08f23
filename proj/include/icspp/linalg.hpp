#pragma once

#include <Eigen/Dense>

namespace icspp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Square symmetric matrix. The input is symmetrized on construction, so
/// entry (i,j) and (j,i) are bitwise equal afterwards.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(Eigen::Index p);

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index size() const noexcept { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

/// Matrix with orthonormal columns (QᵀQ = I). Not re-checked on construction;
/// producers in this library guarantee the property.
class OrthogonalMatrix {
 public:
  OrthogonalMatrix() = default;
  explicit OrthogonalMatrix(Matrix q) : q_(std::move(q)) {}

  static OrthogonalMatrix identity(Eigen::Index p) {
    return OrthogonalMatrix(Matrix::Identity(p, p));
  }

  const Matrix& matrix() const noexcept { return q_; }
  Eigen::Index size() const noexcept { return q_.rows(); }

  OrthogonalMatrix transpose() const { return OrthogonalMatrix(q_.transpose()); }
  OrthogonalMatrix operator*(const OrthogonalMatrix& other) const {
    return OrthogonalMatrix(q_ * other.q_);
  }

 private:
  Matrix q_;
};

/// M = eigenvectors · diag(eigenvalues) · eigenvectorsᵀ with eigenvalues in
/// descending order.
struct SpectralDecomp {
  Matrix eigenvectors;
  Vector eigenvalues;
};

/// Thin SVD C = left · diag(singulars) · rightᵀ of a (p−d)×d block,
/// m = min(d, p−d) triples, singulars descending.
struct SvdFactors {
  Matrix left;   // W, (p−d)×m
  Vector singulars;
  Matrix right;  // V, d×m
};

/// Symmetric eigendecomposition with the sign convention "largest-magnitude
/// component of each eigenvector is positive, ties to the lowest index".
/// Exactly tied eigenvalues are ordered by descending lexicographic order of
/// their sign-fixed eigenvectors. With `require_positive_definite`, throws
/// NotPositiveDefinite when the smallest eigenvalue is at or below
/// p · ε · max eigenvalue.
SpectralDecomp spectral_decompose(const SymMatrix& m, bool require_positive_definite = false);

/// Symmetric inverse square root U diag(λ^{-1/2}) Uᵀ of a positive definite matrix.
SymMatrix sym_inverse_sqrt(const SymMatrix& m);

/// Symmetric square root U diag(λ^{1/2}) Uᵀ of a positive definite matrix.
SymMatrix sym_sqrt(const SymMatrix& m);

SvdFactors thin_svd(const Matrix& c);

/// Closed-form exp(Δ̂) for Δ̂ = [[0, −V diag(σ) Wᵀ], [W diag(σ) Vᵀ, 0]]:
///
///   [ I − V diag(2 sin²(σ/2)) Vᵀ      −V diag(sin σ) Wᵀ           ]
///   [ W diag(sin σ) Vᵀ                I − W diag(2 sin²(σ/2)) Wᵀ  ]
///
/// Any step length is absorbed into the singular values.
OrthogonalMatrix structured_exp(const SvdFactors& f, Eigen::Index d, Eigen::Index p);

/// The antisymmetric generator Δ̂ that structured_exp exponentiates.
Matrix structured_generator(const SvdFactors& f, Eigen::Index d, Eigen::Index p);

struct SymAntiSplit {
  SymMatrix sym;
  Matrix anti;
};

SymAntiSplit anti_sym_split(const Matrix& d);

inline double frobenius_inner(const Matrix& a, const Matrix& b) {
  return (a.array() * b.array()).sum();
}

/// Haar-distributed orthogonal matrix from the QR factorization of a Gaussian
/// matrix, with R's diagonal made positive.
template <class Rng>
OrthogonalMatrix random_orthogonal(Eigen::Index p, Rng& rng);

}  // namespace icspp

#include "icspp/detail/random_orthogonal.ipp"
