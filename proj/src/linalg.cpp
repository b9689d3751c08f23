#include "icspp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "icspp/error.hpp"

namespace icspp {

namespace {

// Flip v so that its largest-magnitude entry (lowest index on ties) is positive.
// Returns true if a flip happened.
template <class Col>
bool fix_sign(Col&& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (v(best) < 0.0) {
    v = -v;
    return true;
  }
  return false;
}

bool lexicographically_greater(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) > b(i);
  }
  return false;
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::DimensionMismatch,
                "symmetric matrix must be square, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index p) { return SymMatrix(Matrix::Identity(p, p)); }

SpectralDecomp spectral_decompose(const SymMatrix& m, bool require_positive_definite) {
  const Eigen::Index p = m.size();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix());
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NotPositiveDefinite, "eigendecomposition did not converge");

  // Eigen returns ascending order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  Matrix vecs = solver.eigenvectors();
  Vector vals = solver.eigenvalues();
  for (Eigen::Index j = 0; j < p; ++j) fix_sign(vecs.col(j));

  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (vals(a) != vals(b)) return vals(a) > vals(b);
    return lexicographically_greater(vecs.col(a), vecs.col(b));
  });

  SpectralDecomp out{Matrix(p, p), Vector(p)};
  for (Eigen::Index j = 0; j < p; ++j) {
    out.eigenvectors.col(j) = vecs.col(order[static_cast<std::size_t>(j)]);
    out.eigenvalues(j) = vals(order[static_cast<std::size_t>(j)]);
  }

  if (require_positive_definite) {
    const double top = out.eigenvalues(0);
    const double floor = static_cast<double>(p) * std::numeric_limits<double>::epsilon() *
                         std::max(top, 0.0);
    if (!(top > 0.0) || out.eigenvalues(p - 1) <= floor)
      throw Error(ErrorCode::NotPositiveDefinite,
                  "matrix is not positive definite (smallest eigenvalue " +
                      std::to_string(out.eigenvalues(p - 1)) + ", largest " + std::to_string(top) +
                      ")");
  }
  return out;
}

SymMatrix sym_inverse_sqrt(const SymMatrix& m) {
  const SpectralDecomp s = spectral_decompose(m, true);
  const Vector scale = s.eigenvalues.array().rsqrt();
  return SymMatrix(s.eigenvectors * scale.asDiagonal() * s.eigenvectors.transpose());
}

SymMatrix sym_sqrt(const SymMatrix& m) {
  const SpectralDecomp s = spectral_decompose(m, true);
  const Vector scale = s.eigenvalues.array().sqrt();
  return SymMatrix(s.eigenvectors * scale.asDiagonal() * s.eigenvectors.transpose());
}

SvdFactors thin_svd(const Matrix& c) {
  const Eigen::Index m = std::min(c.rows(), c.cols());
  Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors f{svd.matrixU().leftCols(m), svd.singularValues().head(m), svd.matrixV().leftCols(m)};
  // Sign convention on the right vectors; the left vectors follow so that the
  // product is unchanged.
  for (Eigen::Index j = 0; j < m; ++j) {
    if (fix_sign(f.right.col(j))) f.left.col(j) = -f.left.col(j);
  }
  return f;
}

namespace {

void check_factors(const SvdFactors& f, Eigen::Index d, Eigen::Index p) {
  const Eigen::Index m = std::min(d, p - d);
  if (d < 1 || d >= p || f.left.rows() != p - d || f.right.rows() != d ||
      f.singulars.size() != m || f.left.cols() != m || f.right.cols() != m)
    throw Error(ErrorCode::DimensionMismatch,
                "SVD factors do not match d=" + std::to_string(d) + ", p=" + std::to_string(p));
}

}  // namespace

OrthogonalMatrix structured_exp(const SvdFactors& f, Eigen::Index d, Eigen::Index p) {
  check_factors(f, d, p);
  const Eigen::Index q = p - d;
  const Vector sin_s = f.singulars.array().sin();
  const Vector half = (0.5 * f.singulars.array()).sin();
  // 1 − cos σ = 2 sin²(σ/2) keeps full relative precision for tiny σ.
  const Vector one_minus_cos = 2.0 * half.array().square();

  Matrix e(p, p);
  e.topLeftCorner(d, d) = Matrix::Identity(d, d) -
                          f.right * one_minus_cos.asDiagonal() * f.right.transpose();
  e.topRightCorner(d, q) = -f.right * sin_s.asDiagonal() * f.left.transpose();
  e.bottomLeftCorner(q, d) = f.left * sin_s.asDiagonal() * f.right.transpose();
  e.bottomRightCorner(q, q) = Matrix::Identity(q, q) -
                              f.left * one_minus_cos.asDiagonal() * f.left.transpose();
  return OrthogonalMatrix(std::move(e));
}

Matrix structured_generator(const SvdFactors& f, Eigen::Index d, Eigen::Index p) {
  check_factors(f, d, p);
  const Eigen::Index q = p - d;
  const Matrix c = f.left * f.singulars.asDiagonal() * f.right.transpose();
  Matrix delta = Matrix::Zero(p, p);
  delta.bottomLeftCorner(q, d) = c;
  delta.topRightCorner(d, q) = -c.transpose();
  return delta;
}

SymAntiSplit anti_sym_split(const Matrix& d) {
  if (d.rows() != d.cols())
    throw Error(ErrorCode::DimensionMismatch, "anti_sym_split needs a square matrix");
  return {SymMatrix(d), 0.5 * (d - d.transpose())};
}

}  // namespace icspp
