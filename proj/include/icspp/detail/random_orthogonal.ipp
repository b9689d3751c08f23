#pragma once

#include <random>

namespace icspp {

template <class Rng>
OrthogonalMatrix random_orthogonal(Eigen::Index p, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(p, p);
  // Filled column by column so the draw order is fixed.
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < p; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(p, p);
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < p; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return OrthogonalMatrix(std::move(q));
}

}  // namespace icspp
