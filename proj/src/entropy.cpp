#include "icspp/entropy.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "icspp/error.hpp"

namespace icspp {

namespace {

double log_kernel_norm(int d, double h) {
  // log of h^{-d} (2π)^{-d/2}
  return -d * std::log(h) - 0.5 * d * std::log(2.0 * std::numbers::pi);
}

void check_points(const Matrix& points) {
  if (points.rows() < 1) throw Error(ErrorCode::TooFewRows, "need at least one point");
  if (points.cols() < 1) throw Error(ErrorCode::DimensionMismatch, "points must have d >= 1 columns");
}

// Pairwise kernel weights exp(−‖yᵢ−yⱼ‖²/(2h²)) for i < j, stored row by row,
// and the row sums Sᵢ including the diagonal term exp(0) = 1.
struct KernelSums {
  std::vector<double> upper;
  Eigen::ArrayXd sums;
};

KernelSums kernel_sums(const Matrix& y, double h, bool keep_pairs) {
  const Eigen::Index n = y.rows();
  const Eigen::Index d = y.cols();
  const double scale = -0.5 / (h * h);
  KernelSums out;
  out.sums = Eigen::ArrayXd::Ones(n);
  if (keep_pairs) out.upper.resize(static_cast<std::size_t>(n * (n - 1) / 2));
  Eigen::ArrayXd buf(n);
  std::size_t offset = 0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const Eigen::Index m = n - i - 1;
    auto sq = buf.head(m);
    sq.setZero();
    for (Eigen::Index k = 0; k < d; ++k)
      sq += (y.col(k).segment(i + 1, m).array() - y(i, k)).square();
    sq = (scale * sq).exp();
    out.sums(i) += sq.sum();
    out.sums.segment(i + 1, m) += sq;
    if (keep_pairs) {
      Eigen::Map<Eigen::ArrayXd>(out.upper.data() + offset, m) = sq;
      offset += static_cast<std::size_t>(m);
    }
  }
  return out;
}

}  // namespace

void EntropyConfig::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw Error(ErrorCode::InvalidArgument, "bandwidth h must be finite and > 0");
}

double kernel_density(const Matrix& points, const Vector& query, const EntropyConfig& cfg) {
  cfg.validate();
  check_points(points);
  const int d = static_cast<int>(points.cols());
  if (query.size() != d) throw Error(ErrorCode::DimensionMismatch, "query dimension does not match points");
  const double h = cfg.bandwidth;
  const Eigen::ArrayXd sq = (points.rowwise() - query.transpose()).rowwise().squaredNorm().array();
  const double norm = std::exp(log_kernel_norm(d, h));
  return norm * (-sq / (2.0 * h * h)).exp().sum() / static_cast<double>(points.rows());
}

double estimate_entropy(const Matrix& points, const EntropyConfig& cfg) {
  cfg.validate();
  check_points(points);
  const int d = static_cast<int>(points.cols());
  const double h = cfg.bandwidth;
  const auto n = static_cast<double>(points.rows());
  // The diagonal term makes every Sᵢ ≥ 1, so log Sᵢ is a log-sum-exp whose
  // largest exponent is already 0 and nothing can underflow to log(0).
  const KernelSums k = kernel_sums(points, h, false);
  return -log_kernel_norm(d, h) + std::log(n) - k.sums.log().mean();
}

double gaussian_reference_entropy(int d, const EntropyConfig& cfg) {
  cfg.validate();
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "d must be >= 1");
  const double s = 1.0 + cfg.bandwidth * cfg.bandwidth;
  return 0.5 * d * (1.0 / s + std::log(s) + std::log(2.0 * std::numbers::pi));
}

Matrix entropy_gradient_C(const Matrix& data, int d, const EntropyConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  if (d < 1 || d >= p)
    throw Error(ErrorCode::DimensionMismatch,
                "need 1 <= d < p, got d=" + std::to_string(d) + ", p=" + std::to_string(p));
  if (n < 2) throw Error(ErrorCode::TooFewRows, "gradient needs n >= 2");
  const double h = cfg.bandwidth;
  const double norm = std::exp(log_kernel_norm(d, h));
  const auto y = data.leftCols(d);
  const auto z = data.rightCols(p - d);

  Matrix c = Matrix::Zero(p - d, d);
  Matrix num(p - d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    num.setZero();
    double den = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Vector dy = (y.row(i) - y.row(j)).transpose();
      const double phi = norm * std::exp(-dy.squaredNorm() / (2.0 * h * h));
      den += phi;
      num.noalias() += phi * (z.row(i) - z.row(j)).transpose() * dy.transpose();
    }
    c += num / den;
  }
  return c / (static_cast<double>(n) * h * h);
}

EntropyIndex::EntropyIndex(EntropyConfig cfg) : cfg_(cfg) { cfg_.validate(); }

double EntropyIndex::value(const Matrix& points) const { return estimate_entropy(points, cfg_); }

namespace {

Matrix entropy_gradients(const Matrix& points, const KernelSums& k, double h) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  const Eigen::ArrayXd inv = k.sums.inverse();
  Matrix g = Matrix::Zero(n, d);
  Eigen::ArrayXd w(n);
  Eigen::ArrayXd wd(n);
  std::size_t offset = 0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const Eigen::Index m = n - i - 1;
    const Eigen::Map<const Eigen::ArrayXd> e(k.upper.data() + offset, m);
    offset += static_cast<std::size_t>(m);
    auto wi = w.head(m);
    auto wdi = wd.head(m);
    wi = e * (inv(i) + inv.segment(i + 1, m));
    for (Eigen::Index c = 0; c < d; ++c) {
      wdi = wi * (points(i, c) - points.col(c).segment(i + 1, m).array());
      g(i, c) += wdi.sum();
      g.col(c).segment(i + 1, m).array() -= wdi;
    }
  }
  return g / (static_cast<double>(n) * h * h);
}

}  // namespace

Matrix EntropyIndex::pointwise_gradients(const Matrix& points) const {
  check_points(points);
  return entropy_gradients(points, kernel_sums(points, cfg_.bandwidth, true), cfg_.bandwidth);
}

PPIndex::Evaluation EntropyIndex::evaluate(const Matrix& points) const {
  check_points(points);
  const double h = cfg_.bandwidth;
  const KernelSums k = kernel_sums(points, h, true);
  const int d = static_cast<int>(points.cols());
  const double value =
      -log_kernel_norm(d, h) + std::log(static_cast<double>(points.rows())) - k.sums.log().mean();
  return {value, entropy_gradients(points, k, h)};
}

Matrix pp_index_gradient_C(const Matrix& data, int d, const PPIndex& index) {
  const Eigen::Index p = data.cols();
  if (d < 1 || d >= p)
    throw Error(ErrorCode::DimensionMismatch,
                "need 1 <= d < p, got d=" + std::to_string(d) + ", p=" + std::to_string(p));
  return gradient_C_from(data, d, index.pointwise_gradients(data.leftCols(d)));
}

Matrix gradient_C_from(const Matrix& data, int d, const Matrix& gamma) {
  const Eigen::Index p = data.cols();
  if (gamma.rows() != data.rows() || gamma.cols() != d)
    throw Error(ErrorCode::DimensionMismatch, "index returned gradients of the wrong shape");
  return data.rightCols(p - d).transpose() * gamma;
}

}  // namespace icspp
