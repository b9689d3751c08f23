#pragma once

#include <random>

#include "icspp/linalg.hpp"

namespace icspp::test {

inline Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Matrix nonsingular(Eigen::Index p, std::mt19937_64& rng) {
  return gaussian(p, p, rng) + 3.0 * Matrix::Identity(p, p);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Σ_{k≤terms} Aᵏ/k!
inline Matrix power_series_exp(const Matrix& a, int terms = 40) {
  Matrix sum = Matrix::Identity(a.rows(), a.cols());
  Matrix term = sum;
  for (int k = 1; k <= terms; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

// [[0, −Cᵀ], [C, 0]] for a (p−d)×d block C.
inline Matrix generator_from_C(const Matrix& c) {
  const Eigen::Index d = c.cols();
  const Eigen::Index p = d + c.rows();
  Matrix delta = Matrix::Zero(p, p);
  delta.bottomLeftCorner(p - d, d) = c;
  delta.topRightCorner(d, p - d) = -c.transpose();
  return delta;
}

}  // namespace icspp::test

#include <string>
#include <string_view>
#include <vector>

namespace icspp::test {

// Minimal well-formedness check: balanced, properly nested elements, quoted
// attributes, a single root. Enough for the SVG the library emits.
inline bool well_formed_xml(std::string_view s) {
  std::vector<std::string> stack;
  bool saw_root = false;
  std::size_t i = 0;
  while ((i = s.find('<', i)) != std::string_view::npos) {
    const std::size_t end = s.find('>', i);
    if (end == std::string_view::npos) return false;
    std::string_view tag = s.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.starts_with('?') || tag.starts_with('!')) continue;
    if (tag.starts_with('/')) {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    std::size_t quotes = 0;
    for (char c : tag) quotes += c == '"';
    if (quotes % 2) return false;
    const bool self_closing = tag.ends_with('/');
    const std::string name(tag.substr(0, tag.find_first_of(" \t\n/")));
    if (name.empty()) return false;
    if (stack.empty()) {
      if (saw_root) return false;
      saw_root = true;
    }
    if (!self_closing) stack.push_back(name);
  }
  return saw_root && stack.empty();
}

inline std::size_t count_occurrences(std::string_view s, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t i = s.find(needle); i != std::string_view::npos; i = s.find(needle, i + 1)) ++n;
  return n;
}

}  // namespace icspp::test
