#include <cmath>

#include "doctest.h"
#include "icspp/dataset.hpp"
#include "icspp/error.hpp"
#include "icspp/optimizer.hpp"
#include "icspp/pipeline.hpp"
#include "icspp/synthetic.hpp"
#include "support.hpp"

using namespace icspp;
using icspp::test::gaussian;
using icspp::test::max_abs;

namespace {

void check_trace_invariants(const DataSet& input, const LocalPPResult& r, int d, const OptimizerConfig& cfg) {
  double previous = r.initial_H;
  for (const PPIteration& it : r.trace.iterations) {
    CHECK(it.H_before == previous);
    CHECK(it.H_after < it.H_before);
    CHECK(it.grad_norm_sq >= 0.0);
    CHECK(it.accepted_t == std::ldexp(1.0, -it.halvings));
    CHECK(it.accepted_delta == doctest::Approx(it.accepted_t * it.grad_norm_sq).epsilon(1e-14));
    CHECK(armijo_accept(it.H_before, it.H_after, it.accepted_delta));
    previous = it.H_after;
  }
  CHECK(r.final_H == previous);
  if (r.trace.termination == Termination::GradientBelowThreshold) CHECK(r.trace.final_grad_norm_sq < cfg.threshold);
  const Matrix& u = r.total_rotation.matrix();
  CHECK((u.transpose() * u - Matrix::Identity(u.rows(), u.cols())).norm() < 1e-8);
  CHECK(max_abs(input.rows() * u.transpose() - r.rotated_data.rows()) < 1e-8);
  CHECK(r.final_H == doctest::Approx(estimate_entropy(r.rotated_data.rows().leftCols(d), cfg.entropy)).epsilon(1e-12));
}

}  // namespace

TEST_CASE("permute_components") {
  std::mt19937_64 rng(1);
  const DataSet x(gaussian(6, 4, rng), Stage::Ics);
  CHECK(max_abs(permute_components(x, {0, 1}).rows() - x.rows()) == 0.0);
  const DataSet y = permute_components(x, {2, 0});
  const int order[] = {2, 0, 1, 3};
  for (int k = 0; k < 4; ++k) CHECK(max_abs(y.rows().col(k) - x.rows().col(order[k])) == 0.0);
  const Matrix u = permutation_matrix(4, {2, 0});
  CHECK(max_abs(x.rows() * u - y.rows()) == 0.0);
  CHECK(max_abs(y.rows() * u.transpose() - x.rows()) == 0.0);
  CHECK_THROWS_AS(permute_components(x, {1, 1}), Error);
  CHECK_THROWS_AS(permute_components(x, {0, 4}), Error);
  CHECK_THROWS_AS(permute_components(x, {-1, 2}), Error);
  CHECK_THROWS_AS(permute_components(x, {}), Error);
}

TEST_CASE("armijo_accept") {
  CHECK(armijo_accept(1.0, 0.9, 0.3));
  CHECK_FALSE(armijo_accept(1.0, 0.97, 0.3));
  CHECK(armijo_accept(1.0, 1.0, 0.0));
  CHECK(armijo_accept(1.0, 0.5, 0.0));
  CHECK_FALSE(armijo_accept(1.0, 1.0 + 1e-9, 0.0));
}

TEST_CASE("local_pp: zero gradient returns immediately") {
  std::mt19937_64 rng(2);
  Matrix x = gaussian(30, 4, rng);
  x.rightCols(2).setConstant(0.25);
  const DataSet data(x, Stage::Current);
  const LocalPPResult r = local_pp(data, 2, OptimizerConfig{});
  CHECK(r.trace.iterations.empty());
  CHECK(r.trace.termination == Termination::GradientBelowThreshold);
  CHECK(max_abs(r.total_rotation.matrix() - Matrix::Identity(4, 4)) == 0.0);
  CHECK(r.final_H == r.initial_H);
}

TEST_CASE("local_pp: first Armijo step is taken in full when it suffices") {
  std::mt19937_64 rng(3);
  const DataSet data(gaussian(40, 4, rng), Stage::Current);
  OptimizerConfig cfg;
  cfg.max_outer_iters = 1;
  const LocalPPResult r = local_pp(data, 2, cfg);
  REQUIRE(r.trace.iterations.size() == 1);
  const PPIteration& it = r.trace.iterations[0];

  const Matrix c = entropy_gradient_C(data.rows(), 2, cfg.entropy);
  const Matrix u = structured_exp(thin_svd(c), 2, 4).matrix();
  const double H0 = estimate_entropy(data.rows().leftCols(2), cfg.entropy);
  const double H1 = estimate_entropy((data.rows() * u.transpose()).leftCols(2), cfg.entropy);
  const bool full_step_ok = armijo_accept(H0, H1, c.squaredNorm()) && H1 < H0;
  CHECK((it.halvings == 0) == full_step_ok);
  CHECK(it.grad_norm_sq == doctest::Approx(c.squaredNorm()).epsilon(1e-10));
  CHECK(r.trace.termination == Termination::MaxIters);
}

TEST_CASE("local_pp: trace invariants on structured data") {
  const LabeledDataSet truth = generate(three_cluster_spec(4));
  const DataSet pre = prewhiten(center(truth.data));
  const IcsRotation ics = ics_rotate(pre, ScatterConfig{});
  OptimizerConfig cfg;
  cfg.snapshot_iters = {0, 1, 2};
  const DataSet start = permute_components(ics.data, {0, 1});
  const LocalPPResult r = local_pp(start, 2, cfg);
  CHECK(r.final_H < r.initial_H);
  CHECK(r.trace.termination == Termination::GradientBelowThreshold);
  check_trace_invariants(start, r, 2, cfg);
  CHECK(r.snapshots.size() == 3);
  CHECK(max_abs(r.snapshots.at(0) - start.rows().leftCols(2)) == 0.0);
}

TEST_CASE("local_pp: Gaussian data terminates on the gradient threshold") {
  int converged = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const LabeledDataSet g = generate(gaussian_spec(200, 5, seed));
    const DataSet start = prewhiten(center(g.data));
    const LocalPPResult r = local_pp(start, 2, OptimizerConfig{});
    check_trace_invariants(start, r, 2, OptimizerConfig{});
    if (r.trace.termination == Termination::GradientBelowThreshold) ++converged;
  }
  CHECK(converged >= 9);
}

TEST_CASE("local_pp: caps are reported") {
  std::mt19937_64 rng(5);
  const DataSet data(gaussian(50, 5, rng), Stage::Current);
  OptimizerConfig cfg;
  cfg.max_outer_iters = 2;
  const LocalPPResult r = local_pp(data, 2, cfg);
  CHECK(r.trace.iterations.size() <= 2);
  CHECK(r.trace.termination != Termination::GradientBelowThreshold);
  check_trace_invariants(data, r, 2, cfg);

  OptimizerConfig bad;
  bad.threshold = 0.0;
  CHECK_THROWS_AS(local_pp(data, 2, bad), Error);
  bad = OptimizerConfig{};
  bad.max_halvings = 0;
  CHECK_THROWS_AS(local_pp(data, 2, bad), Error);
  CHECK_THROWS_AS(local_pp(data, 5, OptimizerConfig{}), Error);
}
