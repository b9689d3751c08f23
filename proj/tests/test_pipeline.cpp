#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "icspp/error.hpp"
#include "icspp/pipeline.hpp"
#include "icspp/synthetic.hpp"
#include "support.hpp"

using namespace icspp;
using icspp::test::gaussian;
using icspp::test::max_abs;

TEST_CASE("enumerate_starts") {
  const auto adj = enumerate_starts(4, 2, StartPolicy::IcsAdjacent);
  CHECK(adj == std::vector<StartTuple>{{0, 1}, {0, 3}, {2, 3}});
  CHECK(enumerate_starts(4, 2, StartPolicy::AllPairs).size() == 6);
  const auto pairs = enumerate_starts(8, 2, StartPolicy::AllPairs);
  CHECK(pairs.size() == 28);
  for (const StartTuple& t : pairs) CHECK(t[0] < t[1]);
  CHECK(enumerate_starts(16, 2, StartPolicy::AllPairs).size() == 120);
  CHECK(enumerate_starts(6, 3, StartPolicy::IcsAdjacent) ==
        std::vector<StartTuple>{{0, 1, 2}, {0, 1, 5}, {0, 4, 5}, {3, 4, 5}});
  CHECK(enumerate_starts(5, 1, StartPolicy::IcsAdjacent) == std::vector<StartTuple>{{0}, {4}});
  CHECK(enumerate_starts(5, 3, StartPolicy::BestInitialOnly).size() == 10);
  CHECK(enumerate_starts(5, 2, StartPolicy::Explicit, {{3, 1}}) == std::vector<StartTuple>{{3, 1}});
  CHECK_THROWS_AS(enumerate_starts(5, 3, StartPolicy::AllPairs), Error);
  CHECK_THROWS_AS(enumerate_starts(5, 2, StartPolicy::Explicit, {{3, 3}}), Error);
  CHECK_THROWS_AS(enumerate_starts(5, 2, StartPolicy::Explicit, {{0, 5}}), Error);
  CHECK_THROWS_AS(enumerate_starts(5, 2, StartPolicy::Explicit, {{0}}), Error);
  CHECK_THROWS_AS(enumerate_starts(5, 2, StartPolicy::Explicit, {}), Error);
}

TEST_CASE("recover_B") {
  std::mt19937_64 rng(1);
  const Matrix x = gaussian(80, 5, rng);
  CHECK(max_abs(recover_B(x, x) - Matrix::Identity(5, 5)) < 1e-10);
  const Matrix m = icspp::test::nonsingular(5, rng);
  CHECK(max_abs(recover_B(x, x * m) - m) < 1e-8);
  Matrix perm = Matrix::Zero(5, 5);
  const int order[] = {2, 0, 4, 1, 3};
  for (int k = 0; k < 5; ++k) perm(order[k], k) = 1.0;
  Matrix permuted(80, 5);
  for (int k = 0; k < 5; ++k) permuted.col(k) = x.col(order[k]);
  CHECK(max_abs(recover_B(x, permuted) - perm) < 1e-8);

  Matrix singular = x;
  singular.col(4) = singular.col(0) + singular.col(1);
  CHECK_THROWS_AS(recover_B(singular, x), Error);
  CHECK_THROWS_AS(recover_B(x, x.leftCols(4).transpose()), Error);
}

TEST_CASE("prewhiten") {
  std::mt19937_64 rng(2);
  const Matrix mix = icspp::test::nonsingular(4, rng);
  const DataSet raw(gaussian(200, 4, rng) * mix, Stage::Raw);
  const DataSet c = center(raw);
  SymMatrix w;
  const DataSet pre = prewhiten(c, &w);
  CHECK(pre.stage() == Stage::Pre);
  CHECK(max_abs(sample_covariance(pre.rows()).matrix() - Matrix::Identity(4, 4)) < 1e-8);
  CHECK(max_abs(c.rows() * w.matrix() - pre.rows()) < 1e-12);

  const DataSet scaled = prewhiten(center(DataSet(raw.rows() * 3.0, Stage::Raw)));
  CHECK(max_abs(scaled.rows() - pre.rows()) < 1e-8);
  const DataSet again = prewhiten(pre);
  CHECK(max_abs(again.rows() - pre.rows()) < 1e-8);

  Matrix collinear = c.rows();
  collinear.col(3) = collinear.col(0) - 2.0 * collinear.col(2);
  CHECK_THROWS_AS(prewhiten(DataSet(collinear, Stage::Centered)), Error);
}

TEST_CASE("ics_rotate: rotation, whiteness and invariant coordinates") {
  std::mt19937_64 rng(3);
  const DataSet raw(gaussian(150, 4, rng) * icspp::test::nonsingular(4, rng), Stage::Raw);
  SymMatrix w;
  const DataSet pre = prewhiten(center(raw), &w);
  const IcsRotation ics = ics_rotate(pre, ScatterConfig{});
  const Matrix& u = ics.decomposition.eigenvectors;
  CHECK((u.transpose() * u - Matrix::Identity(4, 4)).norm() < 1e-10);
  CHECK(max_abs(sample_covariance(ics.data.rows()).matrix() - Matrix::Identity(4, 4)) < 1e-8);
  // Coordinate k of observation i is ûₖᵀ B₀⁻¹ xᵢ.
  const Matrix centered = center(raw).rows();
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 4; ++k)
      CHECK(std::abs(u.col(k).dot(w.matrix() * centered.row(i).transpose()) - ics.data.rows()(i, k)) < 1e-8);
}

TEST_CASE("ics_rotate: a heavy-tailed coordinate lands on an extreme eigenvalue") {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    Matrix x = gaussian(300, 5, rng);
    std::student_t_distribution<double> t(2.0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 2) = t(rng);
    const DataSet pre = prewhiten(center(DataSet(x, Stage::Raw)));
    const Matrix ics = ics_rotate(pre, ScatterConfig{}).data.rows();
    auto corr = [&](Eigen::Index k) {
      const Vector a = x.col(2).array() - x.col(2).mean();
      const Vector b = ics.col(k).array() - ics.col(k).mean();
      return std::abs(a.dot(b)) / (a.norm() * b.norm());
    };
    if (std::max(corr(0), corr(4)) > 0.9) ++hits;
  }
  CHECK(hits >= 6);
}

TEST_CASE("run_pipeline: IcsOnly reports initial values without optimizing") {
  const LabeledDataSet truth = generate(three_cluster_spec(2));
  PipelineConfig cfg;
  cfg.mode = PipelineMode::IcsOnly;
  const PipelineResult r = run_pipeline(truth.data, cfg);
  CHECK(r.per_start.size() == 28);
  for (const StartOutcome& s : r.per_start) {
    CHECK_FALSE(s.optimized);
    CHECK(s.iterations == 0);
    CHECK(s.final_H == s.initial_H);
  }
  CHECK(std::is_sorted(r.per_start.begin(), r.per_start.end(),
                       [](const StartOutcome& a, const StartOutcome& b) { return a.initial_H < b.initial_H; }));
  const Matrix centered = truth.data.rows().rowwise() - truth.data.rows().colwise().mean();
  CHECK(max_abs(centered * r.B - r.best.rotated_data.rows()) < 1e-6);
}

TEST_CASE("run_pipeline: bookkeeping, B and determinism") {
  const LabeledDataSet truth = generate(three_cluster_spec(3));
  PipelineConfig cfg;
  cfg.starts = StartPolicy::IcsAdjacent;
  cfg.jobs = 2;
  const PipelineResult r = run_pipeline(truth.data, cfg);
  CHECK(r.per_start.size() == 3);
  for (const StartOutcome& s : r.per_start) {
    CHECK(s.optimized);
    CHECK(r.best.final_H <= s.final_H);
    CHECK(s.iterations == static_cast<int>(s.trace.iterations.size()));
  }
  CHECK(max_abs(r.centered_raw * r.B - r.best.rotated_data.rows()) < 1e-6);
  CHECK(max_abs(r.stagewise.product - r.B) < 1e-6);
  CHECK(r.reference_H == doctest::Approx(gaussian_reference_entropy(2, EntropyConfig{})));

  cfg.jobs = 1;
  const PipelineResult again = run_pipeline(truth.data, cfg);
  REQUIRE(again.per_start.size() == r.per_start.size());
  for (std::size_t k = 0; k < r.per_start.size(); ++k) {
    CHECK(again.per_start[k].final_H == r.per_start[k].final_H);
    CHECK(again.per_start[k].indices == r.per_start[k].indices);
  }
  CHECK(max_abs(again.B - r.B) == 0.0);
}

TEST_CASE("run_pipeline: BestInitialOnly optimizes only the screening winner") {
  const LabeledDataSet truth = generate(three_cluster_spec(5));
  PipelineConfig cfg;
  cfg.starts = StartPolicy::BestInitialOnly;
  const PipelineResult r = run_pipeline(truth.data, cfg);
  CHECK(r.per_start.size() == 28);
  const auto optimized = std::count_if(r.per_start.begin(), r.per_start.end(),
                                       [](const StartOutcome& s) { return s.optimized; });
  CHECK(optimized == 1);
  CHECK(r.per_start.front().optimized);
}

TEST_CASE("run_pipeline: GlobalPP with restarts") {
  const LabeledDataSet truth = generate(three_cluster_spec(6));
  PipelineConfig cfg;
  cfg.mode = PipelineMode::GlobalPP;
  cfg.starts = StartPolicy::Explicit;
  cfg.explicit_starts = {{0, 1}};
  cfg.restarts = 2;
  cfg.seed = 42;
  const PipelineResult r = run_pipeline(truth.data, cfg);
  CHECK(r.per_start.size() == 3);
  CHECK(max_abs(r.centered_raw * r.B - r.best.rotated_data.rows()) < 1e-6);
  CHECK(max_abs(r.stagewise.product - r.B) < 1e-6);
  const Matrix& v = r.stagewise.pre_rotation;
  CHECK((v.transpose() * v - Matrix::Identity(8, 8)).norm() < 1e-10);
}

TEST_CASE("run_pipeline: initial values on Gaussian data sit near the reference") {
  const LabeledDataSet g = generate(gaussian_spec(500, 6, 9));
  PipelineConfig cfg;
  cfg.mode = PipelineMode::IcsOnly;
  const PipelineResult r = run_pipeline(g.data, cfg);
  for (const StartOutcome& s : r.per_start) CHECK(s.initial_H <= r.reference_H + 0.1);
}

TEST_CASE("run_pipeline: input validation") {
  std::mt19937_64 rng(7);
  const DataSet small(gaussian(4, 4, rng), Stage::Raw);
  CHECK_THROWS_AS(run_pipeline(small, PipelineConfig{}), Error);
  const DataSet ok(gaussian(30, 4, rng), Stage::Raw);
  PipelineConfig bad;
  bad.d = 4;
  CHECK_THROWS_AS(run_pipeline(ok, bad), Error);
  bad = PipelineConfig{};
  bad.d = 3;
  bad.starts = StartPolicy::AllPairs;
  CHECK_THROWS_AS(run_pipeline(ok, bad), Error);
}
