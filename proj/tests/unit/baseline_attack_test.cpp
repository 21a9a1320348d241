#include "redattack/baseline_attack.hpp"

#include <gtest/gtest.h>

#include "test_oracles.hpp"

namespace redattack {
namespace {

using testing::CountingOracle;
using testing::ThresholdOracle;
using testing::trace_monotone;

// First query index at which the best distance is within `tol`, or 0.
std::size_t first_within(const AttackResult& r, double tol) {
  for (const auto& t : r.trace) {
    if (t.best_l2_sq <= tol) return t.query_index;
  }
  return 0;
}

TEST(BoundaryWalk, OnePixelNeedsMoreQueriesThanRed) {
  const double tol = 0.51 * 0.51;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ThresholdOracle o(0.5);
    BoundaryWalkConfig wc;
    wc.seed = seed;
    const AttackResult walk = run_boundary_attack(ImageTensor::row({0.0}), ImageTensor::row({1.0}), o, wc);
    AttackConfig rc;
    rc.seed = seed;
    rc.num_pixels = 1;
    const AttackResult red = run_attack(ImageTensor::row({0.0}), ImageTensor::row({1.0}), o, rc);
    EXPECT_TRUE(walk.succeeded);
    EXPECT_GE(walk.best_adversarial[0], 0.5);
    EXPECT_LE(walk.metrics.pert_norm, tol);
    const std::size_t walk_q = first_within(walk, tol), red_q = first_within(red, tol);
    ASSERT_GT(walk_q, 0u);
    ASSERT_GT(red_q, 0u);
    EXPECT_GT(walk_q, red_q);
  }
}

TEST(BoundaryWalk, NoContractionNoProgress) {
  ThresholdOracle o(0.5);
  BoundaryWalkConfig wc;
  wc.step_src = 0.0;
  wc.max_queries = 200;
  const auto ref = ImageTensor::row({0.9});
  const AttackResult r = run_boundary_attack(ImageTensor::row({0.0}), ref, o, wc);
  EXPECT_TRUE(trace_monotone(r));
  EXPECT_EQ(r.best_adversarial, ref);
}

TEST(BoundaryWalk, ContractAndDeterminism) {
  RandomSource rng(1);
  std::vector<double> w(32), src(32), ref(32);
  for (auto& v : w) v = rng.normal();
  double ws = 0;
  for (std::size_t i = 0; i < 32; ++i) {
    src[i] = 0.3 + 0.4 * rng.uniform();
    ref[i] = std::clamp(src[i] + 0.3 * w[i], 0.0, 1.0);
    ws += w[i] * src[i];
  }
  LinearOracle inner(w, -ws - 0.5);
  CountingOracle counter(inner);
  BoundaryWalkConfig wc;
  wc.seed = 4;
  wc.max_queries = 500;
  const auto source = ImageTensor::row(src), reference = ImageTensor::row(ref);
  ASSERT_EQ(inner.classify(reference), Label{1});
  const AttackResult a = run_boundary_attack(source, reference, counter, wc);
  EXPECT_TRUE(trace_monotone(a));
  EXPECT_EQ(a.queries_used, counter.calls());
  EXPECT_EQ(a.queries_used, 500u);
  EXPECT_EQ(inner.classify(a.best_adversarial), Label{1});
  EXPECT_LT(a.metrics.pert_norm, l2_sq_dist(source, reference));
  const AttackResult b = run_boundary_attack(source, reference, inner, wc);
  EXPECT_EQ(a.best_adversarial, b.best_adversarial);
  EXPECT_EQ(a.trace.size(), b.trace.size());
}

TEST(BoundaryWalk, Preconditions) {
  ThresholdOracle o(0.5);
  BoundaryWalkConfig wc;
  EXPECT_THROW(run_boundary_attack(ImageTensor::row({0.0}), ImageTensor::row({0.1}), o, wc),
               InvalidReference);
  wc.max_queries = 2;
  const AttackResult r = run_boundary_attack(ImageTensor::row({0.0}), ImageTensor::row({1.0}), o, wc);
  EXPECT_EQ(r.queries_used, 2u);
  wc.step_src = 1.0;
  EXPECT_THROW(wc.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace redattack
