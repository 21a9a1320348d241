#include "redattack/efficient_update.hpp"

#include <gtest/gtest.h>

#include "test_oracles.hpp"

namespace redattack {
namespace {

using testing::CountingOracle;
using testing::ThresholdOracle;

GradientProbe make_probe(std::vector<double> direction, int sign) {
  GradientProbe p;
  p.direction = ImageTensor::row(std::move(direction));
  p.sign = sign;
  return p;
}

const auto kSource = ImageTensor::row({0.0, 0.0});
const auto kPred = AdversarialPredicate::untargeted(Label{0});

TEST(EfficientUpdate, LargeJumpClipsAndIsAccepted) {
  ThresholdOracle inner(0.5, 0);
  CountingOracle o(inner);
  const BoundarySample current{ImageTensor::row({0.5, 0.5}), Label{1}};
  const UpdateStep s =
      efficient_update(current, make_probe({0, 0.1}, -1), kSource, kPred, UpdateOptions{8.0, 10}, o);
  EXPECT_TRUE(s.accepted);
  EXPECT_EQ(s.image, ImageTensor::row({0.5, 0.0}));
  EXPECT_EQ(s.label, Label{1});
  EXPECT_EQ(s.lambdas, std::vector<double>{8.0});
  EXPECT_EQ(s.queries_spent, 1u);
  EXPECT_EQ(o.calls(), 1u);
}

TEST(EfficientUpdate, HalvesUntilAdversarial) {
  LinearOracle inner({1.0, 1.0}, -0.85);
  CountingOracle o(inner);
  const BoundarySample current{ImageTensor::row({0.5, 0.5}), Label{1}};
  const UpdateStep s = efficient_update(current, make_probe({-0.1, -0.1}, 1), kSource, kPred,
                                        UpdateOptions{4.0, 10}, o);
  EXPECT_TRUE(s.accepted);
  EXPECT_EQ(s.lambdas, (std::vector<double>{4.0, 2.0, 1.0, 0.5}));
  EXPECT_DOUBLE_EQ(s.image[0], 0.45);
  EXPECT_EQ(s.queries_spent, 4u);
  EXPECT_EQ(o.calls(), 4u);
}

TEST(EfficientUpdate, GoldenLambdaSequenceOnRevert) {
  ThresholdOracle inner(0.5, 0);
  CountingOracle o(inner);
  const BoundarySample current{ImageTensor::row({0.5, 0.5}), Label{1}};
  // Every trial lowers x0 below the threshold: each is queried and rejected.
  const UpdateStep s = efficient_update(current, make_probe({-0.1, 0.0}, 1), kSource, kPred,
                                        UpdateOptions{1.0, 10}, o);
  EXPECT_FALSE(s.accepted);
  EXPECT_EQ(s.image, current.image);
  EXPECT_EQ(s.label, current.label);
  ASSERT_EQ(s.lambdas.size(), 11u);
  double expected = 1.0;
  for (double l : s.lambdas) {
    EXPECT_EQ(l, expected);
    expected /= 2;
  }
  EXPECT_EQ(s.queries_spent, 11u);
  EXPECT_EQ(o.calls(), 11u);
}

TEST(EfficientUpdate, DistanceIncreasingDirectionReverts) {
  ThresholdOracle inner(0.5, 0);
  CountingOracle o(inner);
  const BoundarySample current{ImageTensor::row({0.5, 0.5}), Label{1}};
  const UpdateStep s =
      efficient_update(current, make_probe({0, 0.1}, 1), kSource, kPred, UpdateOptions{1.0, 10}, o);
  EXPECT_FALSE(s.accepted);
  EXPECT_EQ(s.image, current.image);
  EXPECT_EQ(s.lambdas.size(), 11u);
  // Trials that cannot be accepted are not worth a query.
  EXPECT_EQ(o.calls(), 0u);
}

TEST(EfficientUpdate, ZeroDirectionReverts) {
  ThresholdOracle o(0.5, 0);
  const BoundarySample current{ImageTensor::row({0.5, 0.5}), Label{1}};
  const UpdateStep s =
      efficient_update(current, make_probe({0, 0}, 1), kSource, kPred, UpdateOptions{2.0, 3}, o);
  EXPECT_FALSE(s.accepted);
  EXPECT_EQ(s.image, current.image);
  EXPECT_EQ(s.lambdas, (std::vector<double>{2.0, 1.0, 0.5, 0.25}));
}

TEST(EfficientUpdate, UnitStepReusesProbePoint) {
  ThresholdOracle inner(0.5, 0);
  CountingOracle o(inner);
  const BoundarySample current{ImageTensor::row({0.5, 0.5}), Label{1}};
  GradientProbe p = make_probe({0, -0.1}, 1);
  p.perturbed_boundary = BoundarySample{ImageTensor::row({0.5, 0.4}), Label{1}};
  const UpdateStep s = efficient_update(current, p, kSource, kPred, UpdateOptions{1.0, 10}, o);
  EXPECT_TRUE(s.accepted);
  EXPECT_TRUE(s.on_boundary);
  EXPECT_EQ(s.image, p.perturbed_boundary.image);
  EXPECT_EQ(s.queries_spent, 0u);
  EXPECT_EQ(o.calls(), 0u);
}

TEST(EfficientUpdate, NeverIncreasesDistance) {
  RandomSource rng(9);
  LinearOracle o({1.0, 0.5, -0.25, 1.0}, -1.0);
  const auto source = ImageTensor::row({0.1, 0.1, 0.6, 0.1});
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(4), d(4);
    for (auto& v : x) v = rng.uniform();
    for (auto& v : d) v = 0.2 * (rng.uniform() - 0.5);
    const auto image = ImageTensor::row(x);
    const Label label = o.classify(image);
    if (label != Label{1}) continue;
    const BoundarySample current{image, label};
    const UpdateStep s = efficient_update(current, make_probe(d, rng.uniform() < 0.5 ? -1 : 1), source,
                                          kPred, UpdateOptions{2.0, 6}, o);
    EXPECT_LE(l2_sq_dist(s.image, source), l2_sq_dist(image, source));
    EXPECT_EQ(o.classify(s.image), Label{1});
    EXPECT_LE(s.lambdas.size(), 7u);
  }
}

}  // namespace
}  // namespace redattack
