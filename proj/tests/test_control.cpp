#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tgrasp/control.hpp"

using namespace tgrasp;

TEST(PController, Law) {
  EXPECT_DOUBLE_EQ(p_controller(1.0, 0.25, 0.04, 0.0), 0.03);
  EXPECT_DOUBLE_EQ(p_controller(0.5, 0.5, 2.0, 0.7), 0.7);
  static_assert(p_controller(2.0, 1.0, 3.0, 1.0) == 4.0);
}

TEST(Clamp, BranchExamples) {
  EXPECT_EQ(clamp_target(0.5, 0.1, 0.9, false, 0.3), 0.5);
  EXPECT_EQ(clamp_target(0.05, 0.1, 0.9, false, 0.3), 0.1);
  EXPECT_EQ(clamp_target(1.2, 0.1, 0.9, false, 0.3), 0.9);
  EXPECT_EQ(clamp_target(0.5, 0.1, 0.9, true, 0.3), 0.3);
  EXPECT_EQ(clamp_target(0.05, 0.1, 0.9, true, 0.3), 0.3);
  EXPECT_EQ(clamp_target(1.2, 0.1, 0.9, true, 0.3), 0.3);
  EXPECT_EQ(clamp_target(0.1, 0.1, 0.9, false, 0.3), 0.1);
  EXPECT_EQ(clamp_target(0.9, 0.1, 0.9, false, 0.3), 0.9);
}

TEST(Limits, Validation) {
  EXPECT_THROW(JointLimits::uniform(0.5, 0.5), ConfigError);
  const auto l = JointLimits::uniform(0.1, 0.95);
  EXPECT_TRUE(l.contains({0.1, 0.95, 0.5, 0.5, 0.5, 0.5}));
  EXPECT_FALSE(l.contains({0.09, 0.5, 0.5, 0.5, 0.5, 0.5}));
  EXPECT_EQ(finger_of(0), 0u);
  EXPECT_EQ(finger_of(3), 1u);
  EXPECT_EQ(finger_of(5), 2u);
}

TEST(Gains, Schedule) {
  ControllerParams p;
  EXPECT_NO_THROW(p.validate());
  p.kp_hold = 0.05;
  EXPECT_THROW(p.validate(), ConfigError);
  p.kp_hold = 0.0;
  p.kp_close = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(ClosingStep, DecrementAndPin) {
  auto s = closing_step(0.5, 0.1, 0.1);
  EXPECT_DOUBLE_EQ(s.position, 0.4);
  EXPECT_FALSE(s.at_min);
  s = closing_step(0.15, 0.1, 0.1);
  EXPECT_EQ(s.position, 0.1);
  EXPECT_TRUE(s.at_min);
  s = closing_step(0.1, 0.1, 0.1);
  EXPECT_EQ(s.position, 0.1);
  EXPECT_TRUE(s.at_min);
  EXPECT_THROW(closing_step(0.5, 0.0, 0.1), InputDomainError);
}

TEST(GraspComplete, Predicate) {
  const auto l = JointLimits::uniform(0.1, 0.95);
  const JointVector actual{0.3, 0.3, 0.4, 0.4, 0.5, 0.5};
  EXPECT_TRUE(grasp_complete({0.3, 0.3, 0.1, 0.1, 0.95, 0.95}, l, actual));
  EXPECT_FALSE(grasp_complete({0.3, 0.3, 0.1, 0.1, 0.6, 0.95}, l, actual));
}

TEST(Adaptation, ContactHoldsActualAndFreeFingersClose) {
  const auto l = JointLimits::uniform(0.1, 0.95);
  MinDetector md{false, false, false};
  const JointVector actual{0.6, 0.6, 0.7, 0.7, 0.8, 0.8};
  const JointVector prev{0.5, 0.5, 0.5, 0.5, 0.12, 0.12};
  const auto t = adaptation_tick(ContactVector{{true, false, false}}, md, actual, prev, 0.04, l);
  EXPECT_EQ(t[0], 0.6);
  EXPECT_EQ(t[1], 0.6);
  EXPECT_DOUBLE_EQ(t[2], 0.46);
  EXPECT_EQ(t[4], 0.1);
  EXPECT_EQ(md, (MinDetector{false, false, true}));
  // pinned finger stays at min even with a large step available
  const auto t2 = adaptation_tick(ContactVector{}, md, actual, t, 0.04, l);
  EXPECT_EQ(t2[4], 0.1);
  EXPECT_TRUE(l.contains(t2));
}

TEST(Adaptation, TargetsNeverLeaveLimits) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const auto l = JointLimits::uniform(0.1, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    MinDetector md{false, false, false};
    JointVector prev = l.max;
    for (int tick = 0; tick < 120; ++tick) {
      JointVector actual;
      for (double &a : actual) a = 0.1 + 0.85 * u(rng);
      const ContactVector c{{coin(rng), coin(rng), coin(rng)}};
      prev = adaptation_tick(c, md, actual, prev, coin(rng) ? 0.04 : 0.01, l);
      ASSERT_TRUE(l.contains(prev));
    }
  }
}
