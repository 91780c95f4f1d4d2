#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "handover/contact_model.hpp"
#include "handover/info_planner.hpp"

using namespace handover;

TEST(Entropy, IdentityCovariance) {
  EXPECT_NEAR(entropy(Eigen::Matrix2d::Identity()), 2.83788, 1e-5);
}

TEST(Entropy, PriorCovariance) {
  EXPECT_NEAR(entropy(100.0 * Eigen::Matrix2d::Identity()), 7.44305, 1e-5);
}

TEST(Entropy, ScalingByESquaredAddsTwoNats) {
  Eigen::Matrix2d s;
  s << 2.0, 0.3, 0.3, 0.7;
  EXPECT_NEAR(entropy(std::exp(2.0) * s) - entropy(s), 2.0, 1e-12);
}

TEST(Entropy, RejectsIndefinite) {
  Eigen::Matrix2d s;
  s << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(entropy(s), std::invalid_argument);
}

TEST(InformationGain, RankOneUpdateOnPrior) {
  SampleWindow w(PriorAndNoise{});
  const std::vector<double> inputs(50, 0.05);
  const Eigen::Matrix2d next = predict_covariance(w, inputs);
  // Lambda'_00 = 0.01 + 50 * 0.0025 / 0.25.
  EXPECT_NEAR(1.0 / next(0, 0), 0.51, 1e-12);
  EXPECT_NEAR(next(1, 1), 100.0, 1e-10);
  EXPECT_NEAR(information_gain(w.model().cov, next), 0.5 * std::log(51.0),
              1e-12);
}

TEST(InformationGain, ZeroInputsGainNothing) {
  SampleWindow w(PriorAndNoise{});
  const std::vector<double> inputs(50, 0.0);
  EXPECT_NEAR(information_gain(w.model().cov, predict_covariance(w, inputs)),
              0.0, 1e-12);
}

TEST(InformationGain, EvictionCanOnlyLoseInformation) {
  SampleWindow w(PriorAndNoise{}, 20);
  for (int i = 0; i < 20; ++i) w.push({-0.05, 1.0, 0.005 * i});
  const std::vector<double> inputs(10, 0.05);
  const Eigen::Matrix2d keep = predict_covariance(w, inputs, false);
  const Eigen::Matrix2d evict = predict_covariance(w, inputs, true);
  EXPECT_GE(entropy(evict), entropy(keep));
}

TEST(Saturation, ScalesToVmax) {
  const Vec3 u = saturate_velocity({0.3, 0.4, 0.0}, 0.1);
  EXPECT_NEAR(u.x(), 0.06, 1e-15);
  EXPECT_NEAR(u.y(), 0.08, 1e-15);
  EXPECT_EQ(u.z(), 0.0);
  EXPECT_LE(u.norm(), 0.1);
}

TEST(Saturation, LeavesSmallInputAlone) {
  const Vec3 raw{0.01, -0.02, 0.03};
  EXPECT_EQ(saturate_velocity(raw, 0.1), raw);
}

TEST(Saturation, NeverExceedsVmax) {
  for (int i = 1; i < 2000; ++i) {
    const Vec3 raw{0.1 + 1e-3 * i, 0.1 / i, -0.37 * i};
    EXPECT_LE(saturate_velocity(raw, 0.1).norm(), 0.1) << i;
  }
}

TEST(ReferenceFilter, HalfLife) {
  const Vec3 r = reference_filter_step(Vec3::Zero(), Vec3::Ones(),
                                       std::log(2.0), 1.0);
  EXPECT_NEAR(r.x(), 0.5, 1e-15);
  EXPECT_NEAR(r.z(), 0.5, 1e-15);
}

TEST(Rollout, SampleCountMatchesHorizon) {
  const PlannerConfig cfg;
  const std::vector<double> u =
      rollout_predicted_inputs({}, Vec3(0, 0, 0.02), Eigen::Vector2d::Zero(), cfg);
  EXPECT_EQ(u.size(), 50u);
}

TEST(Rollout, UpwardReferenceGivesUpwardInputs) {
  const PlannerConfig cfg;
  const std::vector<double> u =
      rollout_predicted_inputs({}, Vec3(0, 0, 0.02), Eigen::Vector2d::Zero(), cfg);
  EXPECT_GT(u.front(), 0.0);
  for (double x : u) EXPECT_GE(x, 0.0);
  for (double x : u) EXPECT_LE(x, cfg.v_max);
}

TEST(Rollout, ResistingContactSlowsTheGripper) {
  PlannerConfig cfg;
  cfg.force_sign = -1.0;
  const Vec3 target(0, 0, 0.02);
  const GripperState free =
      rollout_terminal_state({}, target, Eigen::Vector2d::Zero(), cfg);
  const GripperState held =
      rollout_terminal_state({}, target, Eigen::Vector2d(40.0, 40.0), cfg);
  EXPECT_GT(free.q.z(), 0.0);
  EXPECT_LT(held.q.z(), free.q.z());
}

// Halving the step should shrink the error roughly 16x for RK4; ask for 8x.
TEST(Rollout, ConvergesUnderStepHalving) {
  PlannerConfig base;
  base.force_sign = -1.0;
  const Vec3 target(0, 0, 0.002);  // stays below the speed cap
  const Eigen::Vector2d m(30.0, 30.0);
  auto terminal = [&](int sub) {
    PlannerConfig c = base;
    c.rollout_substeps = sub;
    return rollout_terminal_state({}, target, m, c).q.z();
  };
  const double ref = terminal(64);
  const double e1 = std::abs(terminal(1) - ref);
  const double e2 = std::abs(terminal(2) - ref);
  const double e4 = std::abs(terminal(4) - ref);
  EXPECT_GT(e1, 0.0);
  EXPECT_LT(e2, e1 / 8.0);
  EXPECT_LT(e4, e2 / 8.0);
}

TEST(Plan, CandidateGridIsSymmetric) {
  SampleWindow w(PriorAndNoise{});
  const PlanResult p = plan({}, w, w.model(), PlannerConfig{});
  ASSERT_EQ(p.candidates.size(), 11u);
  EXPECT_DOUBLE_EQ(p.candidates.front().offset, -0.02);
  EXPECT_DOUBLE_EQ(p.candidates.back().offset, 0.02);
  EXPECT_EQ(p.candidates[5].offset, 0.0);
  for (const auto& c : p.candidates) EXPECT_GE(c.info_gain, 0.0);
}

TEST(Plan, TightPosteriorStaysPut) {
  SampleWindow w(PriorAndNoise{});
  for (int i = 0; i < 200; ++i) w.push({i % 2 ? 0.1 : -0.1, 0.0, 0.005 * i});
  const PlanResult p = plan({}, w, w.model(), PlannerConfig{});
  EXPECT_EQ(p.offset, 0.0);
}

TEST(Plan, UnknownUpSegmentProbesUpward) {
  SampleWindow w(PriorAndNoise{});
  for (int i = 0; i < 200; ++i) w.push({-0.05, 1.0, 0.005 * i});
  const PlanResult p = plan({}, w, w.model(), PlannerConfig{});
  EXPECT_GT(p.offset, 0.0);
}

TEST(Plan, UnknownDownSegmentProbesDownward) {
  SampleWindow w(PriorAndNoise{});
  for (int i = 0; i < 200; ++i) w.push({0.05, 1.0, 0.005 * i});
  const PlanResult p = plan({}, w, w.model(), PlannerConfig{});
  EXPECT_LT(p.offset, 0.0);
}

TEST(Plan, SymmetricTieGoesToNegativeOffset) {
  SampleWindow w(PriorAndNoise{});
  PlannerConfig cfg;
  cfg.c_reg = 0.0;
  const PlanResult p = plan({}, w, w.model(), cfg);
  EXPECT_LT(p.offset, 0.0);
}

TEST(PlannerConfig, RejectsEvenCandidateCount) {
  PlannerConfig cfg;
  cfg.candidates = 10;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
