#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "handover/wrench_observer.hpp"

using namespace handover;

namespace {

// Static body: the sensor carries gravity minus whatever the hand supplies.
Vec6 sensor_for(const RigidBodyModel& body, const Vec6& external) {
  return body.gravity - external;
}

}  // namespace

TEST(MomentumObserver, StaticBodyWithNoExternalForceReadsZero) {
  const RigidBodyModel body = RigidBodyModel::desk_scale();
  MomentumObserver obs;
  obs.reset(body, Vec6::Zero());
  for (int i = 0; i < 100; ++i) {
    obs.step(sensor_for(body, Vec6::Zero()), Vec6::Zero(), body, 1e-3);
  }
  EXPECT_LT(obs.residual().norm(), 1e-12);
}

TEST(MomentumObserver, StepResponseIsFirstOrder) {
  const RigidBodyModel body = RigidBodyModel::desk_scale();
  MomentumObserver obs;
  obs.reset(body, Vec6::Zero());
  Vec6 ext = Vec6::Zero();
  ext(2) = 5.0;
  const double dt = 1e-3;
  // Trapezoid pole (1 - K dt/2) / (1 + K dt/2).
  const double pole = (1.0 - 0.05) / (1.0 + 0.05);
  for (int n = 1; n <= 100; ++n) {
    obs.step(sensor_for(body, ext), Vec6::Zero(), body, dt);
    EXPECT_NEAR(obs.residual()(2), 5.0 * (1.0 - std::pow(pole, n)), 1e-9) << n;
  }
}

TEST(MomentumObserver, ReachesOnePercentInFortySevenTicks) {
  const RigidBodyModel body = RigidBodyModel::desk_scale();
  MomentumObserver obs;
  obs.reset(body, Vec6::Zero());
  Vec6 ext = Vec6::Zero();
  ext(0) = -2.0;
  int ticks = 0;
  while (std::abs(obs.residual()(0) - ext(0)) >= 0.01 * std::abs(ext(0))) {
    obs.step(sensor_for(body, ext), Vec6::Zero(), body, 1e-3);
    ++ticks;
  }
  EXPECT_EQ(ticks, 47);
}

TEST(MomentumObserver, MovingBodyMatchesAppliedForce) {
  // Constant external force accelerates a free body; the sensor reads
  // exactly gravity, so the observer must still recover the force.
  const RigidBodyModel body = RigidBodyModel::desk_scale(1.5);
  MomentumObserver obs;
  obs.reset(body, Vec6::Zero());
  Vec6 ext = Vec6::Zero();
  ext(2) = 3.0;
  Vec6 twist = Vec6::Zero();
  const double dt = 1e-3;
  for (int i = 0; i < 300; ++i) {
    twist(2) += dt * ext(2) / 1.5;
    obs.step(body.gravity, twist, body, dt);
  }
  EXPECT_NEAR(obs.residual()(2), 3.0, 1e-6);
}

TEST(MomentumObserver, SinusoidGainAtTenRadPerSecond) {
  const RigidBodyModel body = RigidBodyModel::desk_scale();
  MomentumObserver obs;
  obs.reset(body, Vec6::Zero());
  const double w = 100.0 * std::sqrt(1.0 / (0.995 * 0.995) - 1.0);
  const double dt = 1e-3;
  double peak = 0.0;
  const int period = static_cast<int>(2.0 * std::numbers::pi / w / dt);
  for (int i = 1; i <= 10 * period; ++i) {
    Vec6 ext = Vec6::Zero();
    ext(1) = std::sin(w * i * dt);
    obs.step(sensor_for(body, ext), Vec6::Zero(), body, dt);
    if (i > 8 * period) peak = std::max(peak, std::abs(obs.residual()(1)));
  }
  EXPECT_NEAR(peak, 0.995, 2e-3);
}

TEST(MomentumObserver, RejectsBadGainAndStep) {
  EXPECT_THROW(MomentumObserver(-Mat6::Identity()), std::invalid_argument);
  MomentumObserver obs;
  const RigidBodyModel body = RigidBodyModel::desk_scale();
  obs.reset(body, Vec6::Zero());
  EXPECT_THROW(obs.step(Vec6::Zero(), Vec6::Zero(), body, 0.0),
               std::invalid_argument);
}

TEST(ExtractInteractionForce, TakesLinearPart) {
  Vec6 r;
  r << 1.0, -2.0, 3.0, 40.0, 50.0, 60.0;
  EXPECT_EQ(extract_interaction_force(r), Eigen::Vector3d(1.0, -2.0, 3.0));
}

TEST(RigidBodyModel, DeskScaleIsValid) {
  const RigidBodyModel b = RigidBodyModel::desk_scale(2.0);
  EXPECT_NO_THROW(b.validate());
  EXPECT_DOUBLE_EQ(b.gravity(2), 2.0 * 9.81);
  RigidBodyModel bad = b;
  bad.inertia(0, 0) = -1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}
