#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "handover/contact_model.hpp"
#include "handover/feasibility_oracle.hpp"
#include "handover/firmness.hpp"
#include "handover/oracle_check.hpp"

using namespace handover;

TEST(Chi2Quantile, NinetyNinePercent) {
  EXPECT_NEAR(chi2_quantile_2dof(0.99), 9.21034, 1e-5);
}

TEST(Chi2Quantile, SmallConfidenceTendsToZero) {
  EXPECT_NEAR(chi2_quantile_2dof(1e-12), 0.0, 1e-11);
}

TEST(Chi2Quantile, OneMinusInverseE) {
  EXPECT_NEAR(chi2_quantile_2dof(1.0 - std::exp(-1.0)), 2.0, 1e-12);
}

TEST(Chi2Quantile, RejectsOutOfRange) {
  EXPECT_THROW(chi2_quantile_2dof(0.0), std::invalid_argument);
  EXPECT_THROW(chi2_quantile_2dof(1.0), std::invalid_argument);
}

TEST(Ellipsoid, IdentityCovariance) {
  const ConfidenceEllipsoid e =
      ellipsoid_from({Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()}, 0.99);
  EXPECT_NEAR(e.shape(0, 0), 3.0348, 1e-4);
  EXPECT_NEAR(e.shape(1, 1), 3.0348, 1e-4);
  EXPECT_NEAR(e.shape(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(e.shape(1, 0), 0.0, 1e-15);
}

TEST(Ellipsoid, DiagonalCovarianceScalesCholesky) {
  Eigen::Matrix2d s = Eigen::Vector2d(4.0, 1.0).asDiagonal();
  const ConfidenceEllipsoid e = ellipsoid_from({Eigen::Vector2d::Zero(), s}, 0.99);
  EXPECT_NEAR(e.shape(0, 0), 6.0697, 1e-4);
  EXPECT_NEAR(e.shape(1, 1), 3.0348, 1e-4);
}

TEST(Ellipsoid, MonteCarloCoverage) {
  Eigen::Matrix2d s;
  s << 2.0, 0.6, 0.6, 0.5;
  const ContactModel m{{1.0, -3.0}, s};
  const ConfidenceEllipsoid e = ellipsoid_from(m, 0.99);
  const Eigen::Matrix2d l = Eigen::LLT<Eigen::Matrix2d>(s).matrixL();
  const Eigen::Matrix2d pinv = e.shape.inverse();
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n(0.0, 1.0);
  const int draws = 1000000;
  int inside = 0;
  for (int i = 0; i < draws; ++i) {
    const Eigen::Vector2d w = m.mean + l * Eigen::Vector2d(n(rng), n(rng));
    if ((pinv * (w - m.mean)).squaredNorm() <= 1.0) ++inside;
  }
  EXPECT_NEAR(static_cast<double>(inside) / draws, 0.99, 0.001);
}

TEST(RobustLp, ZeroInputCoversSignStraddlingTargets) {
  const ConfidenceEllipsoid e{{-5.0, 3.0}, 7.0 * Eigen::Matrix2d::Identity()};
  for (Partition p : {Partition::kNeg, Partition::kPos}) {
    const InputPartition part = InputPartition::make(p, 0.1);
    EXPECT_TRUE(robust_lp_feasible(e, part, 0.3, Sense::kLess));
    EXPECT_TRUE(robust_lp_feasible(e, part, 0.0, Sense::kLess));
    EXPECT_TRUE(robust_lp_feasible(e, part, -0.3, Sense::kGreater));
    EXPECT_TRUE(robust_lp_feasible(e, part, 0.0, Sense::kGreater));
  }
}

TEST(RobustLp, StrongModelReachesTarget) {
  const ConfidenceEllipsoid e{{10.0, 10.0}, 0.1 * Eigen::Matrix2d::Identity()};
  const InputPartition pos = InputPartition::make(Partition::kPos, 0.1);
  EXPECT_TRUE(robust_lp_feasible(e, pos, 0.5, Sense::kGreater));
  // Worst case at u = 0.1 is 10*0.1 - 0.1*0.1 = 0.99.
  EXPECT_NEAR(robust_lp_margin(e, pos, 0.5, Sense::kGreater), 0.5 - 0.99, 1e-12);
  EXPECT_TRUE(oracle::brute_force_feasible(e, pos, 0.5, Sense::kGreater));
}

TEST(RobustLp, WeakModelCannotReachTarget) {
  const ConfidenceEllipsoid e{{0.1, 0.1}, Eigen::Matrix2d::Identity()};
  const InputPartition pos = InputPartition::make(Partition::kPos, 0.1);
  EXPECT_FALSE(robust_lp_feasible(e, pos, 0.5, Sense::kGreater));
  EXPECT_FALSE(oracle::brute_force_feasible(e, pos, 0.5, Sense::kGreater));
}

TEST(RobustLp, CollapsedEllipsoidIsNominalInterval) {
  const ConfidenceEllipsoid e{{-20.0, -30.0}, Eigen::Matrix2d::Zero()};
  const InputPartition pos = InputPartition::make(Partition::kPos, 0.1);
  const InputPartition neg = InputPartition::make(Partition::kNeg, 0.1);
  // Nominal ranges: POS [-2, 0], NEG [0, 3].
  EXPECT_TRUE(robust_lp_feasible(e, pos, -2.0, Sense::kLess));
  EXPECT_FALSE(robust_lp_feasible(e, pos, -2.01, Sense::kLess));
  EXPECT_TRUE(robust_lp_feasible(e, neg, 3.0, Sense::kGreater));
  EXPECT_FALSE(robust_lp_feasible(e, neg, 3.01, Sense::kGreater));
}

TEST(TargetFeasible, ZeroTargetAlwaysFeasible) {
  const ConfidenceEllipsoid e{{0.0, 0.0}, 30.0 * Eigen::Matrix2d::Identity()};
  FirmnessConfig cfg;
  EXPECT_TRUE(target_feasible(e, cfg, 0.0));
}

TEST(TargetFeasible, TightStrongPosteriorCertifiesAllTargets) {
  const ContactModel m{{20.0, 20.0}, 1e-12 * Eigen::Matrix2d::Identity()};
  FirmnessConfig cfg;
  cfg.object_weight = 2.0;
  const ConfidenceEllipsoid e = ellipsoid_from(m, cfg.confidence);
  for (double f : {1.0, 0.5, -0.5}) EXPECT_TRUE(target_feasible(e, cfg, f)) << f;
}

TEST(TargetFeasible, OneSidedPosteriorCannotCertifyUpOnPositiveSide) {
  Eigen::Matrix2d s;
  s << 100.0, 0.0, 0.0, 1e-4;
  const ContactModel m{{0.0, -40.0}, s};
  const ConfidenceEllipsoid e = ellipsoid_from(m, 0.99);
  const InputPartition pos = InputPartition::make(Partition::kPos, 0.1);
  EXPECT_FALSE(robust_lp_feasible(e, pos, 0.5, Sense::kGreater));
  EXPECT_FALSE(oracle::brute_force_feasible(e, pos, 0.5, Sense::kGreater));
}

TEST(IsFirmGrasp, PriorIsNotFirm) {
  FirmnessConfig cfg;
  EXPECT_FALSE(is_firm_grasp({{0.0, 0.0}, 100.0 * Eigen::Matrix2d::Identity()},
                             cfg)
                   .firm);
}

namespace {

ContactModel probed(double up_weight, double down_weight) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.5);
  SampleWindow w(PriorAndNoise{});
  for (int i = 0; i < 200; ++i) {
    const double u = (i / 20) % 2 ? 0.1 : -0.1;
    const double f = (u > 0 ? up_weight * u : down_weight * u) + noise(rng);
    w.push({u, f, 0.005 * i});
  }
  return w.model();
}

}  // namespace

TEST(IsFirmGrasp, BidirectionalResistanceIsFirm) {
  FirmnessConfig cfg;
  cfg.object_weight = 2.0;
  EXPECT_TRUE(is_firm_grasp(probed(-60.0, -60.0), cfg).firm);
}

TEST(IsFirmGrasp, OneDirectionalResistanceIsNotFirm) {
  FirmnessConfig cfg;
  cfg.object_weight = 2.0;
  // Hand below the object: resists downward motion only.
  EXPECT_FALSE(is_firm_grasp(probed(0.0, 60.0), cfg).firm);
  EXPECT_FALSE(is_firm_grasp(probed(0.0, -60.0), cfg).firm);
}

TEST(FeasibilityOracle, AgreesWithClosedFormOnRandomInstances) {
  OracleOptions opts;
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const InstanceOutcome o = evaluate_instance(random_instance(rng), opts);
    if (o.near_boundary) continue;
    ++checked;
    ASSERT_TRUE(o.agree) << outcome_to_json(o).dump();
  }
  EXPECT_GT(checked, 190);
}

TEST(FeasibilityOracle, InjectedFaultIsDetected) {
  OracleOptions opts;
  opts.inject_fault = true;
  std::mt19937_64 rng(17);
  int disagreements = 0;
  for (int i = 0; i < 200; ++i) {
    const InstanceOutcome o = evaluate_instance(random_instance(rng), opts);
    if (!o.near_boundary && !o.agree) ++disagreements;
  }
  EXPECT_GT(disagreements, 0);
}

TEST(OracleCheck, SameSeedSameInstances) {
  std::mt19937_64 a(123), b(123);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(instance_to_json(random_instance(a)).dump(),
              instance_to_json(random_instance(b)).dump());
  }
}

TEST(OracleCheck, SerializedInstanceRoundTrips) {
  std::mt19937_64 rng(8);
  const FeasibilityInstance inst = random_instance(rng);
  const FeasibilityInstance back = instance_from_json(instance_to_json(inst));
  EXPECT_EQ(back.mean, inst.mean);
  EXPECT_EQ(back.cov, inst.cov);
  EXPECT_EQ(back.f_target, inst.f_target);
}
