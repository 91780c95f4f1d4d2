#pragma once

#include <Eigen/Dense>

namespace handover {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Single rigid body: I V' + C V + g = F_FT + F_ext. Wrenches and twists are
/// ordered (linear, angular).
struct RigidBodyModel {
  Mat6 inertia = Mat6::Identity();
  Vec6 gravity = Vec6::Zero();
  Mat6 coriolis = Mat6::Zero();

  /// Block-diagonal inertia, fixed orientation, no Coriolis terms.
  static RigidBodyModel desk_scale(double mass = 1.5,
                                   double rotational_inertia = 0.01,
                                   double gravity_accel = 9.81);

  void validate() const;
};

/// Momentum residual observer. The residual obeys r' = K (F_ext - r) when
/// the body model is exact; the integral is discretized with the implicit
/// trapezoidal rule.
class MomentumObserver {
 public:
  explicit MomentumObserver(Mat6 gain = 100.0 * Mat6::Identity());

  /// Zeroes the residual and starts integrating from the current momentum.
  void reset(const RigidBodyModel& body, const Vec6& twist);

  void step(const Vec6& measured_ft, const Vec6& twist,
            const RigidBodyModel& body, double dt);

  const Vec6& residual() const { return residual_; }
  const Mat6& gain() const { return gain_; }

 private:
  Vec6 known_terms(const Vec6& measured_ft, const Vec6& twist,
                   const RigidBodyModel& body) const;

  Mat6 gain_;
  Vec6 residual_ = Vec6::Zero();
  Vec6 integral_ = Vec6::Zero();
  Vec6 last_integrand_ = Vec6::Zero();
  bool primed_ = false;
};

/// Translational part of the residual: the human-object interaction force.
Eigen::Vector3d extract_interaction_force(const MomentumObserver& observer);
Eigen::Vector3d extract_interaction_force(const Vec6& residual);

}  // namespace handover
