#include "handover/wrench_observer.hpp"

#include <stdexcept>

namespace handover {

RigidBodyModel RigidBodyModel::desk_scale(double mass,
                                          double rotational_inertia,
                                          double gravity_accel) {
  RigidBodyModel b;
  b.inertia.setZero();
  b.inertia.diagonal() << mass, mass, mass, rotational_inertia,
      rotational_inertia, rotational_inertia;
  b.gravity.setZero();
  b.gravity(2) = mass * gravity_accel;
  return b;
}

void RigidBodyModel::validate() const {
  if (!inertia.allFinite() || !gravity.allFinite() || !coriolis.allFinite()) {
    throw std::invalid_argument("rigid body model must be finite");
  }
  if (!inertia.isApprox(inertia.transpose(), 1e-12)) {
    throw std::invalid_argument("inertia must be symmetric");
  }
  Eigen::LLT<Mat6> llt(inertia);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("inertia must be positive-definite");
  }
}

MomentumObserver::MomentumObserver(Mat6 gain) : gain_(std::move(gain)) {
  Eigen::LLT<Mat6> llt(0.5 * (gain_ + gain_.transpose()));
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("observer gain must be positive-definite");
  }
}

Vec6 MomentumObserver::known_terms(const Vec6& measured_ft, const Vec6& twist,
                                   const RigidBodyModel& body) const {
  return -body.coriolis.transpose() * twist + body.gravity - measured_ft;
}

void MomentumObserver::reset(const RigidBodyModel& body, const Vec6& twist) {
  residual_.setZero();
  integral_ = -(body.inertia * twist);
  last_integrand_.setZero();
  // The first trapezoid uses the integrand at reset time, which needs a
  // measurement; step() fills it in lazily.
  primed_ = false;
}

void MomentumObserver::step(const Vec6& measured_ft, const Vec6& twist,
                            const RigidBodyModel& body, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const Vec6 a = known_terms(measured_ft, twist, body);
  if (!primed_) {
    last_integrand_ = a - residual_;
    primed_ = true;
  }
  const Vec6 momentum = body.inertia * twist;
  // r+ = K (I + dt/2 (h + a+ - r+) + p+), solved for r+.
  const Vec6 rhs = gain_ * (integral_ + 0.5 * dt * (last_integrand_ + a) +
                            momentum);
  const Mat6 lhs = Mat6::Identity() + 0.5 * dt * gain_;
  residual_ = lhs.partialPivLu().solve(rhs);
  integral_ += 0.5 * dt * (last_integrand_ + a - residual_);
  last_integrand_ = a - residual_;
}

Eigen::Vector3d extract_interaction_force(const Vec6& residual) {
  return residual.head<3>();
}

Eigen::Vector3d extract_interaction_force(const MomentumObserver& observer) {
  return extract_interaction_force(observer.residual());
}

}  // namespace handover
