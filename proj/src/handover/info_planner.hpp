#pragma once

#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "handover/contact_model.hpp"

namespace handover {

using Vec3 = Eigen::Vector3d;

/// Translational gripper state plus the low-pass filtered reference.
struct GripperState {
  Vec3 q = Vec3::Zero();  // position, m
  Vec3 v = Vec3::Zero();  // velocity, m/s
  Vec3 r = Vec3::Zero();  // filtered reference, m
};

struct PlannerConfig {
  double horizon = 0.25;                       // s
  double sample_rate = 200.0;                  // Hz, model update rate
  double gain = 10.0;                          // k, 1/s
  double filter_rate = 2.0 * std::numbers::pi * 10.0;  // alpha, 1/s
  Vec3 damping = Vec3::Constant(100.0);        // diag(D), 1/s
  Vec3 mass = Vec3::Constant(1.5);             // diag(M), kg
  double v_max = 0.1;                          // m/s
  double c_reg = 50.0;                         // nats/m
  int candidates = 11;
  double offset_range = 0.02;                  // m, candidates span +-range
  /// Multiplies the model force term m'phi(u) in the gripper dynamics.
  double force_sign = 1.0;
  /// Let predicted samples displace the oldest buffered ones.
  bool simulate_eviction = false;
  /// RK4 substeps per prediction sample.
  int rollout_substeps = 1;

  void validate() const;
  int samples_per_horizon() const;
};

struct CandidateEvaluation {
  Vec3 reference = Vec3::Zero();
  double offset = 0.0;  // vertical, m
  Eigen::Matrix2d predicted_cov = Eigen::Matrix2d::Identity();
  double info_gain = 0.0;  // nats
  double penalty = 0.0;    // nats
  double score = 0.0;
};

struct PlanResult {
  Vec3 reference = Vec3::Zero();
  double offset = 0.0;
  std::size_t chosen = 0;
  std::vector<CandidateEvaluation> candidates;
};

/// Differential entropy of a 2-D Gaussian with covariance S, in nats.
double entropy(const Eigen::Matrix2d& cov);

/// H(cov) - H(cov_next).
double information_gain(const Eigen::Matrix2d& cov,
                        const Eigen::Matrix2d& cov_next);

Vec3 saturate_velocity(const Vec3& u_raw, double v_max);

/// Exact step of r' = alpha (r_d - r) with r_d held constant.
Vec3 reference_filter_step(const Vec3& r, const Vec3& r_desired, double alpha,
                           double dt);

/// Saturated desired velocity k (r - q).
Vec3 desired_velocity(const GripperState& s, const PlannerConfig& cfg);

/// Time derivative of (q, v, r) under the model-predicted contact force.
struct StateDerivative {
  Vec3 dq, dv, dr;
};
StateDerivative augmented_dynamics(const GripperState& s, const Vec3& r_desired,
                                   const Eigen::Vector2d& model_mean,
                                   const PlannerConfig& cfg);

/// One semi-implicit Euler step of the gripper with the contact force taken
/// from the model mean; the reference advances with the exact filter step.
GripperState gripper_step(const GripperState& s, const Vec3& r_desired,
                          const Eigen::Vector2d& model_mean,
                          const PlannerConfig& cfg, double dt);

/// One classical RK4 step of the augmented dynamics.
GripperState rollout_step(const GripperState& s, const Vec3& r_desired,
                          const Eigen::Vector2d& model_mean,
                          const PlannerConfig& cfg, double dt);

/// Vertical desired velocities sampled at the model rate over the horizon,
/// taken after each sample interval (t = dt, 2 dt, ..., T).
std::vector<double> rollout_predicted_inputs(const GripperState& s,
                                             const Vec3& r_desired,
                                             const Eigen::Vector2d& model_mean,
                                             const PlannerConfig& cfg);

/// Terminal state of the same rollout; used for integration checks.
GripperState rollout_terminal_state(const GripperState& s,
                                    const Vec3& r_desired,
                                    const Eigen::Vector2d& model_mean,
                                    const PlannerConfig& cfg);

/// Covariance after adding the predicted inputs to the window's data.
Eigen::Matrix2d predict_covariance(const SampleWindow& window,
                                   std::span<const double> predicted_inputs,
                                   bool simulate_eviction = false);

/// Grid search over vertical reference offsets around q for the best
/// information gain minus the distance penalty. Ties go to the smallest
/// |offset|, then to the negative offset.
PlanResult plan(const GripperState& s, const SampleWindow& window,
                const ContactModel& model, const PlannerConfig& cfg);

}  // namespace handover
