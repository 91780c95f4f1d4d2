#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Dense>

namespace handover {

/// No hand ever touches the object.
struct NoContact {};

/// Unilateral spring contact along +z (hand below the object, pushes up) or
/// -z (hand above, pushes down). The contact surface is placed at onset so
/// that the spring starts at `preload` newtons.
struct IncidentalTouch {
  int normal = +1;           // +1 or -1
  double stiffness = 300.0;  // N/m
  double onset = 2.0;        // s
  double preload = 0.0;      // N
};

/// Bilateral spring-damper toward an anchor latched at onset, plus a weight
/// support force ramping to support_fraction * L.
struct FirmGrasp {
  double stiffness = 300.0;        // N/m
  double damping = 20.0;           // N*s/m
  double onset = 2.0;              // s
  double anchor_offset = 0.0;      // m, anchor = object z at onset + offset
  double support_fraction = 1.0;
  double support_ramp = 0.3;       // s
  double pull = 0.0;               // N, extra constant upward pull
};

/// Constant upward force from onset. When grasp_onset is set the pull ends
/// there and a firm grasp takes over.
struct UpwardPull {
  double force = 1.5;  // N
  double onset = 2.0;  // s
  std::optional<FirmGrasp> grasp;  // grasp.onset is the hand-over time
};

/// Incidental touch first, then a firm grasp from grasp.onset.
struct LateHesitantGrasp {
  IncidentalTouch touch;
  FirmGrasp grasp;
};

using ReceiverPolicy = std::variant<NoContact, IncidentalTouch, FirmGrasp,
                                    UpwardPull, LateHesitantGrasp>;

std::string receiver_kind(const ReceiverPolicy& policy);

/// Throws std::invalid_argument on negative stiffness, damping or onset.
void validate(const ReceiverPolicy& policy);

/// Earliest time at which the receiver holds the object firmly, if ever.
std::optional<double> firm_phase_start(const ReceiverPolicy& policy);

bool in_firm_phase(const ReceiverPolicy& policy, double t);

struct ObjectState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
};

/// Evaluates a receiver policy over an episode. Contact geometry (surface
/// height, grasp anchor) is latched from the object state the first time a
/// phase is active, so calls must be made in nondecreasing time.
class Receiver {
 public:
  Receiver(ReceiverPolicy policy, double object_weight);

  /// Force the hand applies to the object, world frame, z up.
  Eigen::Vector3d force(const ObjectState& object, double t);

  const ReceiverPolicy& policy() const { return policy_; }

 private:
  Eigen::Vector3d touch_force(const IncidentalTouch& p,
                              const ObjectState& object);
  Eigen::Vector3d grasp_force(const FirmGrasp& p, const ObjectState& object,
                              double t);

  ReceiverPolicy policy_;
  double object_weight_;
  std::optional<double> surface_z_;
  std::optional<double> anchor_z_;
};

}  // namespace handover
