#include "handover/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace handover {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_touch(const IncidentalTouch& p) {
  if (p.normal != 1 && p.normal != -1) {
    throw std::invalid_argument("touch normal must be +1 or -1");
  }
  if (p.stiffness < 0.0 || p.onset < 0.0 || p.preload < 0.0) {
    throw std::invalid_argument(
        "touch stiffness, onset and preload must be nonnegative");
  }
}

void check_grasp(const FirmGrasp& p) {
  if (p.stiffness < 0.0 || p.damping < 0.0 || p.onset < 0.0) {
    throw std::invalid_argument(
        "grasp stiffness, damping and onset must be nonnegative");
  }
  if (p.support_fraction < 0.0 || !(p.support_ramp > 0.0)) {
    throw std::invalid_argument("grasp support must be nonnegative");
  }
}

}  // namespace

std::string receiver_kind(const ReceiverPolicy& policy) {
  return std::visit(
      Overloaded{[](const NoContact&) { return std::string("NoContact"); },
                 [](const IncidentalTouch&) {
                   return std::string("IncidentalTouch");
                 },
                 [](const FirmGrasp&) { return std::string("FirmGrasp"); },
                 [](const UpwardPull&) { return std::string("UpwardPull"); },
                 [](const LateHesitantGrasp&) {
                   return std::string("LateHesitantGrasp");
                 }},
      policy);
}

void validate(const ReceiverPolicy& policy) {
  std::visit(Overloaded{[](const NoContact&) {},
                        [](const IncidentalTouch& p) { check_touch(p); },
                        [](const FirmGrasp& p) { check_grasp(p); },
                        [](const UpwardPull& p) {
                          if (p.onset < 0.0) {
                            throw std::invalid_argument(
                                "pull onset must be nonnegative");
                          }
                          if (p.grasp) {
                            check_grasp(*p.grasp);
                            if (p.grasp->onset < p.onset) {
                              throw std::invalid_argument(
                                  "grasp must follow the pull");
                            }
                          }
                        },
                        [](const LateHesitantGrasp& p) {
                          check_touch(p.touch);
                          check_grasp(p.grasp);
                          if (p.grasp.onset < p.touch.onset) {
                            throw std::invalid_argument(
                                "grasp must follow the touch");
                          }
                        }},
             policy);
}

std::optional<double> firm_phase_start(const ReceiverPolicy& policy) {
  return std::visit(
      Overloaded{
          [](const NoContact&) -> std::optional<double> { return {}; },
          [](const IncidentalTouch&) -> std::optional<double> { return {}; },
          [](const FirmGrasp& p) -> std::optional<double> { return p.onset; },
          [](const UpwardPull& p) -> std::optional<double> {
            if (p.grasp) return p.grasp->onset;
            return {};
          },
          [](const LateHesitantGrasp& p) -> std::optional<double> {
            return p.grasp.onset;
          }},
      policy);
}

bool in_firm_phase(const ReceiverPolicy& policy, double t) {
  const auto start = firm_phase_start(policy);
  return start && t >= *start;
}

Receiver::Receiver(ReceiverPolicy policy, double object_weight)
    : policy_(std::move(policy)), object_weight_(object_weight) {
  validate(policy_);
}

Eigen::Vector3d Receiver::touch_force(const IncidentalTouch& p,
                                      const ObjectState& object) {
  const double z = object.position.z();
  if (!surface_z_) {
    const double depth = p.stiffness > 0.0 ? p.preload / p.stiffness : 0.0;
    // Surface sits `depth` on the far side of the object along the normal.
    surface_z_ = z + p.normal * depth;
  }
  // Penetration measured along the normal; the hand never pulls.
  const double penetration = p.normal * (*surface_z_ - z);
  return {0.0, 0.0, p.normal * p.stiffness * std::max(0.0, penetration)};
}

Eigen::Vector3d Receiver::grasp_force(const FirmGrasp& p,
                                      const ObjectState& object, double t) {
  const double z = object.position.z();
  if (!anchor_z_) anchor_z_ = z + p.anchor_offset;
  const double ramp = std::clamp((t - p.onset) / p.support_ramp, 0.0, 1.0);
  const double support = p.support_fraction * object_weight_ * ramp;
  const double fz = -p.stiffness * (z - *anchor_z_) -
                    p.damping * object.velocity.z() + support + p.pull;
  return {0.0, 0.0, fz};
}

Eigen::Vector3d Receiver::force(const ObjectState& object, double t) {
  return std::visit(
      Overloaded{
          [&](const NoContact&) -> Eigen::Vector3d {
            return Eigen::Vector3d::Zero();
          },
          [&](const IncidentalTouch& p) -> Eigen::Vector3d {
            if (t < p.onset) return Eigen::Vector3d::Zero();
            return touch_force(p, object);
          },
          [&](const FirmGrasp& p) -> Eigen::Vector3d {
            if (t < p.onset) return Eigen::Vector3d::Zero();
            return grasp_force(p, object, t);
          },
          [&](const UpwardPull& p) -> Eigen::Vector3d {
            if (t < p.onset) return Eigen::Vector3d::Zero();
            if (p.grasp && t >= p.grasp->onset) {
              return grasp_force(*p.grasp, object, t);
            }
            return {0.0, 0.0, p.force};
          },
          [&](const LateHesitantGrasp& p) -> Eigen::Vector3d {
            if (t >= p.grasp.onset) return grasp_force(p.grasp, object, t);
            if (t >= p.touch.onset) return touch_force(p.touch, object);
            return Eigen::Vector3d::Zero();
          }},
      policy_);
}

}  // namespace handover
