#pragma once

#include <algorithm>

#include <Eigen/Dense>

namespace handover {

/// ForceThr baseline: release once the interaction force norm exceeds 1 N.
inline bool release_decision_force_thr(const Eigen::Vector3d& f,
                                       double threshold = 1.0) {
  return f.norm() > threshold;
}

/// WeightThr baseline: release once f_z >= max(0.8 L, 0.5).
inline bool release_decision_weight_thr(double f_z, double object_weight) {
  return f_z >= std::max(0.8 * object_weight, 0.5);
}

/// Contact gate for approach vs. probing, inclusive at the threshold.
inline bool contact_detected(const Eigen::Vector3d& f,
                             double threshold = 0.5) {
  return f.norm() >= threshold;
}

}  // namespace handover
