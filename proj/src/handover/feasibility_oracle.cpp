#include "handover/feasibility_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace handover::oracle {

bool brute_force_feasible(const ConfidenceEllipsoid& ell,
                          const InputPartition& part, double f_target,
                          Sense sense, int u_points, int z_points) {
  // Selected weight component at every sampled point of the ellipsoid.
  std::vector<double> weights;
  weights.reserve(static_cast<std::size_t>(z_points));
  for (int k = 0; k < z_points; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / z_points;
    const Eigen::Vector2d z(std::cos(theta), std::sin(theta));
    const Eigen::Vector2d w = ell.center + ell.shape * z;
    weights.push_back(w[part.selector]);
  }
  // The interior of the ellipsoid never beats its boundary for a linear
  // constraint, but include the center so a collapsed P still works.
  weights.push_back(ell.center[part.selector]);

  for (int i = 0; i < u_points; ++i) {
    const double u =
        part.lo + (part.hi - part.lo) * static_cast<double>(i) / (u_points - 1);
    bool holds = true;
    for (double w : weights) {
      const double out = w * u;
      if (sense == Sense::kLess ? out > f_target + kFeasibilityTolerance
                                : out < f_target - kFeasibilityTolerance) {
        holds = false;
        break;
      }
    }
    if (holds) return true;
  }
  return false;
}

}  // namespace handover::oracle
