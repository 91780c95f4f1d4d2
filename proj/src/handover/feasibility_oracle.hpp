#pragma once

#include "handover/firmness.hpp"

namespace handover::oracle {

/// Direct evaluation of a robust constraint on a grid: `u_points` inputs
/// spanning the partition and `z_points` directions on the unit circle.
/// Independent of the closed form; used by tests and the oracle-check tool.
bool brute_force_feasible(const ConfidenceEllipsoid& ell,
                          const InputPartition& part, double f_target,
                          Sense sense, int u_points = 201,
                          int z_points = 3600);

}  // namespace handover::oracle
