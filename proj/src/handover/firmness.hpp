#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "handover/contact_model.hpp"

namespace handover {

/// Absolute slack on the non-strict robust constraints.
inline constexpr double kFeasibilityTolerance = 1e-9;

struct FirmnessConfig {
  double confidence = 0.99;
  double v_max = 0.1;          // m/s
  double object_weight = 1.0;  // L, N
  /// Empty means the default set {0.5 L, 0.5, -0.5}.
  std::vector<double> targets;

  std::vector<double> target_forces() const;
  void validate() const;
};

std::vector<double> default_target_forces(double object_weight);

/// W_c = { center + shape * z : |z| <= 1 }.
struct ConfidenceEllipsoid {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  Eigen::Matrix2d shape = Eigen::Matrix2d::Identity();
};

enum class Partition { kNeg = 0, kPos = 1 };
enum class Sense { kLess, kGreater };

/// One sign-constant half of the input range. On it the model output is
/// w[selector] * u.
struct InputPartition {
  Partition tag = Partition::kPos;
  double lo = 0.0;
  double hi = 0.0;
  int selector = 0;

  static InputPartition make(Partition tag, double v_max);
};

/// Exact 2-dof chi-square quantile, -2 ln(1 - c).
double chi2_quantile_2dof(double c);

/// P = sqrt(chi2(c)) * chol(S), lower-triangular.
ConfidenceEllipsoid ellipsoid_from(const ContactModel& model, double c);

/// Signed distance of the robust constraint from satisfaction at the best
/// input of the partition: LESS -> min_u max_z (w'u) - f, GREATER ->
/// f - max_u min_z (w'u). The LP is feasible iff the margin is <= tolerance.
/// The worst case over the ellipsoid is linear in u on a sign-constant
/// interval, so only the interval endpoints are evaluated.
double robust_lp_margin(const ConfidenceEllipsoid& ell,
                        const InputPartition& part, double f_target,
                        Sense sense);

bool robust_lp_feasible(const ConfidenceEllipsoid& ell,
                        const InputPartition& part, double f_target,
                        Sense sense);

bool target_feasible(const ConfidenceEllipsoid& ell, const FirmnessConfig& cfg,
                     double f_target);

struct TargetVerdict {
  double target = 0.0;
  // Indexed by Partition.
  std::array<bool, 2> less{};
  std::array<bool, 2> greater{};
  bool feasible = false;
};

struct FeasibilityVerdict {
  std::vector<TargetVerdict> targets;
  bool firm = false;
};

FeasibilityVerdict is_firm_grasp(const ContactModel& model,
                                 const FirmnessConfig& cfg);

}  // namespace handover
