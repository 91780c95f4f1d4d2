#include "handover/firmness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "handover/errors.hpp"

namespace handover {

std::vector<double> default_target_forces(double object_weight) {
  return {0.5 * object_weight, 0.5, -0.5};
}

std::vector<double> FirmnessConfig::target_forces() const {
  return targets.empty() ? default_target_forces(object_weight) : targets;
}

void FirmnessConfig::validate() const {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
  if (!(v_max > 0.0) || !std::isfinite(v_max)) {
    throw std::invalid_argument("v_max must be positive");
  }
  if (!(object_weight > 0.0) || !std::isfinite(object_weight)) {
    throw std::invalid_argument("object weight must be positive");
  }
}

InputPartition InputPartition::make(Partition tag, double v_max) {
  if (tag == Partition::kPos) return {tag, 0.0, v_max, 0};
  return {tag, -v_max, 0.0, 1};
}

double chi2_quantile_2dof(double c) {
  if (!(c > 0.0 && c < 1.0)) {
    throw std::invalid_argument("chi2_quantile_2dof: c must lie in (0, 1)");
  }
  return -2.0 * std::log1p(-c);
}

ConfidenceEllipsoid ellipsoid_from(const ContactModel& model, double c) {
  Eigen::LLT<Eigen::Matrix2d> llt(model.cov);
  if (llt.info() != Eigen::Success) {
    throw NumericError("ellipsoid_from: covariance is not SPD");
  }
  const double scale = std::sqrt(chi2_quantile_2dof(c));
  return {model.mean, scale * Eigen::Matrix2d(llt.matrixL())};
}

double robust_lp_margin(const ConfidenceEllipsoid& ell,
                        const InputPartition& part, double f_target,
                        Sense sense) {
  const double nominal = ell.center[part.selector];
  // max over |z| <= 1 of e' P z is the norm of the selected row of P.
  const double spread = ell.shape.row(part.selector).norm();
  double best = sense == Sense::kLess
                    ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
  for (double u : {part.lo, part.hi}) {
    const double a = std::abs(u);
    if (sense == Sense::kLess) {
      best = std::min(best, nominal * u + a * spread);
    } else {
      best = std::max(best, nominal * u - a * spread);
    }
  }
  return sense == Sense::kLess ? best - f_target : f_target - best;
}

bool robust_lp_feasible(const ConfidenceEllipsoid& ell,
                        const InputPartition& part, double f_target,
                        Sense sense) {
  return robust_lp_margin(ell, part, f_target, sense) <= kFeasibilityTolerance;
}

namespace {

TargetVerdict evaluate_target(const ConfidenceEllipsoid& ell, double v_max,
                              double f_target) {
  TargetVerdict v;
  v.target = f_target;
  for (Partition p : {Partition::kNeg, Partition::kPos}) {
    const InputPartition part = InputPartition::make(p, v_max);
    const auto i = static_cast<std::size_t>(p);
    v.less[i] = robust_lp_feasible(ell, part, f_target, Sense::kLess);
    v.greater[i] = robust_lp_feasible(ell, part, f_target, Sense::kGreater);
    v.feasible = v.feasible || (v.less[i] && v.greater[i]);
  }
  return v;
}

}  // namespace

bool target_feasible(const ConfidenceEllipsoid& ell, const FirmnessConfig& cfg,
                     double f_target) {
  return evaluate_target(ell, cfg.v_max, f_target).feasible;
}

FeasibilityVerdict is_firm_grasp(const ContactModel& model,
                                 const FirmnessConfig& cfg) {
  cfg.validate();
  const ConfidenceEllipsoid ell = ellipsoid_from(model, cfg.confidence);
  FeasibilityVerdict out;
  out.firm = true;
  for (double f : cfg.target_forces()) {
    out.targets.push_back(evaluate_target(ell, cfg.v_max, f));
    out.firm = out.firm && out.targets.back().feasible;
  }
  return out;
}

}  // namespace handover
