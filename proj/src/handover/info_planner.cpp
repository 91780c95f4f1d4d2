#include "handover/info_planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "handover/errors.hpp"

namespace handover {

void PlannerConfig::validate() const {
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (!positive(horizon) || !positive(sample_rate) || !positive(gain) ||
      !positive(filter_rate) || !positive(v_max) || !(c_reg >= 0.0)) {
    throw std::invalid_argument("planner parameters must be positive");
  }
  if ((damping.array() <= 0.0).any() || (mass.array() <= 0.0).any()) {
    throw std::invalid_argument("planner damping and mass must be positive");
  }
  if (candidates < 1 || candidates % 2 == 0) {
    throw std::invalid_argument(
        "candidate count must be odd so the grid is symmetric about 0");
  }
  if (!(offset_range >= 0.0)) {
    throw std::invalid_argument("offset range must be nonnegative");
  }
  if (rollout_substeps < 1) {
    throw std::invalid_argument("rollout substeps must be >= 1");
  }
}

int PlannerConfig::samples_per_horizon() const {
  return static_cast<int>(std::lround(horizon * sample_rate));
}

double entropy(const Eigen::Matrix2d& cov) {
  Eigen::LLT<Eigen::Matrix2d> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("entropy: covariance is not SPD");
  }
  const Eigen::Matrix2d l = llt.matrixL();
  const double log_det = 2.0 * (std::log(l(0, 0)) + std::log(l(1, 1)));
  constexpr double d = 2.0;
  return 0.5 * d * (1.0 + std::log(2.0 * std::numbers::pi)) + 0.5 * log_det;
}

double information_gain(const Eigen::Matrix2d& cov,
                        const Eigen::Matrix2d& cov_next) {
  return entropy(cov) - entropy(cov_next);
}

Vec3 saturate_velocity(const Vec3& u_raw, double v_max) {
  const double n = u_raw.norm();
  if (n <= v_max) return u_raw;
  // Rounding can leave the scaled norm an ulp above v_max; shrink the scale
  // until it is not.
  double scale = v_max / n;
  Vec3 u = scale * u_raw;
  while (u.norm() > v_max) {
    scale = std::nextafter(scale, 0.0);
    u = scale * u_raw;
  }
  return u;
}

Vec3 reference_filter_step(const Vec3& r, const Vec3& r_desired, double alpha,
                           double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  return r_desired + (r - r_desired) * std::exp(-alpha * dt);
}

Vec3 desired_velocity(const GripperState& s, const PlannerConfig& cfg) {
  return saturate_velocity(cfg.gain * (s.r - s.q), cfg.v_max);
}

namespace {

Vec3 acceleration(const GripperState& s, const Vec3& u,
                  const Eigen::Vector2d& model_mean,
                  const PlannerConfig& cfg) {
  Vec3 a = cfg.damping.cwiseProduct(u - s.v);
  const double force =
      cfg.force_sign * model_mean.dot(relu_features(u.z()).vec());
  a.z() += force / cfg.mass.z();
  return a;
}

}  // namespace

StateDerivative augmented_dynamics(const GripperState& s, const Vec3& r_desired,
                                   const Eigen::Vector2d& model_mean,
                                   const PlannerConfig& cfg) {
  const Vec3 u = desired_velocity(s, cfg);
  return {s.v, acceleration(s, u, model_mean, cfg),
          cfg.filter_rate * (r_desired - s.r)};
}

GripperState gripper_step(const GripperState& s, const Vec3& r_desired,
                          const Eigen::Vector2d& model_mean,
                          const PlannerConfig& cfg, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const Vec3 u = desired_velocity(s, cfg);
  GripperState next = s;
  next.v = s.v + dt * acceleration(s, u, model_mean, cfg);
  next.q = s.q + dt * next.v;
  next.r = reference_filter_step(s.r, r_desired, cfg.filter_rate, dt);
  return next;
}

GripperState rollout_step(const GripperState& s, const Vec3& r_desired,
                          const Eigen::Vector2d& model_mean,
                          const PlannerConfig& cfg, double dt) {
  auto shifted = [](const GripperState& x, const StateDerivative& d,
                    double h) {
    return GripperState{x.q + h * d.dq, x.v + h * d.dv, x.r + h * d.dr};
  };
  const StateDerivative k1 = augmented_dynamics(s, r_desired, model_mean, cfg);
  const StateDerivative k2 = augmented_dynamics(shifted(s, k1, 0.5 * dt),
                                                r_desired, model_mean, cfg);
  const StateDerivative k3 = augmented_dynamics(shifted(s, k2, 0.5 * dt),
                                                r_desired, model_mean, cfg);
  const StateDerivative k4 =
      augmented_dynamics(shifted(s, k3, dt), r_desired, model_mean, cfg);
  const double w = dt / 6.0;
  return {s.q + w * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq),
          s.v + w * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv),
          s.r + w * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr)};
}

namespace {

template <typename OnSample>
GripperState run_rollout(const GripperState& s, const Vec3& r_desired,
                         const Eigen::Vector2d& model_mean,
                         const PlannerConfig& cfg, OnSample&& on_sample) {
  const int n = cfg.samples_per_horizon();
  const double h = 1.0 / (cfg.sample_rate * cfg.rollout_substeps);
  GripperState x = s;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < cfg.rollout_substeps; ++j) {
      x = rollout_step(x, r_desired, model_mean, cfg, h);
    }
    on_sample(x);
  }
  return x;
}

}  // namespace

std::vector<double> rollout_predicted_inputs(const GripperState& s,
                                             const Vec3& r_desired,
                                             const Eigen::Vector2d& model_mean,
                                             const PlannerConfig& cfg) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(cfg.samples_per_horizon()));
  run_rollout(s, r_desired, model_mean, cfg, [&](const GripperState& x) {
    out.push_back(desired_velocity(x, cfg).z());
  });
  return out;
}

GripperState rollout_terminal_state(const GripperState& s,
                                    const Vec3& r_desired,
                                    const Eigen::Vector2d& model_mean,
                                    const PlannerConfig& cfg) {
  return run_rollout(s, r_desired, model_mean, cfg,
                     [](const GripperState&) {});
}

Eigen::Matrix2d predict_covariance(const SampleWindow& window,
                                   std::span<const double> predicted_inputs,
                                   bool simulate_eviction) {
  const double beta = window.prior().noise_variance;
  if (!simulate_eviction) {
    return spd_inverse(
        accumulate_precision(window.precision(), predicted_inputs, beta));
  }
  // Rebuild from the prior over what would remain in the window.
  std::vector<double> inputs = window.inputs();
  inputs.insert(inputs.end(), predicted_inputs.begin(), predicted_inputs.end());
  const std::size_t keep = std::min(inputs.size(), window.capacity());
  const std::span<const double> kept(inputs.data() + inputs.size() - keep,
                                     keep);
  return spd_inverse(accumulate_precision(spd_inverse(window.prior().cov),
                                          kept, beta));
}

PlanResult plan(const GripperState& s, const SampleWindow& window,
                const ContactModel& model, const PlannerConfig& cfg) {
  cfg.validate();
  PlanResult out;
  const int n = cfg.candidates;
  out.candidates.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    CandidateEvaluation c;
    // Integer numerator keeps the grid exactly antisymmetric.
    c.offset = n == 1 ? 0.0
                      : cfg.offset_range * static_cast<double>(2 * i - (n - 1)) /
                            static_cast<double>(n - 1);
    c.reference = s.q + Vec3(0.0, 0.0, c.offset);
    const std::vector<double> inputs =
        rollout_predicted_inputs(s, c.reference, model.mean, cfg);
    c.predicted_cov = predict_covariance(window, inputs, cfg.simulate_eviction);
    c.info_gain = information_gain(model.cov, c.predicted_cov);
    c.penalty = cfg.c_reg * (c.reference - s.q).norm();
    c.score = c.info_gain - c.penalty;
    out.candidates.push_back(c);
  }

  auto better = [](const CandidateEvaluation& a,
                   const CandidateEvaluation& b) {
    const double tol = 1e-12 * std::max(1.0, std::abs(b.score));
    if (a.score > b.score + tol) return true;
    if (a.score < b.score - tol) return false;
    if (std::abs(a.offset) != std::abs(b.offset)) {
      return std::abs(a.offset) < std::abs(b.offset);
    }
    return a.offset < b.offset;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.candidates.size(); ++i) {
    if (better(out.candidates[i], out.candidates[best])) best = i;
  }
  out.chosen = best;
  out.reference = out.candidates[best].reference;
  out.offset = out.candidates[best].offset;
  return out;
}

}  // namespace handover
