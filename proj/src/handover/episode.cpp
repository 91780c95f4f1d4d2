#include "handover/episode.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "handover/errors.hpp"
#include "handover/firmness.hpp"
#include "handover/release.hpp"
#include "handover/wrench_observer.hpp"

namespace handover {

std::string to_string(ReleasePolicy p) {
  switch (p) {
    case ReleasePolicy::kActive: return "ACTIVE";
    case ReleasePolicy::kForceThr: return "FORCE_THR";
    case ReleasePolicy::kWeightThr: return "WEIGHT_THR";
  }
  return "?";
}

std::string to_string(MotionMode m) {
  switch (m) {
    case MotionMode::kPolicy: return "policy";
    case MotionMode::kPassiveApproach: return "passive_approach";
  }
  return "?";
}

std::string to_string(EpisodeLabel l) {
  switch (l) {
    case EpisodeLabel::kSuccess: return "SUCCESS";
    case EpisodeLabel::kPrematureRelease: return "PREMATURE_RELEASE";
    case EpisodeLabel::kNoReleaseTimeout: return "NO_RELEASE_TIMEOUT";
  }
  return "?";
}

void Rates::validate() const {
  for (int r : {physics, model, firmness, planner}) {
    if (r <= 0) throw ConfigError("rates must be positive");
    if (physics % r != 0) {
      std::ostringstream msg;
      msg << "rate " << r << " Hz does not divide the physics rate "
          << physics << " Hz";
      throw ConfigError(msg.str());
    }
  }
}

void EpisodeConfig::validate() const {
  rates.validate();
  if (!(timeout > 0.0)) throw ConfigError("timeout must be positive");
  if (!(object.weight > 0.0)) throw ConfigError("object weight must be > 0");
  if (firm_debounce < 1) throw ConfigError("firm_debounce must be >= 1");
  if (!(hand_noise_std >= 0.0) || !(ft_noise_std >= 0.0)) {
    throw ConfigError("noise levels must be nonnegative");
  }
  if (!(weighing_settle >= 0.0) || !(weighing_time > 0.0)) {
    throw ConfigError("weighing durations must be positive");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ConfigError("confidence must lie in (0, 1)");
  }
  if (!(observer_gain > 0.0)) throw ConfigError("observer gain must be > 0");
  if (window_capacity == 0 || recompute_interval == 0) {
    throw ConfigError("window capacity and recompute interval must be > 0");
  }
  if (std::abs(planner.sample_rate - rates.model) > 1e-9) {
    throw ConfigError("planner sample rate must equal the model rate");
  }
  try {
    prior.validate();
    planner.validate();
    handover::validate(receiver);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

EpisodeLabel label_episode(const ReceiverPolicy& receiver, bool released,
                           double time) {
  if (released) {
    return in_firm_phase(receiver, time) ? EpisodeLabel::kSuccess
                                         : EpisodeLabel::kPrematureRelease;
  }
  return in_firm_phase(receiver, time) ? EpisodeLabel::kNoReleaseTimeout
                                       : EpisodeLabel::kSuccess;
}

namespace {

bool at_prior_variance(const ContactModel& model, const PriorAndNoise& prior,
                       int i) {
  return std::abs(model.cov(i, i) - prior.cov(i, i)) <=
         1e-9 * prior.cov(i, i);
}

}  // namespace

EpisodeResult run_episode(const EpisodeConfig& cfg,
                          const EpisodeOptions& options) {
  cfg.validate();

  const PlannerConfig& ctl = cfg.planner;
  const double dt = 1.0 / cfg.rates.physics;
  const int model_every = cfg.rates.physics / cfg.rates.model;
  const int firm_every = cfg.rates.physics / cfg.rates.firmness;
  const int plan_every = cfg.rates.physics / cfg.rates.planner;
  const auto total_ticks =
      static_cast<std::uint64_t>(std::llround(cfg.timeout * cfg.rates.physics));
  const auto settle_ticks = static_cast<std::uint64_t>(
      std::llround(cfg.weighing_settle * cfg.rates.physics));
  const auto weigh_ticks = settle_ticks + static_cast<std::uint64_t>(std::llround(
                                              cfg.weighing_time *
                                              cfg.rates.physics));

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  EpisodeResult result;
  result.name = cfg.name;
  result.policy = cfg.policy;
  result.receiver = receiver_kind(cfg.receiver);
  result.object_weight = cfg.object.weight;
  result.seed = cfg.seed;
  EpisodeStats& stats = result.stats;
  stats.min_info_gain = std::numeric_limits<double>::infinity();

  // The controller compensates the true load; the observer starts with a
  // gripper-only gravity model and learns the object weight while weighing.
  RigidBodyModel body = RigidBodyModel::desk_scale(
      ctl.mass.z(), cfg.rotational_inertia, cfg.gravity);
  Vec6 true_gravity = body.gravity;
  true_gravity(2) += cfg.object.weight;
  MomentumObserver observer(cfg.observer_gain * Mat6::Identity());

  GripperState gs;
  gs.q = cfg.object.initial_position;
  gs.r = gs.q;
  Vec3 r_desired = gs.q;
  observer.reset(body, Vec6::Zero());

  SampleWindow window(cfg.prior, cfg.window_capacity, cfg.recompute_interval);
  Receiver receiver(cfg.receiver, cfg.object.weight);

  FirmnessConfig firmness;
  firmness.confidence = cfg.confidence;
  firmness.v_max = ctl.v_max;

  double weight_sum = 0.0;
  std::uint64_t weight_count = 0;
  bool weighed = false;
  int firm_streak = 0;
  bool last_firm = false;
  bool contact = false;
  Vec3 hold = gs.q;
  Vec3 f = Vec3::Zero();

  if (options.record_trace) result.trace.reserve(total_ticks);

  for (std::uint64_t n = 1; n <= total_ticks; ++n) {
    const double t_prev = static_cast<double>(n - 1) * dt;
    const double t = static_cast<double>(n) * dt;

    // Plant: admittance-controlled gripper carrying the object.
    const Vec3 f_human = receiver.force({gs.q, gs.v}, t_prev);
    const Vec3 u = desired_velocity(gs, ctl);
    const Vec3 f_ctrl = ctl.mass.cwiseProduct(ctl.damping.cwiseProduct(u - gs.v));
    GripperState next = gs;
    next.v = gs.v + dt * (ctl.damping.cwiseProduct(u - gs.v) +
                          f_human.cwiseQuotient(ctl.mass));
    next.q = gs.q + dt * next.v;
    next.r = reference_filter_step(gs.r, r_desired, ctl.filter_rate, dt);
    gs = next;

    if (!gs.v.allFinite() || gs.v.norm() > cfg.divergence_speed) {
      std::ostringstream msg;
      msg << "gripper speed " << gs.v.norm() << " m/s exceeds cap "
          << cfg.divergence_speed << " m/s at t=" << t << " s";
      throw DivergenceError(msg.str());
    }

    // FT plate wrench: controller force plus the compensated load. The hand
    // acts at the grasp center, so it adds no torque.
    Vec6 ft = true_gravity;
    ft.head<3>() += f_ctrl;
    for (int i = 0; i < 6; ++i) ft(i) += cfg.ft_noise_std * unit_normal(rng);
    Vec6 twist = Vec6::Zero();
    twist.head<3>() = gs.v;
    observer.step(ft, twist, body, dt);
    f = extract_interaction_force(observer);

    ++stats.physics_ticks;
    stats.peak_receiver_force = std::max(stats.peak_receiver_force, f_human.norm());
    stats.max_command_speed = std::max(stats.max_command_speed, u.norm());

    EpisodePhase phase = EpisodePhase::kWeighing;
    if (!weighed) {
      if (n > settle_ticks) {
        weight_sum += -f.z();
        ++weight_count;
      }
      if (n >= weigh_ticks) {
        stats.measured_weight = weight_sum / static_cast<double>(weight_count);
        body.gravity(2) += stats.measured_weight;
        observer.reset(body, twist);
        f.setZero();
        weighed = true;
      }
    } else {
      phase = contact ? EpisodePhase::kContact : EpisodePhase::kApproach;
      stats.peak_observed_force = std::max(stats.peak_observed_force, f.norm());
    }

    if (n % model_every == 0) {
      window.push({u.z(), weighed ? f.z() : 0.0, t});
      ++stats.model_updates;
    }

    bool release = false;
    if (weighed && n % firm_every == 0) {
      ++stats.firmness_checks;
      bool fire = false;
      switch (cfg.policy) {
        case ReleasePolicy::kActive: {
          firmness.object_weight = stats.measured_weight > 0.0
                                       ? stats.measured_weight
                                       : cfg.object.weight;
          last_firm = is_firm_grasp(window.model(), firmness).firm;
          fire = last_firm;
          break;
        }
        case ReleasePolicy::kForceThr:
          fire = release_decision_force_thr(f, cfg.force_threshold);
          break;
        case ReleasePolicy::kWeightThr:
          fire = release_decision_weight_thr(f.z(), stats.measured_weight);
          break;
      }
      firm_streak = fire ? firm_streak + 1 : 0;
      release = cfg.release_enabled && firm_streak >= cfg.firm_debounce;
    }

    if (weighed && !release && n % plan_every == 0) {
      ++stats.planner_calls;
      // Contact latches: once touched, the gripper stops chasing the hand
      // estimate even if the measured force later settles below threshold.
      if (!contact && contact_detected(f, cfg.contact_threshold)) {
        contact = true;
        hold = gs.q;
      }
      Vec3 hand = cfg.hand_position;
      for (int i = 0; i < 3; ++i) hand(i) += cfg.hand_noise_std * unit_normal(rng);

      if (cfg.motion == MotionMode::kPassiveApproach || !contact) {
        r_desired = hand;
      } else if (cfg.policy == ReleasePolicy::kActive) {
        if (!stats.probing_onset) stats.probing_onset = t;
        const ContactModel model = window.model();
        const PlanResult plan_result = plan(gs, window, model, ctl);
        for (const auto& c : plan_result.candidates) {
          stats.min_info_gain = std::min(stats.min_info_gain, c.info_gain);
          ++stats.info_gain_evaluations;
        }
        ++stats.probing_plans;
        const bool up_prior = at_prior_variance(model, cfg.prior, 0);
        const bool down_prior = at_prior_variance(model, cfg.prior, 1);
        if (up_prior != down_prior) {
          ++stats.one_sided_plans;
          if (plan_result.offset == 0.0) ++stats.one_sided_zero_offset;
        }
        r_desired = plan_result.reference;
      } else {
        r_desired = hold;
      }
      phase = contact ? EpisodePhase::kContact : EpisodePhase::kApproach;
    }

    if (options.record_trace) {
      const ContactModel model = window.model();
      TraceRow row;
      row.t = t;
      row.q = gs.q;
      row.v = gs.v;
      row.u = u;
      row.f = f;
      row.mean = model.mean;
      row.cov_diag = model.cov.diagonal();
      row.contact = contact;
      row.firm = last_firm;
      row.phase = phase;
      row.receiver_fz = f_human.z();
      result.trace.push_back(row);
    }

    result.end_time = t;
    if (release) {
      result.released = true;
      result.release_time = t;
      break;
    }
  }

  if (stats.info_gain_evaluations == 0) stats.min_info_gain = 0.0;
  result.label = label_episode(cfg.receiver, result.released,
                               result.released ? result.release_time
                                               : result.end_time);
  result.final_samples.assign(window.samples().begin(), window.samples().end());
  result.final_model = window.model();
  return result;
}

}  // namespace handover
