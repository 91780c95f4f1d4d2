#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "handover/contact_model.hpp"
#include "handover/info_planner.hpp"
#include "handover/receiver.hpp"

namespace handover {

enum class ReleasePolicy { kActive, kForceThr, kWeightThr };
enum class MotionMode {
  kPolicy,           // approach, then probe (ACTIVE) or hold (baselines)
  kPassiveApproach,  // keep tracking the hand estimate, never probe
};
enum class EpisodeLabel { kSuccess, kPrematureRelease, kNoReleaseTimeout };

std::string to_string(ReleasePolicy p);
std::string to_string(MotionMode m);
std::string to_string(EpisodeLabel l);

struct Rates {
  int physics = 1000;
  int model = 200;
  int firmness = 50;
  int planner = 10;

  void validate() const;
};

struct ObjectSpec {
  std::string name = "object";
  double weight = 2.0;  // L, N
  Eigen::Vector3d initial_position = Eigen::Vector3d::Zero();
};

struct EpisodeConfig {
  std::string name = "episode";
  ReceiverPolicy receiver = FirmGrasp{};
  ObjectSpec object;
  ReleasePolicy policy = ReleasePolicy::kActive;
  MotionMode motion = MotionMode::kPolicy;
  bool release_enabled = true;
  Rates rates;
  double timeout = 20.0;  // s
  std::uint64_t seed = 0;

  Eigen::Vector3d hand_position{0.0, 0.0, -0.05};  // world, m
  double hand_noise_std = 0.005;                   // m, per planner tick
  double ft_noise_std = 0.3;                       // N (N*m), per axis

  int firm_debounce = 1;
  double contact_threshold = 0.5;  // N
  double force_threshold = 1.0;    // N, ForceThr
  double weighing_settle = 0.1;    // s before averaging starts
  double weighing_time = 0.5;      // s of averaged residual
  double divergence_speed = 10.0;  // m/s

  PriorAndNoise prior;
  std::size_t window_capacity = SampleWindow::kDefaultCapacity;
  std::size_t recompute_interval = SampleWindow::kDefaultRecomputeInterval;
  double confidence = 0.99;
  /// Shared by the controller, the plant and the planner's rollouts.
  PlannerConfig planner;

  double observer_gain = 100.0;       // 1/s
  double rotational_inertia = 0.01;   // kg*m^2
  double gravity = 9.81;              // m/s^2

  /// Throws ConfigError.
  void validate() const;
};

enum class EpisodePhase { kWeighing = 0, kApproach = 1, kContact = 2 };

struct TraceRow {
  double t = 0.0;
  Vec3 q, v, u, f;
  Eigen::Vector2d mean, cov_diag;
  bool contact = false;
  bool firm = false;
  EpisodePhase phase = EpisodePhase::kWeighing;
  double receiver_fz = 0.0;
};

struct EpisodeStats {
  double measured_weight = 0.0;
  double peak_receiver_force = 0.0;
  double peak_observed_force = 0.0;
  double max_command_speed = 0.0;
  double min_info_gain = 0.0;  // over every candidate rollout
  int info_gain_evaluations = 0;
  int planner_calls = 0;
  int probing_plans = 0;
  /// Plans made while exactly one segment was still at prior variance, and
  /// how many of those kept the zero offset.
  int one_sided_plans = 0;
  int one_sided_zero_offset = 0;
  std::optional<double> probing_onset;
  std::uint64_t physics_ticks = 0;
  std::uint64_t model_updates = 0;
  std::uint64_t firmness_checks = 0;
};

struct EpisodeResult {
  std::string name;
  ReleasePolicy policy = ReleasePolicy::kActive;
  std::string receiver;
  double object_weight = 0.0;
  std::uint64_t seed = 0;
  bool released = false;
  double release_time = 0.0;
  double end_time = 0.0;
  EpisodeLabel label = EpisodeLabel::kSuccess;
  EpisodeStats stats;
  std::vector<TraceRow> trace;
  /// Window contents and model at the end of the episode.
  std::vector<Sample> final_samples;
  ContactModel final_model;
};

struct EpisodeOptions {
  bool record_trace = false;
};

/// Runs the multi-rate loop: physics + receiver + observer every tick, model
/// update, firmness/release check and reference selection at their rates.
/// Throws ConfigError for invalid configs and DivergenceError if the
/// gripper speed cap is exceeded.
EpisodeResult run_episode(const EpisodeConfig& cfg,
                          const EpisodeOptions& options = {});

/// Label implied by the receiver's scripted phase at the end of an episode.
EpisodeLabel label_episode(const ReceiverPolicy& receiver, bool released,
                           double release_time);

}  // namespace handover
