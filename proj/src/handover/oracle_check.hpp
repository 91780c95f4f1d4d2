#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "handover/contact_model.hpp"

namespace handover {

struct FeasibilityInstance {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
  double v_max = 0.1;
  double f_target = 0.5;
  double confidence = 0.99;
};

/// Verdicts of one instance, indexed [partition * 2 + sense] with
/// partition NEG=0, POS=1 and sense LESS=0, GREATER=1.
struct InstanceOutcome {
  FeasibilityInstance instance;
  std::array<double, 4> margins{};
  std::array<bool, 4> closed{};
  std::array<bool, 4> brute{};
  bool closed_feasible = false;
  bool brute_feasible = false;
  /// Some constraint lies within the boundary band; excluded from scoring.
  bool near_boundary = false;
  bool agree = true;
};

struct OracleOptions {
  std::uint64_t seed = 1;
  int instances = 1000;
  double boundary_eps = 1e-6;
  int u_points = 201;
  int z_points = 3600;
  int sequences = 100;
  int sequence_length = 1000;
  std::size_t window_capacity = 200;
  /// Negative control: the closed form ignores the ellipsoid.
  bool inject_fault = false;
};

struct OracleReport {
  OracleOptions options;
  int instances_checked = 0;
  int boundary_skipped = 0;
  int feasible_count = 0;
  std::vector<InstanceOutcome> disagreements;
  double feasibility_seconds = 0.0;

  int window_sequences = 0;
  double window_max_error = 0.0;
  double window_seconds = 0.0;
  double window_tolerance = 1e-8;

  bool feasibility_ok() const { return disagreements.empty(); }
  bool window_ok() const { return window_max_error < window_tolerance; }
  bool passed() const { return feasibility_ok() && window_ok(); }
};

FeasibilityInstance random_instance(std::mt19937_64& rng);

InstanceOutcome evaluate_instance(const FeasibilityInstance& inst,
                                  const OracleOptions& opts);

/// Max element-wise |recursive - batch| over mean and covariance after
/// every push of one random sequence.
double window_sequence_error(std::mt19937_64& rng, int length,
                             std::size_t capacity);

OracleReport run_oracle_check(const OracleOptions& opts);

nlohmann::json instance_to_json(const FeasibilityInstance& inst);
FeasibilityInstance instance_from_json(const nlohmann::json& j);
nlohmann::json outcome_to_json(const InstanceOutcome& o);
nlohmann::json report_to_json(const OracleReport& r);

/// Re-evaluates serialized instances (a list or {"disagreements": [...]}).
std::vector<InstanceOutcome> replay_instances(const nlohmann::json& j,
                                              const OracleOptions& opts);

}  // namespace handover
