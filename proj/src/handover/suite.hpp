#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "handover/episode.hpp"

namespace handover {

/// One receiver/object pairing; the suite runs it under every policy.
struct Scenario {
  std::string name;
  ReceiverPolicy receiver;
  double weight = 1.0;  // N
};

struct SuiteConfig {
  std::uint64_t seed = 1;
  int jobs = 0;  // 0: hardware concurrency
  std::vector<double> weights{0.3, 0.8, 2.0, 5.0, 10.0, 15.0};
  std::vector<ReleasePolicy> policies{ReleasePolicy::kActive,
                                      ReleasePolicy::kForceThr,
                                      ReleasePolicy::kWeightThr};
  /// Template for every episode; receiver, weight, policy and seed are
  /// overwritten per episode.
  EpisodeConfig base;
  /// Unset means default_scenarios(weights); an explicit empty list is an
  /// error.
  std::optional<std::vector<Scenario>> scenarios;

  void validate() const;
  std::vector<Scenario> resolved_scenarios() const;
};

/// Nine scripted receivers per weight. Grasp impedance grows with L.
std::vector<Scenario> default_scenarios(const std::vector<double>& weights);

/// Stable per-episode seed.
std::uint64_t derive_seed(std::uint64_t suite_seed, std::uint64_t index);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// 95% Wilson score interval for k successes out of n.
WilsonInterval wilson_interval(int k, int n, double z = 1.959963984540054);

struct PolicyMetrics {
  ReleasePolicy policy = ReleasePolicy::kActive;
  int episodes = 0;
  int success = 0;
  int premature = 0;
  int timeout = 0;
  double success_rate = 0.0;
  WilsonInterval ci;
  double mean_release_time = 0.0;  // over released SUCCESS episodes
};

struct SuiteResult {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<EpisodeResult> episodes;  // scenario-major, policy-minor
  std::vector<PolicyMetrics> metrics;
  double wall_seconds = 0.0;
};

/// Runs every scenario under every policy on a worker pool. Output order is
/// independent of scheduling.
SuiteResult run_suite(const SuiteConfig& cfg);

std::vector<PolicyMetrics> summarize(const std::vector<EpisodeResult>& episodes,
                                     const std::vector<ReleasePolicy>& policies);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace handover
