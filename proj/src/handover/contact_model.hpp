#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace handover {

/// One (desired vertical velocity, vertical interaction force) pair.
struct Sample {
  double u = 0.0;  // m/s
  double f = 0.0;  // N
  double t = 0.0;  // s
};

/// ReLU features of the vertical desired velocity: [ReLU(u), -ReLU(-u)].
/// At most one component is nonzero, so each weight acts as the impedance of
/// one motion direction.
struct FeatureVector {
  double up = 0.0;    // >= 0, active for upward motion
  double down = 0.0;  // <= 0, active for downward motion

  Eigen::Vector2d vec() const { return {up, down}; }
};

/// Gaussian posterior over the two segment weights (N*s/m).
struct ContactModel {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
};

struct PriorAndNoise {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = 100.0 * Eigen::Matrix2d::Identity();
  double noise_variance = 0.25;  // N^2

  /// Throws std::invalid_argument unless cov is SPD and noise_variance > 0.
  void validate() const;
};

struct PredictiveDistribution {
  double mean = 0.0;      // N
  double variance = 0.0;  // N^2
};

FeatureVector relu_features(double u);

/// Closed-form posterior over `data`; returns the prior exactly when empty.
ContactModel batch_posterior(const PriorAndNoise& prior,
                             std::span<const Sample> data);

/// Predictive distribution of the force for input `u`. The observation noise
/// is not added to the variance.
PredictiveDistribution predict(const ContactModel& model, double u);

/// Sliding window of the most recent samples with the posterior cached in
/// information form (precision, information vector). Pushing into a full
/// window downdates the evicted sample before the rank-one update.
class SampleWindow {
 public:
  static constexpr std::size_t kDefaultCapacity = 200;
  static constexpr std::size_t kDefaultRecomputeInterval = 1000;

  explicit SampleWindow(PriorAndNoise prior = {},
                        std::size_t capacity = kDefaultCapacity,
                        std::size_t recompute_interval =
                            kDefaultRecomputeInterval);

  void push(const Sample& s);
  void clear();

  /// Rebuilds the cached precision and information vector from the buffer.
  void recompute();

  ContactModel model() const;

  const Eigen::Matrix2d& precision() const { return precision_; }
  const Eigen::Vector2d& information() const { return information_; }
  const PriorAndNoise& prior() const { return prior_; }

  std::size_t size() const { return buffer_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return buffer_.size() == capacity_; }
  std::uint64_t update_count() const { return updates_; }
  std::uint64_t recompute_count() const { return recomputes_; }
  const std::deque<Sample>& samples() const { return buffer_; }

  /// Inputs currently buffered, oldest first.
  std::vector<double> inputs() const;

 private:
  void accumulate(const Sample& s, double sign);

  PriorAndNoise prior_;
  Eigen::Matrix2d prior_precision_;
  Eigen::Vector2d prior_information_;
  std::size_t capacity_;
  std::size_t recompute_interval_;
  std::deque<Sample> buffer_;
  Eigen::Matrix2d precision_;
  Eigen::Vector2d information_;
  std::uint64_t updates_ = 0;
  std::uint64_t recomputes_ = 0;
};

/// Adds beta^-1 * phi(u) phi(u)^T for every input to `precision`.
Eigen::Matrix2d accumulate_precision(const Eigen::Matrix2d& precision,
                                     std::span<const double> inputs,
                                     double noise_variance);

/// Symmetrized inverse of an SPD 2x2 matrix; throws NumericError otherwise.
Eigen::Matrix2d spd_inverse(const Eigen::Matrix2d& a);

bool is_spd(const Eigen::Matrix2d& a);

}  // namespace handover
