#include "handover/contact_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "handover/errors.hpp"

namespace handover {

bool is_spd(const Eigen::Matrix2d& a) {
  if (!a.allFinite()) return false;
  if (std::abs(a(0, 1) - a(1, 0)) >
      1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    return false;
  }
  Eigen::LLT<Eigen::Matrix2d> llt(a);
  return llt.info() == Eigen::Success;
}

Eigen::Matrix2d spd_inverse(const Eigen::Matrix2d& a) {
  Eigen::LLT<Eigen::Matrix2d> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericError("matrix is not symmetric positive-definite");
  }
  Eigen::Matrix2d inv = llt.solve(Eigen::Matrix2d::Identity());
  return 0.5 * (inv + inv.transpose());
}

void PriorAndNoise::validate() const {
  if (!mean.allFinite()) {
    throw std::invalid_argument("prior mean must be finite");
  }
  if (!is_spd(cov)) {
    throw std::invalid_argument("prior covariance must be SPD");
  }
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw std::invalid_argument("noise variance must be positive");
  }
}

FeatureVector relu_features(double u) {
  if (!std::isfinite(u)) {
    throw std::invalid_argument("relu_features: non-finite input");
  }
  return {u > 0.0 ? u : 0.0, u < 0.0 ? u : 0.0};
}

ContactModel batch_posterior(const PriorAndNoise& prior,
                             std::span<const Sample> data) {
  prior.validate();
  if (data.empty()) return {prior.mean, prior.cov};

  const Eigen::Matrix2d prior_precision = spd_inverse(prior.cov);
  Eigen::Matrix2d precision = prior_precision;
  Eigen::Vector2d information = prior_precision * prior.mean;
  const double inv_beta = 1.0 / prior.noise_variance;
  for (const Sample& s : data) {
    const Eigen::Vector2d phi = relu_features(s.u).vec();
    precision += inv_beta * phi * phi.transpose();
    information += inv_beta * s.f * phi;
  }
  ContactModel out;
  out.cov = spd_inverse(precision);
  out.mean = out.cov * information;
  return out;
}

PredictiveDistribution predict(const ContactModel& model, double u) {
  const Eigen::Vector2d phi = relu_features(u).vec();
  const double var = phi.dot(model.cov * phi);
  return {model.mean.dot(phi), var > 0.0 ? var : 0.0};
}

Eigen::Matrix2d accumulate_precision(const Eigen::Matrix2d& precision,
                                     std::span<const double> inputs,
                                     double noise_variance) {
  Eigen::Matrix2d out = precision;
  const double inv_beta = 1.0 / noise_variance;
  for (double u : inputs) {
    const Eigen::Vector2d phi = relu_features(u).vec();
    out += inv_beta * phi * phi.transpose();
  }
  return out;
}

SampleWindow::SampleWindow(PriorAndNoise prior, std::size_t capacity,
                           std::size_t recompute_interval)
    : prior_(std::move(prior)),
      capacity_(capacity),
      recompute_interval_(recompute_interval) {
  prior_.validate();
  if (capacity_ == 0) {
    throw std::invalid_argument("window capacity must be positive");
  }
  prior_precision_ = spd_inverse(prior_.cov);
  prior_information_ = prior_precision_ * prior_.mean;
  precision_ = prior_precision_;
  information_ = prior_information_;
}

void SampleWindow::accumulate(const Sample& s, double sign) {
  const Eigen::Vector2d phi = relu_features(s.u).vec();
  const double w = sign / prior_.noise_variance;
  precision_ += w * phi * phi.transpose();
  information_ += w * s.f * phi;
}

void SampleWindow::push(const Sample& s) {
  if (!std::isfinite(s.u) || !std::isfinite(s.f) || !std::isfinite(s.t)) {
    throw std::invalid_argument("sample values must be finite");
  }
  if (!buffer_.empty() && s.t < buffer_.back().t) {
    throw std::invalid_argument("sample timestamps must be nondecreasing");
  }

  bool downdated = false;
  if (buffer_.size() == capacity_) {
    accumulate(buffer_.front(), -1.0);
    buffer_.pop_front();
    downdated = true;
  }
  buffer_.push_back(s);
  accumulate(s, +1.0);
  ++updates_;

  if (updates_ % recompute_interval_ == 0 ||
      (downdated && !is_spd(precision_))) {
    recompute();
  }
}

void SampleWindow::clear() {
  buffer_.clear();
  precision_ = prior_precision_;
  information_ = prior_information_;
}

void SampleWindow::recompute() {
  precision_ = prior_precision_;
  information_ = prior_information_;
  for (const Sample& s : buffer_) accumulate(s, +1.0);
  precision_ = 0.5 * (precision_ + precision_.transpose());
  ++recomputes_;
  if (!is_spd(precision_)) {
    throw NumericError("window precision is not SPD after recomputation");
  }
}

ContactModel SampleWindow::model() const {
  ContactModel out;
  out.cov = spd_inverse(precision_);
  out.mean = out.cov * information_;
  return out;
}

std::vector<double> SampleWindow::inputs() const {
  std::vector<double> out;
  out.reserve(buffer_.size());
  for (const Sample& s : buffer_) out.push_back(s.u);
  return out;
}

}  // namespace handover
