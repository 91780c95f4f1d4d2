#include "handover/oracle_check.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "handover/errors.hpp"
#include "handover/feasibility_oracle.hpp"
#include "handover/firmness.hpp"

namespace handover {

using nlohmann::json;

FeasibilityInstance random_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  FeasibilityInstance inst;
  inst.mean = {uniform(-60.0, 20.0), uniform(-60.0, 20.0)};
  // Random rotation of log-uniform eigenvalues spanning tight to prior-wide.
  const double a = std::exp(uniform(std::log(1e-3), std::log(1e2)));
  const double b = std::exp(uniform(std::log(1e-3), std::log(1e2)));
  const double th = uniform(0.0, 3.141592653589793);
  Eigen::Matrix2d rot;
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  inst.cov = rot * Eigen::Vector2d(a, b).asDiagonal() * rot.transpose();
  inst.cov = 0.5 * (inst.cov + inst.cov.transpose());
  inst.v_max = uniform(0.02, 0.3);
  inst.f_target = uniform(-8.0, 8.0);
  inst.confidence = uniform(0.5, 0.999);
  return inst;
}

InstanceOutcome evaluate_instance(const FeasibilityInstance& inst,
                                  const OracleOptions& opts) {
  InstanceOutcome out;
  out.instance = inst;
  const ContactModel model{inst.mean, inst.cov};
  const ConfidenceEllipsoid ell = ellipsoid_from(model, inst.confidence);
  ConfidenceEllipsoid closed_ell = ell;
  if (opts.inject_fault) closed_ell.shape.setZero();

  for (Partition p : {Partition::kNeg, Partition::kPos}) {
    const InputPartition part = InputPartition::make(p, inst.v_max);
    for (Sense s : {Sense::kLess, Sense::kGreater}) {
      const int k = static_cast<int>(p) * 2 + (s == Sense::kLess ? 0 : 1);
      out.margins[k] = robust_lp_margin(ell, part, inst.f_target, s);
      out.closed[k] = robust_lp_feasible(closed_ell, part, inst.f_target, s);
      out.brute[k] = oracle::brute_force_feasible(ell, part, inst.f_target, s,
                                                  opts.u_points, opts.z_points);
      if (std::abs(out.margins[k] - kFeasibilityTolerance) <= opts.boundary_eps) {
        out.near_boundary = true;
      }
    }
  }
  auto verdict = [](const std::array<bool, 4>& v) {
    const bool less = v[0] || v[2];
    const bool greater = v[1] || v[3];
    return less && greater;
  };
  out.closed_feasible = verdict(out.closed);
  out.brute_feasible = verdict(out.brute);
  out.agree = out.closed == out.brute;
  return out;
}

double window_sequence_error(std::mt19937_64& rng, int length,
                             std::size_t capacity) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.5);
  const Eigen::Vector2d w{-40.0 + 30.0 * unit(rng), -40.0 + 30.0 * unit(rng)};
  PriorAndNoise prior;
  SampleWindow window(prior, capacity);

  double max_err = 0.0;
  double t = 0.0;
  // Runs of one sign mimic approach and probing phases, so whole segments
  // drain out of the window and exercise the downdate.
  int run_left = 0;
  double sign = -1.0;
  for (int i = 0; i < length; ++i) {
    if (run_left == 0) {
      run_left = 1 + static_cast<int>(unit(rng) * 300.0);
      sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    }
    --run_left;
    const double u = unit(rng) < 0.1 ? 0.0 : sign * 0.15 * unit(rng);
    const double f = w.dot(relu_features(u).vec()) + noise(rng);
    t += 0.005;
    window.push({u, f, t});

    const std::vector<Sample> data(window.samples().begin(),
                                   window.samples().end());
    const ContactModel batch = batch_posterior(prior, data);
    const ContactModel rec = window.model();
    max_err = std::max(max_err, (batch.mean - rec.mean).cwiseAbs().maxCoeff());
    max_err = std::max(max_err, (batch.cov - rec.cov).cwiseAbs().maxCoeff());
  }
  return max_err;
}

OracleReport run_oracle_check(const OracleOptions& opts) {
  if (opts.instances < 0 || opts.sequences < 0 || opts.sequence_length < 0) {
    throw ConfigError("oracle counts must be nonnegative");
  }
  if (opts.u_points < 2 || opts.z_points < 3) {
    throw ConfigError("oracle grids are too coarse");
  }
  OracleReport report;
  report.options = opts;

  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  // Separate streams so changing one count leaves the other's draws intact.
  std::mt19937_64 rng(opts.seed);
  for (int i = 0; i < opts.instances; ++i) {
    const InstanceOutcome o = evaluate_instance(random_instance(rng), opts);
    if (o.near_boundary) {
      ++report.boundary_skipped;
      continue;
    }
    ++report.instances_checked;
    if (o.brute_feasible) ++report.feasible_count;
    if (!o.agree) report.disagreements.push_back(o);
  }
  report.feasibility_seconds =
      std::chrono::duration<double>(clock::now() - t0).count();

  t0 = clock::now();
  std::mt19937_64 wrng(opts.seed ^ 0x5bd1e995ull);
  for (int i = 0; i < opts.sequences; ++i) {
    report.window_max_error =
        std::max(report.window_max_error,
                 window_sequence_error(wrng, opts.sequence_length,
                                       opts.window_capacity));
    ++report.window_sequences;
  }
  report.window_seconds =
      std::chrono::duration<double>(clock::now() - t0).count();
  return report;
}

json instance_to_json(const FeasibilityInstance& inst) {
  return {{"mean", {inst.mean(0), inst.mean(1)}},
          {"cov",
           {{inst.cov(0, 0), inst.cov(0, 1)}, {inst.cov(1, 0), inst.cov(1, 1)}}},
          {"v_max", inst.v_max},
          {"f_target", inst.f_target},
          {"confidence", inst.confidence}};
}

FeasibilityInstance instance_from_json(const json& j) {
  try {
    FeasibilityInstance inst;
    inst.mean = {j.at("mean").at(0).get<double>(),
                 j.at("mean").at(1).get<double>()};
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        inst.cov(r, c) = j.at("cov").at(r).at(c).get<double>();
      }
    }
    inst.v_max = j.at("v_max").get<double>();
    inst.f_target = j.at("f_target").get<double>();
    inst.confidence = j.at("confidence").get<double>();
    return inst;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad oracle instance: ") + e.what());
  }
}

json outcome_to_json(const InstanceOutcome& o) {
  return {{"instance", instance_to_json(o.instance)},
          {"margins", o.margins},
          {"closed", o.closed},
          {"brute", o.brute},
          {"closed_feasible", o.closed_feasible},
          {"brute_feasible", o.brute_feasible},
          {"near_boundary", o.near_boundary},
          {"agree", o.agree}};
}

json report_to_json(const OracleReport& r) {
  json dis = json::array();
  for (const InstanceOutcome& o : r.disagreements) dis.push_back(outcome_to_json(o));
  return {{"seed", r.options.seed},
          {"inject_fault", r.options.inject_fault},
          {"instances", r.options.instances},
          {"instances_checked", r.instances_checked},
          {"boundary_skipped", r.boundary_skipped},
          {"boundary_eps", r.options.boundary_eps},
          {"feasible_count", r.feasible_count},
          {"disagreement_count", r.disagreements.size()},
          {"disagreements", dis},
          {"window_sequences", r.window_sequences},
          {"window_sequence_length", r.options.sequence_length},
          {"window_max_error", r.window_max_error},
          {"window_tolerance", r.window_tolerance},
          {"passed", r.passed()}};
}

std::vector<InstanceOutcome> replay_instances(const json& j,
                                              const OracleOptions& opts) {
  const json* list = &j;
  if (j.is_object() && j.contains("disagreements")) list = &j.at("disagreements");
  if (!list->is_array()) throw ConfigError("replay file must hold a list");
  std::vector<InstanceOutcome> out;
  for (const json& item : *list) {
    const json& inst = item.contains("instance") ? item.at("instance") : item;
    out.push_back(evaluate_instance(instance_from_json(inst), opts));
  }
  return out;
}

}  // namespace handover
