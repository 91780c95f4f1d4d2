#include "handover/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "handover/config_io.hpp"
#include "handover/errors.hpp"

namespace handover {

void SuiteConfig::validate() const {
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  if (policies.empty()) throw ConfigError("suite needs at least one policy");
  if (!scenarios) {
    if (weights.empty()) throw ConfigError("suite matrix is empty: no weights");
    for (double w : weights) {
      if (!(w > 0.0)) throw ConfigError("suite weights must be > 0");
    }
  } else {
    if (scenarios->empty()) throw ConfigError("suite matrix is empty");
    for (const Scenario& s : *scenarios) {
      if (!(s.weight > 0.0)) {
        throw ConfigError("scenario '" + s.name + "' weight must be > 0");
      }
      try {
        handover::validate(s.receiver);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("scenario '" + s.name + "': " + e.what());
      }
    }
  }
  base.validate();
}

std::vector<Scenario> SuiteConfig::resolved_scenarios() const {
  return scenarios ? *scenarios : default_scenarios(weights);
}

namespace {

FirmGrasp grasp_for(double weight, double onset) {
  FirmGrasp g;
  g.stiffness = 300.0 + 60.0 * weight;
  g.damping = 20.0 + 8.0 * weight;
  g.onset = onset;
  g.support_fraction = 0.5;
  return g;
}

std::string weight_tag(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%gN", w);
  return buf;
}

}  // namespace

std::vector<Scenario> default_scenarios(const std::vector<double>& weights) {
  std::vector<Scenario> out;
  for (double w : weights) {
    const std::string tag = weight_tag(w);
    auto add = [&](const std::string& name, ReceiverPolicy r) {
      out.push_back({name + "_" + tag, std::move(r), w});
    };

    add("grasp", grasp_for(w, 2.0));
    add("grasp_late", grasp_for(w, 4.0));
    FirmGrasp pulling = grasp_for(w, 2.0);
    pulling.pull = 0.5 * w;
    add("grasp_pull", pulling);

    IncidentalTouch below;
    below.normal = +1;
    below.preload = 2.0;
    add("touch_below", below);

    IncidentalTouch light;
    light.normal = +1;
    light.stiffness = 100.0;
    light.preload = 0.3;
    add("touch_light", light);

    IncidentalTouch above;
    above.normal = -1;
    above.preload = 1.5;
    add("touch_above", above);

    UpwardPull pull;
    pull.force = 1.5;
    pull.onset = 2.0;
    pull.grasp = grasp_for(w, 6.0);
    add("pull_then_grasp", pull);

    LateHesitantGrasp hesitant;
    hesitant.touch.normal = +1;
    hesitant.touch.preload = 1.5;
    hesitant.touch.onset = 2.0;
    hesitant.grasp = grasp_for(w, 7.0);
    add("hesitant", hesitant);

    add("no_contact", NoContact{});
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t suite_seed, std::uint64_t index) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = suite_seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

WilsonInterval wilson_interval(int k, int n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double p = static_cast<double>(k) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::vector<PolicyMetrics> summarize(const std::vector<EpisodeResult>& episodes,
                                     const std::vector<ReleasePolicy>& policies) {
  std::vector<PolicyMetrics> out;
  for (ReleasePolicy p : policies) {
    PolicyMetrics m;
    m.policy = p;
    double release_sum = 0.0;
    int released_ok = 0;
    for (const EpisodeResult& e : episodes) {
      if (e.policy != p) continue;
      ++m.episodes;
      switch (e.label) {
        case EpisodeLabel::kSuccess:
          ++m.success;
          if (e.released) {
            release_sum += e.release_time;
            ++released_ok;
          }
          break;
        case EpisodeLabel::kPrematureRelease: ++m.premature; break;
        case EpisodeLabel::kNoReleaseTimeout: ++m.timeout; break;
      }
    }
    m.success_rate =
        m.episodes ? static_cast<double>(m.success) / m.episodes : 0.0;
    m.ci = wilson_interval(m.success, m.episodes);
    m.mean_release_time = released_ok ? release_sum / released_ok : 0.0;
    out.push_back(m);
  }
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SuiteResult run_suite(const SuiteConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::vector<Scenario> scenarios = cfg.resolved_scenarios();

  std::vector<EpisodeConfig> jobs;
  jobs.reserve(scenarios.size() * cfg.policies.size());
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    // Same noise stream for a scenario under every policy.
    const std::uint64_t seed = derive_seed(cfg.seed, i);
    for (ReleasePolicy p : cfg.policies) {
      EpisodeConfig e = cfg.base;
      e.name = scenarios[i].name;
      e.receiver = scenarios[i].receiver;
      e.object.weight = scenarios[i].weight;
      e.policy = p;
      e.seed = seed;
      e.validate();
      jobs.push_back(std::move(e));
    }
  }

  SuiteResult result;
  result.seed = cfg.seed;
  // Worker count does not change results, so it stays out of the hash.
  nlohmann::json hashed = suite_to_json(cfg);
  hashed.erase("jobs");
  result.config_hash = fnv1a_hex(hashed.dump());
  result.episodes.resize(jobs.size());

  unsigned workers = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(jobs.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        result.episodes[i] = run_episode(jobs[i]);
        // Suite tables never need the window contents.
        result.episodes[i].final_samples.clear();
        result.episodes[i].final_samples.shrink_to_fit();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w + 1 < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  result.metrics = summarize(result.episodes, cfg.policies);
  result.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return result;
}

}  // namespace handover
