#include "handover/handover.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "handover/config_io.hpp"
#include "handover/contact_model.hpp"
#include "handover/episode.hpp"
#include "handover/errors.hpp"
#include "handover/firmness.hpp"
#include "handover/oracle_check.hpp"
#include "handover/suite.hpp"

using namespace handover;
using nlohmann::json;

struct ho_window {
  SampleWindow window;
};

struct ho_episode {
  EpisodeResult result;
  Provenance provenance;
  double v_max = 0.1;
  std::string label;
};

struct ho_suite {
  SuiteResult result;
};

struct ho_oracle_report {
  OracleReport report;
  bool replay = false;
  std::vector<InstanceOutcome> replayed;
};

namespace {

thread_local std::string g_last_error;

ho_status fail(ho_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

/// Maps exceptions from the core onto status codes.
template <typename F>
ho_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const ConfigError& e) {
    return fail(HO_ERR_CONFIG, e.what());
  } catch (const DivergenceError& e) {
    return fail(HO_ERR_DIVERGENCE, e.what());
  } catch (const NumericError& e) {
    return fail(HO_ERR_NUMERIC, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(HO_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(HO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HO_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HO_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

PriorAndNoise prior_from(const char* prior_json) {
  PriorAndNoise prior;
  if (!prior_json || !*prior_json) return prior;
  EpisodeConfig cfg = episode_from_json(
      json{{"prior", parse_json_text(prior_json, "<prior>")}});
  return cfg.prior;
}

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  body(os);
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

ho_status io_guarded(const std::function<void()>& body) {
  return guarded([&] {
    try {
      body();
    } catch (const std::filesystem::filesystem_error& e) {
      return fail(HO_ERR_IO, e.what());
    } catch (const std::runtime_error& e) {
      if (dynamic_cast<const ConfigError*>(&e)) throw;
      return fail(HO_ERR_IO, e.what());
    }
    return HO_OK;
  });
}

}  // namespace

extern "C" {

const char* ho_version(void) { return HANDOVER_VERSION; }

const char* ho_last_error(void) { return g_last_error.c_str(); }

void ho_string_free(char* s) { std::free(s); }

ho_status ho_window_create(const char* prior_json, size_t capacity,
                           size_t recompute_interval, ho_window** out) {
  if (!out) return fail(HO_ERR_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&] {
    if (recompute_interval == 0) {
      return fail(HO_ERR_INVALID_ARGUMENT, "recompute interval must be > 0");
    }
    *out = new ho_window{SampleWindow(prior_from(prior_json), capacity,
                                      recompute_interval)};
    return HO_OK;
  });
}

void ho_window_destroy(ho_window* w) { delete w; }

ho_status ho_window_push(ho_window* w, double u, double f, double t) {
  if (!w) return fail(HO_ERR_INVALID_ARGUMENT, "window is NULL");
  return guarded([&] {
    w->window.push({u, f, t});
    return HO_OK;
  });
}

ho_status ho_window_size(const ho_window* w, size_t* out) {
  if (!w || !out) return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = w->window.size();
  return HO_OK;
}

ho_status ho_window_posterior(const ho_window* w, double* mean, double* cov) {
  if (!w || !mean || !cov) return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const ContactModel m = w->window.model();
    mean[0] = m.mean(0);
    mean[1] = m.mean(1);
    for (int i = 0; i < 4; ++i) cov[i] = m.cov(i / 2, i % 2);
    return HO_OK;
  });
}

ho_status ho_batch_posterior(const char* prior_json, const double* u,
                             const double* f, size_t n, double* mean,
                             double* cov) {
  if ((n > 0 && (!u || !f)) || !mean || !cov) {
    return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  }
  return guarded([&] {
    std::vector<Sample> data;
    data.reserve(n);
    for (size_t i = 0; i < n; ++i) data.push_back({u[i], f[i], 0.0});
    const ContactModel m = batch_posterior(prior_from(prior_json), data);
    mean[0] = m.mean(0);
    mean[1] = m.mean(1);
    for (int i = 0; i < 4; ++i) cov[i] = m.cov(i / 2, i % 2);
    return HO_OK;
  });
}

ho_status ho_firmness_check(const double* mean, const double* cov,
                            double confidence, double v_max,
                            double object_weight, int* firm) {
  if (!mean || !cov || !firm) return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    ContactModel m;
    m.mean = {mean[0], mean[1]};
    m.cov << cov[0], cov[1], cov[2], cov[3];
    FirmnessConfig cfg;
    cfg.confidence = confidence;
    cfg.v_max = v_max;
    cfg.object_weight = object_weight;
    *firm = is_firm_grasp(m, cfg).firm ? 1 : 0;
    return HO_OK;
  });
}

ho_status ho_episode_run(const char* config_json,
                         const ho_episode_options* options, ho_episode** out) {
  if (!out) return fail(HO_ERR_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&] {
    const json j = parse_json_text(config_json ? config_json : "{}");
    EpisodeConfig cfg = episode_from_json(j);
    if (options && options->override_seed) cfg.seed = options->seed;
    EpisodeOptions eo;
    eo.record_trace = options && options->record_trace;

    auto e = std::make_unique<ho_episode>();
    e->result = run_episode(cfg, eo);
    e->provenance = {cfg.seed, fnv1a_hex(episode_to_json(cfg).dump()),
                     artifact_version()};
    e->v_max = cfg.planner.v_max;
    e->label = to_string(e->result.label);
    *out = e.release();
    return HO_OK;
  });
}

void ho_episode_destroy(ho_episode* e) { delete e; }

const char* ho_episode_label(const ho_episode* e) {
  return e ? e->label.c_str() : "";
}

ho_status ho_episode_summary_json(const ho_episode* e, char** out) {
  if (!e || !out) return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    *out = dup_string(episode_summary_json(e->result, e->provenance).dump());
    return HO_OK;
  });
}

ho_status ho_episode_write_trace(const ho_episode* e, const char* path) {
  if (!e || !path) return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  return io_guarded([&] {
    write_file(path, [&](std::ostream& os) {
      write_trace_csv(os, e->result, e->provenance);
    });
  });
}

ho_status ho_episode_write_fit(const ho_episode* e, const char* path,
                               int grid_points) {
  if (!e || !path) return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  return io_guarded([&] {
    write_file(path, [&](std::ostream& os) {
      write_fit_csv(os, e->result, e->v_max, grid_points, e->provenance);
    });
  });
}

ho_status ho_episode_band_widths(const ho_episode* e, double t,
                                 double* width_up, double* width_down) {
  if (!e || !width_up || !width_down) {
    return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  }
  Eigen::Vector2d diag = e->result.final_model.cov.diagonal();
  if (t >= 0.0) {
    const auto& trace = e->result.trace;
    if (trace.empty()) {
      return fail(HO_ERR_INVALID_ARGUMENT, "episode has no recorded trace");
    }
    const TraceRow* row = &trace.front();
    for (const TraceRow& r : trace) {
      if (r.t <= t + 1e-12) row = &r;
    }
    diag = row->cov_diag;
  }
  // On each half-line the band depends on one diagonal entry only.
  const double z = 1.959963984540054;
  *width_up = 2.0 * z * e->v_max * std::sqrt(diag(0));
  *width_down = 2.0 * z * e->v_max * std::sqrt(diag(1));
  return HO_OK;
}

ho_status ho_suite_run(const char* suite_json, const ho_suite_options* options,
                       ho_suite** out) {
  if (!out) return fail(HO_ERR_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&] {
    const json j = parse_json_text(suite_json ? suite_json : "{}");
    SuiteConfig cfg = suite_from_json(j);
    if (options && options->override_seed) cfg.seed = options->seed;
    if (options && options->jobs > 0) cfg.jobs = options->jobs;
    auto s = std::make_unique<ho_suite>();
    s->result = run_suite(cfg);
    *out = s.release();
    return HO_OK;
  });
}

void ho_suite_destroy(ho_suite* s) { delete s; }

ho_status ho_suite_write(const ho_suite* s, const char* dir) {
  if (!s || !dir) return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  return io_guarded([&] {
    const std::filesystem::path d(dir);
    const std::string version = artifact_version();
    const SuiteResult& r = s->result;
    write_file(d / "episodes.csv", [&](std::ostream& os) {
      write_suite_episodes_csv(os, r, version);
    });
    write_file(d / "summary.csv", [&](std::ostream& os) {
      write_suite_summary_csv(os, r, version);
    });
    write_file(d / "summary.json", [&](std::ostream& os) {
      os << suite_summary_json(r, version).dump(2) << '\n';
    });
    write_file(d / "episodes.jsonl", [&](std::ostream& os) {
      const Provenance prov{r.seed, r.config_hash, version};
      for (const EpisodeResult& e : r.episodes) {
        os << episode_summary_json(e, prov).dump() << '\n';
      }
    });
  });
}

ho_status ho_suite_summary_text(const ho_suite* s, char** out) {
  if (!s || !out) return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    std::ostringstream os;
    const SuiteResult& r = s->result;
    os << "suite seed=" << r.seed << " config_hash=" << r.config_hash
       << " episodes=" << r.episodes.size() << "\n";
    for (const PolicyMetrics& m : r.metrics) {
      char line[256];
      std::snprintf(line, sizeof line,
                    "%-10s success %3d/%-3d  rate %.3f  95%% CI [%.3f, %.3f]  "
                    "premature %d  timeout %d\n",
                    to_string(m.policy).c_str(), m.success, m.episodes,
                    m.success_rate, m.ci.lo, m.ci.hi, m.premature, m.timeout);
      os << line;
    }
    *out = dup_string(os.str());
    return HO_OK;
  });
}

ho_status ho_suite_wall_seconds(const ho_suite* s, double* out) {
  if (!s || !out) return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = s->result.wall_seconds;
  return HO_OK;
}

void ho_oracle_options_default(ho_oracle_options* o) {
  if (!o) return;
  const OracleOptions d;
  o->seed = d.seed;
  o->instances = d.instances;
  o->sequences = d.sequences;
  o->sequence_length = d.sequence_length;
  o->inject_fault = 0;
}

namespace {

OracleOptions to_core(const ho_oracle_options* o) {
  OracleOptions opts;
  if (o) {
    opts.seed = o->seed;
    opts.instances = o->instances;
    opts.sequences = o->sequences;
    opts.sequence_length = o->sequence_length;
    opts.inject_fault = o->inject_fault != 0;
  }
  return opts;
}

}  // namespace

ho_status ho_oracle_check(const ho_oracle_options* options,
                          ho_oracle_report** out) {
  if (!out) return fail(HO_ERR_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<ho_oracle_report>();
    r->report = run_oracle_check(to_core(options));
    *out = r.release();
    return HO_OK;
  });
}

ho_status ho_oracle_replay(const char* path, const ho_oracle_options* options,
                           ho_oracle_report** out) {
  if (!path || !out) return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<ho_oracle_report>();
    r->replay = true;
    r->report.options = to_core(options);
    r->replayed = replay_instances(read_json_file(path), r->report.options);
    for (const InstanceOutcome& o : r->replayed) {
      if (o.near_boundary) {
        ++r->report.boundary_skipped;
        continue;
      }
      ++r->report.instances_checked;
      if (!o.agree) r->report.disagreements.push_back(o);
    }
    *out = r.release();
    return HO_OK;
  });
}

void ho_oracle_report_destroy(ho_oracle_report* r) { delete r; }

ho_status ho_oracle_report_passed(const ho_oracle_report* r, int* passed) {
  if (!r || !passed) return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  *passed = (r->replay ? r->report.feasibility_ok() : r->report.passed()) ? 1 : 0;
  return HO_OK;
}

ho_status ho_oracle_report_text(const ho_oracle_report* r, char** out) {
  if (!r || !out) return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const OracleReport& rep = r->report;
    std::ostringstream os;
    os << "seed " << rep.options.seed
       << (rep.options.inject_fault ? " (fault injected)" : "") << "\n";
    os << "feasibility: " << rep.instances_checked << " instances checked, "
       << rep.boundary_skipped << " within " << rep.options.boundary_eps
       << " of the boundary, " << rep.disagreements.size()
       << " disagreements";
    if (!r->replay) os << " (" << rep.feasibility_seconds << " s)";
    os << "\n";
    if (!r->replay) {
      os << "window: " << rep.window_sequences << " sequences x "
         << rep.options.sequence_length << " samples, max |recursive - batch| "
         << rep.window_max_error << " (tol " << rep.window_tolerance << ", "
         << rep.window_seconds << " s)\n";
    }
    os << (rep.disagreements.empty() && (r->replay || rep.window_ok())
               ? "PASS"
               : "FAIL")
       << "\n";
    *out = dup_string(os.str());
    return HO_OK;
  });
}

ho_status ho_oracle_report_write(const ho_oracle_report* r, const char* dir) {
  if (!r || !dir) return fail(HO_ERR_INVALID_ARGUMENT, "NULL argument");
  return io_guarded([&] {
    json j = report_to_json(r->report);
    if (r->replay) {
      json list = json::array();
      for (const InstanceOutcome& o : r->replayed) list.push_back(outcome_to_json(o));
      j["replayed"] = list;
      j.erase("window_sequences");
      j.erase("window_max_error");
      j["passed"] = r->report.feasibility_ok();
    }
    write_file(std::filesystem::path(dir) / "oracle_report.json",
               [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  });
}

}  // extern "C"
