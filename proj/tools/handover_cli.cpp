// Command-line harness over the C API: run, suite, trace, oracle-check.
//
// Every flag can also come from the environment: HANDOVER_CONFIG,
// HANDOVER_OUT, HANDOVER_SEED, HANDOVER_JOBS, HANDOVER_VERBOSE. Flags win.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "handover/handover.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitOracle = 4;
constexpr int kExitOther = 5;

struct Manifest {
  std::string subcommand;
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  bool verbose = false;
  bool inject_fault = false;
  std::string replay;
  int instances = -1;
};

int exit_code_for(ho_status s) {
  switch (s) {
    case HO_OK: return kExitOk;
    case HO_ERR_CONFIG: return kExitConfig;
    case HO_ERR_DIVERGENCE: return kExitDivergence;
    case HO_ERR_ORACLE_DISAGREEMENT: return kExitOracle;
    default: return kExitOther;
  }
}

int report(ho_status s, const std::string& context) {
  std::cerr << "error: " << context << ": " << ho_last_error() << "\n";
  return exit_code_for(s);
}

/// Reads the config file; a missing path means built-in defaults.
std::optional<std::string> read_config(const Manifest& m, int& exit_code) {
  if (m.config.empty()) return std::string("{}");
  std::ifstream in(m.config, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open config " << m.config << "\n";
    exit_code = kExitConfig;
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool prepare_out(const Manifest& m, int& exit_code) {
  std::error_code ec;
  fs::create_directories(m.out, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << m.out << ": "
              << ec.message() << "\n";
    exit_code = kExitOther;
    return false;
  }
  return true;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

void write_manifest(const Manifest& m, std::uint64_t seed) {
  std::ofstream os(fs::path(m.out) / "manifest.json");
  os << "{\"subcommand\": \"" << m.subcommand << "\", \"config\": \""
     << json_escape(m.config) << "\", \"out\": \"" << json_escape(m.out)
     << "\", \"seed\": " << seed << ", \"version\": \"" << ho_version()
     << "\"}\n";
}

/// Pulls the "seed" field out of a one-line summary.
std::uint64_t summary_seed(const std::string& summary) {
  const auto pos = summary.find("\"seed\":");
  if (pos == std::string::npos) return 0;
  return std::strtoull(summary.c_str() + pos + 7, nullptr, 10);
}

int run_episode_command(const Manifest& m, bool fit) {
  int code = kExitOk;
  const auto text = read_config(m, code);
  if (!text) return code;

  ho_episode_options opts{};
  opts.override_seed = m.seed.has_value();
  opts.seed = m.seed.value_or(0);
  opts.record_trace = 1;
  ho_episode* e = nullptr;
  if (ho_status s = ho_episode_run(text->c_str(), &opts, &e); s != HO_OK) {
    return report(s, m.config.empty() ? "config" : m.config);
  }
  if (!prepare_out(m, code)) {
    ho_episode_destroy(e);
    return code;
  }

  char* summary = nullptr;
  ho_status s = ho_episode_summary_json(e, &summary);
  if (s == HO_OK) {
    std::ofstream(fs::path(m.out) / "summary.jsonl") << summary << "\n";
    write_manifest(m, summary_seed(summary));
  }
  const std::string trace_path = (fs::path(m.out) / "trace.csv").string();
  if (s == HO_OK) s = ho_episode_write_trace(e, trace_path.c_str());
  const std::string fit_path = (fs::path(m.out) / "fit.csv").string();
  if (s == HO_OK && fit) s = ho_episode_write_fit(e, fit_path.c_str(), 81);

  if (s == HO_OK) {
    std::cout << "label " << ho_episode_label(e) << "\n";
    if (fit) {
      double up = 0.0, down = 0.0;
      ho_episode_band_widths(e, -1.0, &up, &down);
      std::cout << "final 95% band width: u=+v_max " << up << " N, u=-v_max "
                << down << " N\n";
    }
    if (m.verbose) std::cout << summary << "\n";
    std::cout << "wrote " << m.out << "\n";
  }
  ho_string_free(summary);
  ho_episode_destroy(e);
  return s == HO_OK ? kExitOk : report(s, "writing outputs");
}

int suite_command(const Manifest& m) {
  int code = kExitOk;
  const auto text = read_config(m, code);
  if (!text) return code;

  ho_suite_options opts{};
  opts.override_seed = m.seed.has_value();
  opts.seed = m.seed.value_or(0);
  opts.jobs = m.jobs;
  ho_suite* suite = nullptr;
  if (ho_status s = ho_suite_run(text->c_str(), &opts, &suite); s != HO_OK) {
    return report(s, m.config.empty() ? "suite" : m.config);
  }
  if (!prepare_out(m, code)) {
    ho_suite_destroy(suite);
    return code;
  }
  ho_status s = ho_suite_write(suite, m.out.c_str());
  char* text_summary = nullptr;
  if (s == HO_OK) s = ho_suite_summary_text(suite, &text_summary);
  if (s == HO_OK) {
    std::cout << text_summary;
    if (m.verbose) {
      double secs = 0.0;
      ho_suite_wall_seconds(suite, &secs);
      std::cout << "wall time " << secs << " s\n";
    }
    std::cout << "wrote " << m.out << "\n";
    // Recover the effective seed from the first line of the summary.
    std::uint64_t seed = 0;
    std::sscanf(text_summary, "suite seed=%llu",
                reinterpret_cast<unsigned long long*>(&seed));
    write_manifest(m, seed);
  }
  ho_string_free(text_summary);
  ho_suite_destroy(suite);
  return s == HO_OK ? kExitOk : report(s, "writing outputs");
}

int oracle_command(const Manifest& m) {
  ho_oracle_options opts;
  ho_oracle_options_default(&opts);
  if (m.seed) opts.seed = *m.seed;
  if (m.instances >= 0) opts.instances = m.instances;
  opts.inject_fault = m.inject_fault ? 1 : 0;

  ho_oracle_report* rep = nullptr;
  ho_status s = m.replay.empty()
                    ? ho_oracle_check(&opts, &rep)
                    : ho_oracle_replay(m.replay.c_str(), &opts, &rep);
  if (s != HO_OK) return report(s, "oracle-check");

  int code = kExitOk;
  if (!prepare_out(m, code)) {
    ho_oracle_report_destroy(rep);
    return code;
  }
  char* text = nullptr;
  int passed = 0;
  s = ho_oracle_report_write(rep, m.out.c_str());
  if (s == HO_OK) s = ho_oracle_report_text(rep, &text);
  if (s == HO_OK) s = ho_oracle_report_passed(rep, &passed);
  if (s == HO_OK) {
    std::cout << text;
    write_manifest(m, opts.seed);
    if (!passed) {
      std::cerr << "oracle disagreement; failing instances saved to "
                << (fs::path(m.out) / "oracle_report.json").string() << "\n";
    }
  }
  ho_string_free(text);
  ho_oracle_report_destroy(rep);
  if (s != HO_OK) return report(s, "writing outputs");
  return passed ? kExitOk : kExitOracle;
}

void add_common(CLI::App* sub, Manifest& m, bool with_config) {
  if (with_config) {
    sub->add_option("--config", m.config, "JSON config file")
        ->envname("HANDOVER_CONFIG");
  }
  sub->add_option("--out", m.out, "output directory (created if missing)")
      ->envname("HANDOVER_OUT");
  sub->add_option("--seed", m.seed, "override the config seed")
      ->envname("HANDOVER_SEED");
  sub->add_flag("--verbose,-v", m.verbose, "print more detail")
      ->envname("HANDOVER_VERBOSE");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scripted handover simulation and release-policy harness"};
  app.set_version_flag("--version", std::string(ho_version()));
  app.require_subcommand(1);

  Manifest m;
  auto* run = app.add_subcommand("run", "run one episode; writes summary and trace");
  add_common(run, m, true);
  auto* suite = app.add_subcommand("suite", "run the scenario matrix under every policy");
  add_common(suite, m, true);
  suite->add_option("--jobs", m.jobs, "worker threads (0: all cores)")
      ->envname("HANDOVER_JOBS");
  auto* trace = app.add_subcommand("trace", "run one episode; writes trace and model fit");
  add_common(trace, m, true);
  auto* oracle = app.add_subcommand("oracle-check", "randomized oracle agreement");
  add_common(oracle, m, false);
  oracle->add_flag("--inject-fault", m.inject_fault,
                   "break the closed form on purpose (negative control)");
  oracle->add_option("--replay", m.replay, "re-evaluate instances from a report");
  oracle->add_option("--instances", m.instances, "number of random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (run->parsed()) {
    m.subcommand = "run";
    return run_episode_command(m, false);
  }
  if (trace->parsed()) {
    m.subcommand = "trace";
    return run_episode_command(m, true);
  }
  if (suite->parsed()) {
    m.subcommand = "suite";
    return suite_command(m);
  }
  m.subcommand = "oracle-check";
  return oracle_command(m);
}
