#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "json.hpp"

#include "handover/episode.hpp"
#include "handover/suite.hpp"

namespace handover {

/// Parses JSON text. Syntax errors become ConfigError with line and column.
nlohmann::json parse_json_text(const std::string& text,
                               const std::string& source = "config");
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Every key is optional and defaults to the struct defaults. Unknown keys
/// and type mismatches throw ConfigError naming the offending key path.
EpisodeConfig episode_from_json(const nlohmann::json& j);
nlohmann::json episode_to_json(const EpisodeConfig& cfg);

ReceiverPolicy receiver_from_json(const nlohmann::json& j,
                                  const std::string& path = "receiver");
nlohmann::json receiver_to_json(const ReceiverPolicy& r);

SuiteConfig suite_from_json(const nlohmann::json& j);
nlohmann::json suite_to_json(const SuiteConfig& cfg);

ReleasePolicy policy_from_string(const std::string& s);
MotionMode motion_from_string(const std::string& s);

/// Provenance carried by every output file.
struct Provenance {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string version;
};

std::string artifact_version();

/// One JSON object per episode, no trace.
nlohmann::json episode_summary_json(const EpisodeResult& r,
                                    const Provenance& prov);

/// Fixed columns: t,q_x,q_y,q_z,v_x,v_y,v_z,u_x,u_y,u_z,f_x,f_y,f_z,
/// m_up,m_down,s_up,s_down,contact,firm,phase,receiver_fz.
void write_trace_csv(std::ostream& os, const EpisodeResult& r,
                     const Provenance& prov);

/// Tidy rows: kind,u,f,mean,lo,hi. kind=sample rows are the window contents;
/// kind=fit rows sample the posterior mean and 95% band on [-v_max, v_max].
void write_fit_csv(std::ostream& os, const EpisodeResult& r, double v_max,
                   int grid_points, const Provenance& prov);

/// Half-width of the 95% predictive band at input u.
double band_half_width(const ContactModel& model, double u);

void write_suite_episodes_csv(std::ostream& os, const SuiteResult& r,
                              const std::string& version);
void write_suite_summary_csv(std::ostream& os, const SuiteResult& r,
                             const std::string& version);
nlohmann::json suite_summary_json(const SuiteResult& r,
                                  const std::string& version);

/// Formats a double with enough digits to round-trip.
std::string fmt(double x);

}  // namespace handover
