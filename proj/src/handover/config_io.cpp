#include "handover/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "handover/errors.hpp"
#include "handover/info_planner.hpp"

#ifndef HANDOVER_VERSION
#define HANDOVER_VERSION "0.0.0"
#endif

namespace handover {

using nlohmann::json;

std::string artifact_version() { return HANDOVER_VERSION; }

std::string fmt(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset into a 1-based line and column.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(
        e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << source << ": line " << line << ", column " << col
        << ": malformed JSON (" << e.what() << ")";
    throw ConfigError(msg.str());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path.string());
}

namespace {

/// Strict object reader: records the keys it consumed so leftovers can be
/// reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path,
                                const std::string& what) {
    throw ConfigError(path + ": " + what);
  }

  std::string key_path(const char* key) const { return path_ + "." + key; }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const char* key, double& out) {
    if (const json* v = find(key)) out = as_number(*v, key_path(key));
  }

  void integer(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key_path(key), "expected an integer");
      out = v->get<int>();
    }
  }

  void size(const char* key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) {
        fail(key_path(key), "expected a nonnegative integer");
      }
      out = v->get<std::size_t>();
    }
  }

  void u64(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) {
        fail(key_path(key), "expected a nonnegative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key_path(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key_path(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  template <int N>
  void vector(const char* key, Eigen::Matrix<double, N, 1>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != N) {
        fail(key_path(key), "expected an array of " + std::to_string(N) +
                                " numbers");
      }
      for (int i = 0; i < N; ++i) {
        out(i) = as_number((*v)[i], key_path(key) + "[" + std::to_string(i) +
                                        "]");
      }
    }
  }

  void matrix2(const char* key, Eigen::Matrix2d& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 2) {
        fail(key_path(key), "expected a 2x2 array");
      }
      for (int r = 0; r < 2; ++r) {
        const json& row = (*v)[r];
        if (!row.is_array() || row.size() != 2) {
          fail(key_path(key), "expected a 2x2 array");
        }
        for (int c = 0; c < 2; ++c) {
          out(r, c) = as_number(row[c], key_path(key));
        }
      }
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(path_ + "." + it.key(), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <int N>
json vec_json(const Eigen::Matrix<double, N, 1>& v) {
  json a = json::array();
  for (int i = 0; i < N; ++i) a.push_back(v(i));
  return a;
}

void read_touch(Reader& r, IncidentalTouch& t) {
  r.integer("normal", t.normal);
  r.number("stiffness", t.stiffness);
  r.number("onset", t.onset);
  r.number("preload", t.preload);
}

void read_grasp(Reader& r, FirmGrasp& g) {
  r.number("stiffness", g.stiffness);
  r.number("damping", g.damping);
  r.number("onset", g.onset);
  r.number("anchor_offset", g.anchor_offset);
  r.number("support_fraction", g.support_fraction);
  r.number("support_ramp", g.support_ramp);
  r.number("pull", g.pull);
}

FirmGrasp grasp_from_json(const json& j, const std::string& path) {
  FirmGrasp g;
  Reader r(j, path);
  read_grasp(r, g);
  r.finish();
  return g;
}

IncidentalTouch touch_from_json(const json& j, const std::string& path) {
  IncidentalTouch t;
  Reader r(j, path);
  read_touch(r, t);
  r.finish();
  return t;
}

json touch_json(const IncidentalTouch& t) {
  return {{"normal", t.normal},
          {"stiffness", t.stiffness},
          {"onset", t.onset},
          {"preload", t.preload}};
}

json grasp_json(const FirmGrasp& g) {
  return {{"stiffness", g.stiffness},         {"damping", g.damping},
          {"onset", g.onset},                 {"anchor_offset", g.anchor_offset},
          {"support_fraction", g.support_fraction},
          {"support_ramp", g.support_ramp},   {"pull", g.pull}};
}

void read_planner(const json& j, PlannerConfig& p) {
  Reader r(j, "planner");
  r.number("horizon", p.horizon);
  r.number("sample_rate", p.sample_rate);
  r.number("gain", p.gain);
  r.number("filter_rate", p.filter_rate);
  r.vector<3>("damping", p.damping);
  r.vector<3>("mass", p.mass);
  r.number("v_max", p.v_max);
  r.number("c_reg", p.c_reg);
  r.integer("candidates", p.candidates);
  r.number("offset_range", p.offset_range);
  r.number("force_sign", p.force_sign);
  r.boolean("simulate_eviction", p.simulate_eviction);
  r.integer("rollout_substeps", p.rollout_substeps);
  r.finish();
}

json planner_json(const PlannerConfig& p) {
  return {{"horizon", p.horizon},
          {"sample_rate", p.sample_rate},
          {"gain", p.gain},
          {"filter_rate", p.filter_rate},
          {"damping", vec_json<3>(p.damping)},
          {"mass", vec_json<3>(p.mass)},
          {"v_max", p.v_max},
          {"c_reg", p.c_reg},
          {"candidates", p.candidates},
          {"offset_range", p.offset_range},
          {"force_sign", p.force_sign},
          {"simulate_eviction", p.simulate_eviction},
          {"rollout_substeps", p.rollout_substeps}};
}

}  // namespace

ReleasePolicy policy_from_string(const std::string& s) {
  if (s == "ACTIVE") return ReleasePolicy::kActive;
  if (s == "FORCE_THR") return ReleasePolicy::kForceThr;
  if (s == "WEIGHT_THR") return ReleasePolicy::kWeightThr;
  throw ConfigError("unknown release policy '" + s +
                    "' (expected ACTIVE, FORCE_THR or WEIGHT_THR)");
}

MotionMode motion_from_string(const std::string& s) {
  if (s == "policy") return MotionMode::kPolicy;
  if (s == "passive_approach") return MotionMode::kPassiveApproach;
  throw ConfigError("unknown motion mode '" + s +
                    "' (expected policy or passive_approach)");
}

ReceiverPolicy receiver_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) Reader::fail(path, "expected an object");
  auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string()) {
    Reader::fail(path + ".kind", "missing receiver kind");
  }
  const std::string kind = kind_it->get<std::string>();
  Reader r(j, path);
  r.find("kind");
  ReceiverPolicy out;
  if (kind == "NoContact") {
    out = NoContact{};
  } else if (kind == "IncidentalTouch") {
    IncidentalTouch t;
    read_touch(r, t);
    out = t;
  } else if (kind == "FirmGrasp") {
    FirmGrasp g;
    read_grasp(r, g);
    out = g;
  } else if (kind == "UpwardPull") {
    UpwardPull p;
    r.number("force", p.force);
    r.number("onset", p.onset);
    if (const json* g = r.find("grasp")) {
      p.grasp = grasp_from_json(*g, path + ".grasp");
    }
    out = p;
  } else if (kind == "LateHesitantGrasp") {
    LateHesitantGrasp h;
    if (const json* t = r.find("touch")) {
      h.touch = touch_from_json(*t, path + ".touch");
    }
    if (const json* g = r.find("grasp")) {
      h.grasp = grasp_from_json(*g, path + ".grasp");
    }
    out = h;
  } else {
    Reader::fail(path + ".kind", "unknown receiver kind '" + kind + "'");
  }
  r.finish();
  return out;
}

json receiver_to_json(const ReceiverPolicy& policy) {
  json j;
  if (std::holds_alternative<NoContact>(policy)) {
    j = json::object();
  } else if (const auto* t = std::get_if<IncidentalTouch>(&policy)) {
    j = touch_json(*t);
  } else if (const auto* g = std::get_if<FirmGrasp>(&policy)) {
    j = grasp_json(*g);
  } else if (const auto* p = std::get_if<UpwardPull>(&policy)) {
    j = {{"force", p->force}, {"onset", p->onset}};
    if (p->grasp) j["grasp"] = grasp_json(*p->grasp);
  } else if (const auto* h = std::get_if<LateHesitantGrasp>(&policy)) {
    j = {{"touch", touch_json(h->touch)}, {"grasp", grasp_json(h->grasp)}};
  }
  j["kind"] = receiver_kind(policy);
  return j;
}

EpisodeConfig episode_from_json(const json& j) {
  EpisodeConfig c;
  Reader r(j, "config");
  r.string("name", c.name);
  if (const json* v = r.find("receiver")) c.receiver = receiver_from_json(*v);
  if (const json* v = r.find("object")) {
    Reader o(*v, "config.object");
    o.string("name", c.object.name);
    o.number("weight", c.object.weight);
    o.vector<3>("initial_position", c.object.initial_position);
    o.finish();
  }
  std::string s;
  if (const json* v = r.find("policy")) {
    if (!v->is_string()) Reader::fail("config.policy", "expected a string");
    c.policy = policy_from_string(v->get<std::string>());
  }
  if (const json* v = r.find("motion")) {
    if (!v->is_string()) Reader::fail("config.motion", "expected a string");
    c.motion = motion_from_string(v->get<std::string>());
  }
  r.boolean("release_enabled", c.release_enabled);
  if (const json* v = r.find("rates")) {
    Reader o(*v, "config.rates");
    o.integer("physics", c.rates.physics);
    o.integer("model", c.rates.model);
    o.integer("firmness", c.rates.firmness);
    o.integer("planner", c.rates.planner);
    o.finish();
  }
  r.number("timeout", c.timeout);
  r.u64("seed", c.seed);
  r.vector<3>("hand_position", c.hand_position);
  r.number("hand_noise_std", c.hand_noise_std);
  r.number("ft_noise_std", c.ft_noise_std);
  r.integer("firm_debounce", c.firm_debounce);
  r.number("contact_threshold", c.contact_threshold);
  r.number("force_threshold", c.force_threshold);
  r.number("weighing_settle", c.weighing_settle);
  r.number("weighing_time", c.weighing_time);
  r.number("divergence_speed", c.divergence_speed);
  if (const json* v = r.find("prior")) {
    Reader o(*v, "config.prior");
    o.vector<2>("mean", c.prior.mean);
    o.matrix2("cov", c.prior.cov);
    o.number("noise_variance", c.prior.noise_variance);
    o.finish();
  }
  r.size("window_capacity", c.window_capacity);
  r.size("recompute_interval", c.recompute_interval);
  r.number("confidence", c.confidence);
  if (const json* v = r.find("planner")) read_planner(*v, c.planner);
  r.number("observer_gain", c.observer_gain);
  r.number("rotational_inertia", c.rotational_inertia);
  r.number("gravity", c.gravity);
  r.finish();
  return c;
}

json episode_to_json(const EpisodeConfig& c) {
  json prior_cov = json::array({json::array({c.prior.cov(0, 0), c.prior.cov(0, 1)}),
                                json::array({c.prior.cov(1, 0), c.prior.cov(1, 1)})});
  return {{"name", c.name},
          {"receiver", receiver_to_json(c.receiver)},
          {"object",
           {{"name", c.object.name},
            {"weight", c.object.weight},
            {"initial_position", vec_json<3>(c.object.initial_position)}}},
          {"policy", to_string(c.policy)},
          {"motion", to_string(c.motion)},
          {"release_enabled", c.release_enabled},
          {"rates",
           {{"physics", c.rates.physics},
            {"model", c.rates.model},
            {"firmness", c.rates.firmness},
            {"planner", c.rates.planner}}},
          {"timeout", c.timeout},
          {"seed", c.seed},
          {"hand_position", vec_json<3>(c.hand_position)},
          {"hand_noise_std", c.hand_noise_std},
          {"ft_noise_std", c.ft_noise_std},
          {"firm_debounce", c.firm_debounce},
          {"contact_threshold", c.contact_threshold},
          {"force_threshold", c.force_threshold},
          {"weighing_settle", c.weighing_settle},
          {"weighing_time", c.weighing_time},
          {"divergence_speed", c.divergence_speed},
          {"prior",
           {{"mean", vec_json<2>(c.prior.mean)},
            {"cov", prior_cov},
            {"noise_variance", c.prior.noise_variance}}},
          {"window_capacity", c.window_capacity},
          {"recompute_interval", c.recompute_interval},
          {"confidence", c.confidence},
          {"planner", planner_json(c.planner)},
          {"observer_gain", c.observer_gain},
          {"rotational_inertia", c.rotational_inertia},
          {"gravity", c.gravity}};
}

SuiteConfig suite_from_json(const json& j) {
  SuiteConfig c;
  Reader r(j, "suite");
  r.u64("seed", c.seed);
  r.integer("jobs", c.jobs);
  if (const json* v = r.find("weights")) {
    if (!v->is_array()) Reader::fail("suite.weights", "expected an array");
    c.weights.clear();
    for (const json& w : *v) c.weights.push_back(Reader::as_number(w, "suite.weights"));
  }
  if (const json* v = r.find("policies")) {
    if (!v->is_array()) Reader::fail("suite.policies", "expected an array");
    c.policies.clear();
    for (const json& p : *v) {
      if (!p.is_string()) Reader::fail("suite.policies", "expected strings");
      c.policies.push_back(policy_from_string(p.get<std::string>()));
    }
  }
  if (const json* v = r.find("base")) c.base = episode_from_json(*v);
  if (const json* v = r.find("scenarios")) {
    if (!v->is_array()) Reader::fail("suite.scenarios", "expected an array");
    std::vector<Scenario> list;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string path = "suite.scenarios[" + std::to_string(i) + "]";
      Reader s((*v)[i], path);
      Scenario sc;
      sc.name = "scenario_" + std::to_string(i);
      s.string("name", sc.name);
      s.number("weight", sc.weight);
      if (const json* rv = s.find("receiver")) {
        sc.receiver = receiver_from_json(*rv, path + ".receiver");
      } else {
        Reader::fail(path + ".receiver", "missing receiver");
      }
      s.finish();
      list.push_back(std::move(sc));
    }
    c.scenarios = std::move(list);
  }
  r.finish();
  return c;
}

json suite_to_json(const SuiteConfig& c) {
  json policies = json::array();
  for (ReleasePolicy p : c.policies) policies.push_back(to_string(p));
  json out = {{"seed", c.seed},
              {"jobs", c.jobs},
              {"weights", c.weights},
              {"policies", policies},
              {"base", episode_to_json(c.base)}};
  if (c.scenarios) {
    json list = json::array();
    for (const Scenario& s : *c.scenarios) {
      list.push_back({{"name", s.name},
                      {"weight", s.weight},
                      {"receiver", receiver_to_json(s.receiver)}});
    }
    out["scenarios"] = list;
  }
  return out;
}

json episode_summary_json(const EpisodeResult& r, const Provenance& prov) {
  const EpisodeStats& s = r.stats;
  json j = {{"name", r.name},
            {"policy", to_string(r.policy)},
            {"receiver", r.receiver},
            {"object_weight", r.object_weight},
            {"seed", r.seed},
            {"released", r.released},
            {"release_time", r.released ? json(r.release_time) : json(nullptr)},
            {"end_time", r.end_time},
            {"label", to_string(r.label)},
            {"measured_weight", s.measured_weight},
            {"peak_receiver_force", s.peak_receiver_force},
            {"peak_observed_force", s.peak_observed_force},
            {"max_command_speed", s.max_command_speed},
            {"min_info_gain", s.min_info_gain},
            {"info_gain_evaluations", s.info_gain_evaluations},
            {"planner_calls", s.planner_calls},
            {"probing_plans", s.probing_plans},
            {"one_sided_plans", s.one_sided_plans},
            {"one_sided_zero_offset", s.one_sided_zero_offset},
            {"probing_onset",
             s.probing_onset ? json(*s.probing_onset) : json(nullptr)},
            {"final_mean", vec_json<2>(r.final_model.mean)},
            {"final_cov_diag", vec_json<2>(Eigen::Vector2d(r.final_model.cov.diagonal()))},
            {"config_hash", prov.config_hash},
            {"version", prov.version}};
  return j;
}

namespace {

void write_header_comment(std::ostream& os, const Provenance& prov) {
  os << "# handover " << prov.version << " seed=" << prov.seed
     << " config_hash=" << prov.config_hash << "\n";
}

}  // namespace

void write_trace_csv(std::ostream& os, const EpisodeResult& r,
                     const Provenance& prov) {
  write_header_comment(os, prov);
  os << "t,q_x,q_y,q_z,v_x,v_y,v_z,u_x,u_y,u_z,f_x,f_y,f_z,"
        "m_up,m_down,s_up,s_down,contact,firm,phase,receiver_fz\n";
  for (const TraceRow& row : r.trace) {
    os << fmt(row.t);
    for (const Vec3* v : {&row.q, &row.v, &row.u, &row.f}) {
      for (int i = 0; i < 3; ++i) os << ',' << fmt((*v)(i));
    }
    os << ',' << fmt(row.mean(0)) << ',' << fmt(row.mean(1)) << ','
       << fmt(row.cov_diag(0)) << ',' << fmt(row.cov_diag(1)) << ','
       << (row.contact ? 1 : 0) << ',' << (row.firm ? 1 : 0) << ','
       << static_cast<int>(row.phase) << ',' << fmt(row.receiver_fz) << '\n';
  }
}

double band_half_width(const ContactModel& model, double u) {
  return 1.959963984540054 * std::sqrt(predict(model, u).variance);
}

void write_fit_csv(std::ostream& os, const EpisodeResult& r, double v_max,
                   int grid_points, const Provenance& prov) {
  if (grid_points < 2) throw ConfigError("fit grid needs >= 2 points");
  write_header_comment(os, prov);
  os << "kind,u,f,mean,lo,hi\n";
  for (const Sample& s : r.final_samples) {
    os << "sample," << fmt(s.u) << ',' << fmt(s.f) << ",,,\n";
  }
  for (int i = 0; i < grid_points; ++i) {
    const double u = -v_max + 2.0 * v_max * i / (grid_points - 1);
    const PredictiveDistribution p = predict(r.final_model, u);
    const double h = band_half_width(r.final_model, u);
    os << "fit," << fmt(u) << ",," << fmt(p.mean) << ',' << fmt(p.mean - h)
       << ',' << fmt(p.mean + h) << '\n';
  }
}

void write_suite_episodes_csv(std::ostream& os, const SuiteResult& r,
                              const std::string& version) {
  write_header_comment(os, {r.seed, r.config_hash, version});
  os << "index,name,policy,receiver,weight,seed,released,release_time,"
        "end_time,label,measured_weight,peak_receiver_force,"
        "peak_observed_force,max_command_speed,min_info_gain,"
        "one_sided_plans,one_sided_zero_offset\n";
  for (std::size_t i = 0; i < r.episodes.size(); ++i) {
    const EpisodeResult& e = r.episodes[i];
    os << i << ',' << e.name << ',' << to_string(e.policy) << ','
       << e.receiver << ',' << fmt(e.object_weight) << ',' << e.seed << ','
       << (e.released ? 1 : 0) << ','
       << (e.released ? fmt(e.release_time) : std::string()) << ','
       << fmt(e.end_time) << ',' << to_string(e.label) << ','
       << fmt(e.stats.measured_weight) << ','
       << fmt(e.stats.peak_receiver_force) << ','
       << fmt(e.stats.peak_observed_force) << ','
       << fmt(e.stats.max_command_speed) << ','
       << fmt(e.stats.min_info_gain) << ',' << e.stats.one_sided_plans << ','
       << e.stats.one_sided_zero_offset << '\n';
  }
}

void write_suite_summary_csv(std::ostream& os, const SuiteResult& r,
                             const std::string& version) {
  write_header_comment(os, {r.seed, r.config_hash, version});
  os << "policy,episodes,success,premature_release,no_release_timeout,"
        "success_rate,ci_lo,ci_hi,mean_release_time\n";
  for (const PolicyMetrics& m : r.metrics) {
    os << to_string(m.policy) << ',' << m.episodes << ',' << m.success << ','
       << m.premature << ',' << m.timeout << ',' << fmt(m.success_rate) << ','
       << fmt(m.ci.lo) << ',' << fmt(m.ci.hi) << ','
       << fmt(m.mean_release_time) << '\n';
  }
}

json suite_summary_json(const SuiteResult& r, const std::string& version) {
  json rows = json::array();
  for (const PolicyMetrics& m : r.metrics) {
    rows.push_back({{"policy", to_string(m.policy)},
                    {"episodes", m.episodes},
                    {"success", m.success},
                    {"premature_release", m.premature},
                    {"no_release_timeout", m.timeout},
                    {"success_rate", m.success_rate},
                    {"ci_95", {m.ci.lo, m.ci.hi}},
                    {"mean_release_time", m.mean_release_time}});
  }
  return {{"seed", r.seed},
          {"config_hash", r.config_hash},
          {"version", version},
          {"episodes", r.episodes.size()},
          {"policies", rows}};
}

}  // namespace handover
