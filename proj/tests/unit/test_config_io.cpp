#include <gtest/gtest.h>

#include <sstream>

#include "handover/config_io.hpp"
#include "handover/errors.hpp"

using namespace handover;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ParseJson, ReportsLineAndColumn) {
  const std::string msg =
      error_of([] { parse_json_text("{\n  \"seed\": 4,\n  oops\n}", "x.json"); });
  EXPECT_NE(msg.find("x.json"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(EpisodeJson, EmptyObjectGivesDefaults) {
  const EpisodeConfig cfg = episode_from_json(nlohmann::json::object());
  EXPECT_EQ(cfg.timeout, EpisodeConfig{}.timeout);
  EXPECT_EQ(cfg.policy, ReleasePolicy::kActive);
}

TEST(EpisodeJson, UnknownKeyNamesThePath) {
  const std::string msg = error_of([] {
    episode_from_json(nlohmann::json::parse(R"({"object": {"wieght": 2}})"));
  });
  EXPECT_NE(msg.find("object.wieght"), std::string::npos) << msg;
}

TEST(EpisodeJson, TypeMismatchNamesTheKey) {
  const std::string msg = error_of(
      [] { episode_from_json(nlohmann::json::parse(R"({"timeout": "long"})")); });
  EXPECT_NE(msg.find("timeout"), std::string::npos) << msg;
}

TEST(EpisodeJson, UnknownReceiverKind) {
  EXPECT_THROW(episode_from_json(nlohmann::json::parse(
                   R"({"receiver": {"kind": "Telepathy"}})")),
               ConfigError);
}

TEST(EpisodeJson, RoundTrip) {
  EpisodeConfig cfg;
  cfg.name = "rt";
  cfg.seed = 77;
  cfg.policy = ReleasePolicy::kWeightThr;
  cfg.motion = MotionMode::kPassiveApproach;
  cfg.object.weight = 5.5;
  LateHesitantGrasp h;
  h.touch.preload = 1.25;
  h.grasp.onset = 7.0;
  h.grasp.pull = 0.3;
  cfg.receiver = h;
  cfg.planner.c_reg = 12.5;
  const nlohmann::json j = episode_to_json(cfg);
  const EpisodeConfig back = episode_from_json(j);
  EXPECT_EQ(episode_to_json(back).dump(), j.dump());
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(receiver_kind(back.receiver), "LateHesitantGrasp");
}

TEST(SuiteJson, RoundTripAndEmptyMatrix) {
  SuiteConfig cfg;
  cfg.seed = 9;
  cfg.weights = {1.0, 2.0};
  const SuiteConfig back = suite_from_json(suite_to_json(cfg));
  EXPECT_EQ(back.seed, 9u);
  EXPECT_EQ(back.weights, cfg.weights);
  EXPECT_THROW(suite_from_json(nlohmann::json::parse(R"({"weights": []})")).validate(),
               ConfigError);
  EXPECT_THROW(suite_from_json(nlohmann::json::parse(R"({"scenarios": []})")).validate(),
               ConfigError);
}

TEST(Strings, PolicyAndMotionNames) {
  EXPECT_EQ(policy_from_string("FORCE_THR"), ReleasePolicy::kForceThr);
  EXPECT_EQ(motion_from_string("passive_approach"), MotionMode::kPassiveApproach);
  EXPECT_THROW(policy_from_string("MAYBE"), ConfigError);
}

TEST(Format, RoundTripsDoubles) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) {
    EXPECT_EQ(std::stod(fmt(x)), x);
  }
}

TEST(TraceCsv, HeaderAndProvenance) {
  EpisodeResult r;
  r.trace.push_back(TraceRow{});
  std::ostringstream os;
  write_trace_csv(os, r, {5, "abc", "1.0.0"});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# handover", 0), 0u) << line;
  EXPECT_NE(line.find("seed=5"), std::string::npos);
  EXPECT_NE(line.find("config_hash=abc"), std::string::npos);
  std::getline(in, line);
  EXPECT_EQ(line,
            "t,q_x,q_y,q_z,v_x,v_y,v_z,u_x,u_y,u_z,f_x,f_y,f_z,m_up,m_down,"
            "s_up,s_down,contact,firm,phase,receiver_fz");
}

TEST(BandHalfWidth, GrowsWithInputMagnitude) {
  const ContactModel m{{1.0, 1.0}, 4.0 * Eigen::Matrix2d::Identity()};
  EXPECT_NEAR(band_half_width(m, 0.1), 1.96 * 0.2, 1e-3);
  EXPECT_GT(band_half_width(m, 0.1), band_half_width(m, 0.05));
}
