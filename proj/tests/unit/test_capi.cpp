#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "handover/handover.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("handover_capi_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(CApi, VersionIsNonEmpty) { EXPECT_GT(std::string(ho_version()).size(), 0u); }

TEST(CApi, WindowMatchesBatch) {
  ho_window* w = nullptr;
  ASSERT_EQ(ho_window_create(nullptr, 200, 1000, &w), HO_OK);
  double u[300], f[300];
  for (int i = 0; i < 300; ++i) {
    u[i] = 0.001 * ((i * 37) % 200 - 100);
    f[i] = 0.01 * ((i * 11) % 50);
    ASSERT_EQ(ho_window_push(w, u[i], f[i], 0.005 * i), HO_OK);
  }
  size_t n = 0;
  ASSERT_EQ(ho_window_size(w, &n), HO_OK);
  EXPECT_EQ(n, 200u);
  double m[2], c[4], bm[2], bc[4];
  ASSERT_EQ(ho_window_posterior(w, m, c), HO_OK);
  ASSERT_EQ(ho_batch_posterior(nullptr, u + 100, f + 100, 200, bm, bc), HO_OK);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(m[i], bm[i], 1e-9);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(c[i], bc[i], 1e-9);
  ho_window_destroy(w);
}

TEST(CApi, InvalidArgumentsReportErrors) {
  ho_window* w = nullptr;
  EXPECT_EQ(ho_window_create(nullptr, 0, 1000, &w), HO_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(w, nullptr);
  EXPECT_EQ(ho_window_create(nullptr, 10, 10, nullptr), HO_ERR_INVALID_ARGUMENT);
  EXPECT_GT(std::string(ho_last_error()).size(), 0u);
  ASSERT_EQ(ho_window_create(nullptr, 10, 10, &w), HO_OK);
  EXPECT_EQ(ho_window_push(w, 0.1, 1.0, 1.0), HO_OK);
  EXPECT_EQ(ho_window_push(w, 0.1, 1.0, 0.5), HO_ERR_INVALID_ARGUMENT);
  ho_window_destroy(w);
  ho_window_destroy(nullptr);
}

TEST(CApi, MalformedPriorIsConfigError) {
  ho_window* w = nullptr;
  EXPECT_EQ(ho_window_create("{\"mean\": [1,", 10, 10, &w), HO_ERR_CONFIG);
  EXPECT_NE(std::string(ho_last_error()).find("line"), std::string::npos);
}

TEST(CApi, FirmnessCheck) {
  const double mean[2] = {20.0, 20.0};
  const double tight[4] = {1e-12, 0.0, 0.0, 1e-12};
  const double prior[4] = {100.0, 0.0, 0.0, 100.0};
  int firm = -1;
  ASSERT_EQ(ho_firmness_check(mean, tight, 0.99, 0.1, 2.0, &firm), HO_OK);
  EXPECT_EQ(firm, 1);
  const double zero[2] = {0.0, 0.0};
  ASSERT_EQ(ho_firmness_check(zero, prior, 0.99, 0.1, 2.0, &firm), HO_OK);
  EXPECT_EQ(firm, 0);
  EXPECT_EQ(ho_firmness_check(zero, prior, 1.5, 0.1, 2.0, &firm),
            HO_ERR_INVALID_ARGUMENT);
}

TEST(CApi, EpisodeRunAndOutputs) {
  const char* cfg =
      R"({"seed": 3, "timeout": 6, "object": {"weight": 2.0},
          "receiver": {"kind": "FirmGrasp", "stiffness": 420, "damping": 36,
                       "onset": 2.0, "support_fraction": 0.5}})";
  ho_episode_options opts{};
  opts.record_trace = 1;
  ho_episode* e = nullptr;
  ASSERT_EQ(ho_episode_run(cfg, &opts, &e), HO_OK) << ho_last_error();
  EXPECT_STREQ(ho_episode_label(e), "SUCCESS");
  char* summary = nullptr;
  ASSERT_EQ(ho_episode_summary_json(e, &summary), HO_OK);
  EXPECT_NE(std::string(summary).find("\"seed\":3"), std::string::npos)
      << summary;
  ho_string_free(summary);

  const fs::path dir = scratch("episode") / "nested";
  const std::string trace = (dir / "trace.csv").string();
  const std::string fit = (dir / "fit.csv").string();
  ASSERT_EQ(ho_episode_write_trace(e, trace.c_str()), HO_OK) << ho_last_error();
  ASSERT_EQ(ho_episode_write_fit(e, fit.c_str(), 21), HO_OK);
  EXPECT_TRUE(fs::exists(trace));
  EXPECT_TRUE(fs::exists(fit));
  double up = 0.0, down = 0.0;
  ASSERT_EQ(ho_episode_band_widths(e, -1.0, &up, &down), HO_OK);
  EXPECT_GT(up, 0.0);
  EXPECT_GT(down, 0.0);
  ho_episode_destroy(e);
}

TEST(CApi, EpisodeSeedOverride) {
  ho_episode_options opts{};
  opts.override_seed = 1;
  opts.seed = 99;
  ho_episode* e = nullptr;
  ASSERT_EQ(ho_episode_run(R"({"timeout": 3, "receiver": {"kind": "NoContact"}})",
                           &opts, &e),
            HO_OK);
  char* summary = nullptr;
  ASSERT_EQ(ho_episode_summary_json(e, &summary), HO_OK);
  EXPECT_NE(std::string(summary).find("\"seed\":99"), std::string::npos);
  ho_string_free(summary);
  ho_episode_destroy(e);
}

TEST(CApi, BadEpisodeConfigs) {
  ho_episode* e = nullptr;
  EXPECT_EQ(ho_episode_run("{", nullptr, &e), HO_ERR_CONFIG);
  EXPECT_EQ(ho_episode_run(R"({"bogus": 1})", nullptr, &e), HO_ERR_CONFIG);
  EXPECT_NE(std::string(ho_last_error()).find("bogus"), std::string::npos);
  EXPECT_EQ(ho_episode_run("{}", nullptr, nullptr), HO_ERR_INVALID_ARGUMENT);
}

TEST(CApi, SuiteEmptyMatrixIsConfigError) {
  ho_suite* s = nullptr;
  EXPECT_EQ(ho_suite_run(R"({"weights": []})", nullptr, &s), HO_ERR_CONFIG);
}

TEST(CApi, SuiteWritesTables) {
  ho_suite_options opts{};
  opts.jobs = 2;
  ho_suite* s = nullptr;
  ASSERT_EQ(ho_suite_run(R"({"seed": 5, "weights": [2.0]})", &opts, &s), HO_OK)
      << ho_last_error();
  const fs::path dir = scratch("suite");
  ASSERT_EQ(ho_suite_write(s, dir.string().c_str()), HO_OK);
  for (const char* f : {"episodes.csv", "summary.csv", "summary.json",
                        "episodes.jsonl"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  char* text = nullptr;
  ASSERT_EQ(ho_suite_summary_text(s, &text), HO_OK);
  EXPECT_NE(std::string(text).find("ACTIVE"), std::string::npos);
  ho_string_free(text);
  ho_suite_destroy(s);
}

TEST(CApi, OracleCheckAndFaultInjection) {
  ho_oracle_options o;
  ho_oracle_options_default(&o);
  o.instances = 200;
  o.sequences = 5;
  o.sequence_length = 400;
  ho_oracle_report* r = nullptr;
  ASSERT_EQ(ho_oracle_check(&o, &r), HO_OK);
  int passed = 0;
  ASSERT_EQ(ho_oracle_report_passed(r, &passed), HO_OK);
  EXPECT_EQ(passed, 1);
  ho_oracle_report_destroy(r);

  o.inject_fault = 1;
  ASSERT_EQ(ho_oracle_check(&o, &r), HO_OK);
  ASSERT_EQ(ho_oracle_report_passed(r, &passed), HO_OK);
  EXPECT_EQ(passed, 0);
  const fs::path dir = scratch("oracle");
  ASSERT_EQ(ho_oracle_report_write(r, dir.string().c_str()), HO_OK);
  ho_oracle_report_destroy(r);

  // Replaying the saved disagreements without the fault clears them.
  o.inject_fault = 0;
  const std::string report = (dir / "oracle_report.json").string();
  ASSERT_EQ(ho_oracle_replay(report.c_str(), &o, &r), HO_OK) << ho_last_error();
  ASSERT_EQ(ho_oracle_report_passed(r, &passed), HO_OK);
  EXPECT_EQ(passed, 1);
  ho_oracle_report_destroy(r);
}
