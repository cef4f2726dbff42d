#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tgrasp/config.hpp"

using namespace tgrasp;

namespace {
const std::vector<std::pair<std::string, std::string>> kNoEnv;

std::string temp_file(const std::string &name, const std::string &content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}
} // namespace

TEST(Config, DefaultsValidate) {
  const Config c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.kind(FingertipKind::BioTacSP).psi, 5);
  EXPECT_EQ(c.kind(FingertipKind::WtsFt).psi, 3);
  EXPECT_EQ(c.kind(FingertipKind::BioTacSP).layout.delta_min_mm, 5.0);
  EXPECT_EQ(c.kind(FingertipKind::WtsFt).layout.delta_min_mm, 30.0);
  EXPECT_GT(c.kind(FingertipKind::BioTacSP).layout.friction_mu, c.kind(FingertipKind::WtsFt).layout.friction_mu);
  EXPECT_EQ(c.filter_retention, 0.8);
  EXPECT_EQ(c.controller.kp_close, 0.04);
  EXPECT_EQ(c.controller.kp_hold, 0.01);
}

TEST(Config, JsonRoundTripIsLossless) {
  const Config c;
  const json j = to_json(c);
  EXPECT_EQ(to_json(config_from_json(j)), j);
  EXPECT_EQ(to_json(config_from_json(json::parse(j.dump()))), j);
}

TEST(Config, MissingThresholdMeansUncalibrated) {
  json j = to_json(Config{});
  j["kinds"]["wts"]["zeta"] = nullptr;
  const Config c = config_from_json(j);
  EXPECT_THROW(c.kind(FingertipKind::WtsFt).contact(), ConfigError);
  EXPECT_NO_THROW(c.kind(FingertipKind::BioTacSP).contact());
}

TEST(Config, InvalidValuesAreRejected) {
  json j = to_json(Config{});
  j["kinds"]["biotac"]["psi"] = 0;
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = to_json(Config{});
  j["filter"]["retention"] = 1.5;
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = to_json(Config{});
  j["pregrasps"]["large_diameter"] = {2.0, 0.5, 0.5, 0.5, 0.5, 0.5};
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = to_json(Config{});
  j["controller"]["kp_close"] = "fast";
  EXPECT_THROW(config_from_json(j), ConfigError);
}

TEST(Config, FilePatchAndEnvironmentOverrides) {
  const auto path = temp_file("tgrasp_cfg_test.json", R"({"sweep": {"repetitions": 4}, "timing": {"tick_hz": 100}})");
  const Config c = load_config(path, {{"TGRASP_CONTROLLER__KP_HOLD", "0.02"},
                                      {"TGRASP_KINDS__WTS__CONTACT_SOURCE", "normalized"},
                                      {"UNRELATED", "1"}});
  EXPECT_EQ(c.sweep.repetitions, 4);
  EXPECT_EQ(c.timing.tick_hz, 100.0);
  EXPECT_EQ(c.controller.kp_hold, 0.02);
  EXPECT_EQ(c.kind(FingertipKind::WtsFt).source, ContactSource::Normalized);
  EXPECT_EQ(c.sweep.mass_step_g, 10.0);
  std::remove(path.c_str());
}

TEST(Config, LoadErrors) {
  EXPECT_THROW(load_config("/nonexistent/tgrasp.json", kNoEnv), ConfigError);
  const auto path = temp_file("tgrasp_bad.json", "{not json");
  EXPECT_THROW(load_config(path, kNoEnv), ConfigError);
  std::remove(path.c_str());
}

TEST(Config, PregraspMappingRoundTrips) {
  const Config c = config_from_json(to_json(Config{}));
  EXPECT_EQ(c.pregrasp_for_object.at("can"), "large_diameter");
  EXPECT_EQ(c.pregrasp_for_object.at("bottle"), "large_diameter");
  EXPECT_EQ(c.pregrasp_for_object.at("tea_cup"), "precision_sphere");
  EXPECT_EQ(c.pregrasp_for_object.at("cube_box"), "precision_disk");
  EXPECT_EQ(c.pregrasp_for_object.at("plastic_cup"), "sphere_3_fingers");
  for (const auto &[name, offsets] : c.pregrasps) EXPECT_TRUE(c.limits.contains(offsets)) << name;
}

TEST(Config, CommittedCalibrationMatchesDefaults) {
  std::ifstream in(std::string(TGRASP_SOURCE_DIR) + "/config/calibrated-defaults.json");
  ASSERT_TRUE(in) << "config/calibrated-defaults.json is missing";
  const json committed = json::parse(in);
  EXPECT_EQ(committed, to_json(Config{}));
}
