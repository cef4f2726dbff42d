#ifndef TGRASP_CONFIG_HPP
#define TGRASP_CONFIG_HPP

// Every tunable of the library in one value type, with a JSON mapping.
// Files are merged over the built-in defaults, so a config only needs the
// keys it changes. Environment variables prefixed TGRASP_ override keys
// after the file: TGRASP_PLANT__TRACKING_FORCE_N=12 sets /plant/tracking_force_n.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tgrasp/contact.hpp"
#include "tgrasp/control.hpp"
#include "tgrasp/errors.hpp"
#include "tgrasp/fingertip.hpp"
#include "tgrasp/plant.hpp"
#include "tgrasp/signal.hpp"

extern char **environ;

namespace tgrasp {

using nlohmann::json;

struct KindConfig {
  SensorLayout layout;
  std::optional<double> zeta; // empty until calibrated
  int psi = 5;
  ContactSource source = ContactSource::Normalized;
  SlipCurve slip;
  std::vector<double> zeta_grid;

  ContactConfig contact() const {
    if (!zeta) throw ConfigError("contact threshold for '" + std::string(to_string(layout.kind)) + "' is not calibrated");
    return {*zeta, psi};
  }
};

struct HarnessTiming {
  double tick_hz = 50.0;
  double pickup_s = 1.0;
  double lift_s = 1.0;
  double dropoff_s = 1.0;
  double release_s = 0.5;
  double grasp_timeout_s = 10.0;

  double dt() const noexcept { return 1.0 / tick_hz; }
  std::int64_t tick_us() const noexcept { return static_cast<std::int64_t>(std::llround(1.0e6 / tick_hz)); }
};

struct SweepConfig {
  int repetitions = 10;
  int fail_threshold = 5; // failures out of `repetitions` that fail a mass
  double mass_step_g = 10.0;
  double max_added_g = 3000.0;
};

struct CalibrationConfig {
  double weight_deformation = 0.25;
  double weight_efficiency = 0.5;
  double weight_slip = 0.25;
  int repetitions = 10;
  std::string reference_object = "bottle";
  double standard_pull_n = 12.0;
};

struct SlipTestConfig {
  std::string object = "bottle";
  double force_step_n = 1.0;
  double max_force_n = 40.0;
};

struct Config {
  std::array<KindConfig, 2> kinds;
  NoiseConfig noise;
  double filter_retention = 0.8;
  double delta_max = 200.0;
  ControllerParams controller;
  JointLimits limits = JointLimits::uniform(0.1, 0.95);
  PlantParams plant;
  PerturbationProfile profile;
  double imu_sigma_deg = 0.1;
  HarnessTiming timing;
  SweepConfig sweep;
  CalibrationConfig calibration;
  SlipTestConfig slip_test;
  std::map<std::string, JointVector> pregrasps;
  std::map<std::string, std::string> pregrasp_for_object;
  std::vector<ObjectSpec> objects = object_library();

  Config() {
    KindConfig bio;
    bio.layout = default_layout(FingertipKind::BioTacSP);
    bio.zeta = 100.0;
    bio.psi = 5;
    bio.source = ContactSource::Normalized;
    bio.slip = {0.4, 0.02};
    for (int z = 0; z <= 200; z += 10) bio.zeta_grid.push_back(z);

    KindConfig wts;
    wts.layout = default_layout(FingertipKind::WtsFt);
    wts.zeta = 400.0;
    wts.psi = 3;
    wts.source = ContactSource::Raw;
    wts.slip = {0.6, 0.08};
    for (int z = 0; z <= 4000; z += 200) wts.zeta_grid.push_back(z);

    kinds = {bio, wts};

    pregrasps = {
        {"sphere_3_fingers", {0.80, 0.80, 0.80, 0.80, 0.80, 0.80}},
        {"large_diameter", {0.85, 0.85, 0.85, 0.85, 0.85, 0.85}},
        {"precision_disk", {0.75, 0.75, 0.75, 0.75, 0.75, 0.75}},
        {"precision_sphere", {0.78, 0.78, 0.78, 0.78, 0.78, 0.78}},
    };
    pregrasp_for_object = {
        {"can", "large_diameter"},
        {"bottle", "large_diameter"},
        {"tea_cup", "precision_sphere"},
        {"cube_box", "precision_disk"},
        {"plastic_cup", "sphere_3_fingers"},
    };
  }

  KindConfig &kind(FingertipKind k) { return kinds[static_cast<std::size_t>(k)]; }
  const KindConfig &kind(FingertipKind k) const { return kinds[static_cast<std::size_t>(k)]; }
  const ObjectSpec &object(std::string_view name) const { return find_object(objects, name); }

  void validate() const {
    for (const auto &k : kinds) {
      k.layout.validate();
      if (k.zeta) ContactConfig{*k.zeta, k.psi}.validate(k.layout.sensor_count);
    }
    controller.validate();
    limits.validate();
    for (const auto &o : objects) o.validate();
    for (const auto &[name, offsets] : pregrasps)
      if (!limits.contains(offsets)) throw ConfigError("pre-grasp '" + name + "' leaves the joint limits");
    if (!(filter_retention >= 0.0 && filter_retention <= 1.0)) throw ConfigError("filter retention outside [0, 1]");
    if (sweep.repetitions < 1 || sweep.fail_threshold < 1) throw ConfigError("sweep repetition counts must be >= 1");
  }
};

// ---- JSON mapping -----------------------------------------------------------

inline std::string to_string(ContactSource s) {
  switch (s) {
  case ContactSource::Normalized: return "normalized";
  case ContactSource::Filtered: return "filtered";
  case ContactSource::Raw: return "raw";
  }
  return "?";
}

inline ContactSource parse_contact_source(const std::string &s) {
  if (s == "normalized") return ContactSource::Normalized;
  if (s == "filtered") return ContactSource::Filtered;
  if (s == "raw") return ContactSource::Raw;
  throw ConfigError("unknown contact source '" + s + "'");
}

inline json layout_to_json(const SensorLayout &l) {
  json pos = json::array();
  for (const auto &p : l.positions) pos.push_back({p.u, p.v});
  return {{"sensor_count", l.sensor_count},
          {"scalar_channels", l.scalar_channels},
          {"positions", pos},
          {"surface", l.surface_shape == SurfaceShape::Curved ? "curved" : "flat"},
          {"delta_min_mm", l.delta_min_mm},
          {"gain", l.gain},
          {"friction_mu", l.friction_mu},
          {"edge_sensitive", l.edge_sensitive},
          {"patch_width_mm", l.patch_width_mm},
          {"mass_g", l.mass_g}};
}

inline void layout_from_json(const json &j, SensorLayout &l) {
  l.sensor_count = j.at("sensor_count").get<int>();
  l.scalar_channels = j.at("scalar_channels").get<int>();
  l.positions.clear();
  for (const auto &p : j.at("positions")) l.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  l.surface_shape = j.at("surface").get<std::string>() == "curved" ? SurfaceShape::Curved : SurfaceShape::Flat;
  l.delta_min_mm = j.at("delta_min_mm").get<double>();
  l.gain = j.at("gain").get<double>();
  l.friction_mu = j.at("friction_mu").get<double>();
  l.edge_sensitive = j.at("edge_sensitive").get<bool>();
  l.patch_width_mm = j.at("patch_width_mm").get<double>();
  l.mass_g = j.at("mass_g").get<double>();
}

inline json object_to_json(const ObjectSpec &o) {
  return {{"name", o.name},
          {"shape", std::string(to_string(o.shape))},
          {"dimensions_cm", o.dimensions_cm},
          {"base_mass_g", o.base_mass_g},
          {"capacity_total_g", o.capacity_total_g},
          {"deformability_mm_per_n", o.deformability_mm_per_n},
          {"crush_force_n", o.crush_force_n},
          {"surface_friction", o.surface_friction},
          {"effective_radius_cm", o.effective_radius_cm},
          {"face_tilt", o.face_tilt},
          {"engagement", o.engagement},
          {"flat_engagement_ratio", o.flat_engagement_ratio},
          {"edge_contact_above_g", o.edge_contact_above_g},
          {"palm_support", o.palm_support}};
}

inline ObjectSpec object_from_json(const json &j) {
  ObjectSpec o;
  o.name = j.at("name").get<std::string>();
  o.shape = parse_shape(j.at("shape").get<std::string>());
  o.dimensions_cm = j.at("dimensions_cm").get<std::array<double, 3>>();
  o.base_mass_g = j.at("base_mass_g").get<double>();
  o.capacity_total_g = j.at("capacity_total_g").get<double>();
  o.deformability_mm_per_n = j.at("deformability_mm_per_n").get<double>();
  o.crush_force_n = j.at("crush_force_n").get<double>();
  o.surface_friction = j.at("surface_friction").get<double>();
  o.effective_radius_cm = j.at("effective_radius_cm").get<double>();
  o.face_tilt = j.at("face_tilt").get<double>();
  o.engagement = j.at("engagement").get<double>();
  o.flat_engagement_ratio = j.at("flat_engagement_ratio").get<double>();
  o.edge_contact_above_g = j.at("edge_contact_above_g").get<double>();
  o.palm_support = j.at("palm_support").get<bool>();
  return o;
}

inline json to_json(const Config &c) {
  json j;
  for (const auto &k : c.kinds) {
    json kj = {{"layout", layout_to_json(k.layout)},
               {"zeta", k.zeta ? json(*k.zeta) : json(nullptr)},
               {"psi", k.psi},
               {"contact_source", to_string(k.source)},
               {"slip_alpha", k.slip.alpha},
               {"slip_beta", k.slip.beta},
               {"zeta_grid", k.zeta_grid}};
    j["kinds"][std::string(to_string(k.layout.kind))] = kj;
  }
  j["noise"] = {{"sigma_counts", c.noise.sigma_counts},
                {"pac_baseline", c.noise.pac_baseline},
                {"tac_baseline", c.noise.tac_baseline},
                {"tdc_baseline", c.noise.tdc_baseline}};
  j["filter"] = {{"retention", c.filter_retention}, {"delta_max", c.delta_max}};
  j["controller"] = {{"kp_close", c.controller.kp_close}, {"kp_hold", c.controller.kp_hold}};
  j["limits"] = {{"min", c.limits.min}, {"max", c.limits.max}};
  const auto &p = c.plant;
  j["plant"] = {{"closed_radius_mm", p.closed_radius_mm},
                {"stroke_mm", p.stroke_mm},
                {"joint_speed", p.joint_speed},
                {"tip_stiffness_n_per_mm", p.tip_stiffness_n_per_mm},
                {"tracking_force_n", p.tracking_force_n},
                {"sponge_stiffness_n_per_mm", p.sponge_stiffness_n_per_mm},
                {"curved_patch_radius", p.curved_patch_radius},
                {"flat_line_halfwidth", p.flat_line_halfwidth},
                {"reference_force_n", p.reference_force_n},
                {"slip_rate_mm_per_ns", p.slip_rate_mm_per_ns},
                {"drop_threshold_mm", p.drop_threshold_mm},
                {"placement_jitter_mm", p.placement_jitter_mm},
                {"jitter_engagement_loss", p.jitter_engagement_loss},
                {"drift_rate_biotac", p.drift_rate_biotac},
                {"drift_rate_wts", p.drift_rate_wts}};
  j["profile"] = {{"base_speed", c.profile.base_speed},
                  {"peak_speed", c.profile.peak_speed},
                  {"amplitude_deg", c.profile.amplitude_deg},
                  {"ramp_s", c.profile.ramp_s},
                  {"lever_arm_m", c.profile.lever_arm_m}};
  j["imu"] = {{"sigma_deg", c.imu_sigma_deg}};
  j["timing"] = {{"tick_hz", c.timing.tick_hz},     {"pickup_s", c.timing.pickup_s},
                 {"lift_s", c.timing.lift_s},       {"dropoff_s", c.timing.dropoff_s},
                 {"release_s", c.timing.release_s}, {"grasp_timeout_s", c.timing.grasp_timeout_s}};
  j["sweep"] = {{"repetitions", c.sweep.repetitions},
                {"fail_threshold", c.sweep.fail_threshold},
                {"mass_step_g", c.sweep.mass_step_g},
                {"max_added_g", c.sweep.max_added_g}};
  j["calibration"] = {{"weight_deformation", c.calibration.weight_deformation},
                      {"weight_efficiency", c.calibration.weight_efficiency},
                      {"weight_slip", c.calibration.weight_slip},
                      {"repetitions", c.calibration.repetitions},
                      {"reference_object", c.calibration.reference_object},
                      {"standard_pull_n", c.calibration.standard_pull_n}};
  j["slip_test"] = {{"object", c.slip_test.object},
                    {"force_step_n", c.slip_test.force_step_n},
                    {"max_force_n", c.slip_test.max_force_n}};
  j["pregrasps"] = c.pregrasps;
  j["pregrasp_for_object"] = c.pregrasp_for_object;
  json objs = json::array();
  for (const auto &o : c.objects) objs.push_back(object_to_json(o));
  j["objects"] = objs;
  return j;
}

inline Config config_from_json(const json &j) {
  Config c;
  try {
    for (auto kind : {FingertipKind::BioTacSP, FingertipKind::WtsFt}) {
      const json &kj = j.at("kinds").at(std::string(to_string(kind)));
      KindConfig &k = c.kind(kind);
      layout_from_json(kj.at("layout"), k.layout);
      k.zeta = kj.at("zeta").is_null() ? std::nullopt : std::optional<double>(kj.at("zeta").get<double>());
      k.psi = kj.at("psi").get<int>();
      k.source = parse_contact_source(kj.at("contact_source").get<std::string>());
      k.slip = {kj.at("slip_alpha").get<double>(), kj.at("slip_beta").get<double>()};
      k.zeta_grid = kj.at("zeta_grid").get<std::vector<double>>();
    }
    const json &n = j.at("noise");
    c.noise = {n.at("sigma_counts").get<double>(), n.at("pac_baseline").get<std::uint16_t>(),
               n.at("tac_baseline").get<std::uint16_t>(), n.at("tdc_baseline").get<std::uint16_t>()};
    c.filter_retention = j.at("filter").at("retention").get<double>();
    c.delta_max = j.at("filter").at("delta_max").get<double>();
    c.controller.kp_close = j.at("controller").at("kp_close").get<double>();
    c.controller.kp_hold = j.at("controller").at("kp_hold").get<double>();
    c.limits.min = j.at("limits").at("min").get<JointVector>();
    c.limits.max = j.at("limits").at("max").get<JointVector>();
    const json &p = j.at("plant");
    auto &pp = c.plant;
    pp.closed_radius_mm = p.at("closed_radius_mm").get<double>();
    pp.stroke_mm = p.at("stroke_mm").get<double>();
    pp.joint_speed = p.at("joint_speed").get<double>();
    pp.tip_stiffness_n_per_mm = p.at("tip_stiffness_n_per_mm").get<double>();
    pp.tracking_force_n = p.at("tracking_force_n").get<double>();
    pp.sponge_stiffness_n_per_mm = p.at("sponge_stiffness_n_per_mm").get<double>();
    pp.curved_patch_radius = p.at("curved_patch_radius").get<double>();
    pp.flat_line_halfwidth = p.at("flat_line_halfwidth").get<double>();
    pp.reference_force_n = p.at("reference_force_n").get<double>();
    pp.slip_rate_mm_per_ns = p.at("slip_rate_mm_per_ns").get<double>();
    pp.drop_threshold_mm = p.at("drop_threshold_mm").get<double>();
    pp.placement_jitter_mm = p.at("placement_jitter_mm").get<double>();
    pp.jitter_engagement_loss = p.at("jitter_engagement_loss").get<double>();
    pp.drift_rate_biotac = p.at("drift_rate_biotac").get<double>();
    pp.drift_rate_wts = p.at("drift_rate_wts").get<double>();
    const json &pr = j.at("profile");
    c.profile = {pr.at("base_speed").get<double>(), pr.at("peak_speed").get<double>(),
                 pr.at("amplitude_deg").get<double>(), pr.at("ramp_s").get<double>(),
                 pr.at("lever_arm_m").get<double>()};
    c.imu_sigma_deg = j.at("imu").at("sigma_deg").get<double>();
    const json &t = j.at("timing");
    c.timing = {t.at("tick_hz").get<double>(),   t.at("pickup_s").get<double>(),
                t.at("lift_s").get<double>(),    t.at("dropoff_s").get<double>(),
                t.at("release_s").get<double>(), t.at("grasp_timeout_s").get<double>()};
    const json &s = j.at("sweep");
    c.sweep = {s.at("repetitions").get<int>(), s.at("fail_threshold").get<int>(), s.at("mass_step_g").get<double>(),
               s.at("max_added_g").get<double>()};
    const json &cal = j.at("calibration");
    c.calibration = {cal.at("weight_deformation").get<double>(), cal.at("weight_efficiency").get<double>(),
                     cal.at("weight_slip").get<double>(),        cal.at("repetitions").get<int>(),
                     cal.at("reference_object").get<std::string>(), cal.at("standard_pull_n").get<double>()};
    const json &st = j.at("slip_test");
    c.slip_test = {st.at("object").get<std::string>(), st.at("force_step_n").get<double>(),
                   st.at("max_force_n").get<double>()};
    c.pregrasps = j.at("pregrasps").get<std::map<std::string, JointVector>>();
    c.pregrasp_for_object = j.at("pregrasp_for_object").get<std::map<std::string, std::string>>();
    c.objects.clear();
    for (const auto &o : j.at("objects")) c.objects.push_back(object_from_json(o));
  } catch (const json::exception &e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

// ---- loading ----------------------------------------------------------------

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

/// Apply TGRASP_A__B__C=value pairs as /a/b/c = value (value parsed as JSON, else a string).
inline void apply_env_overrides(json &j, const std::vector<std::pair<std::string, std::string>> &vars) {
  constexpr std::string_view prefix = "TGRASP_";
  for (const auto &[name, value] : vars) {
    if (name.rfind(prefix, 0) != 0) continue;
    std::string path = lower(name.substr(prefix.size()));
    std::string pointer;
    std::size_t pos = 0;
    while (true) {
      const std::size_t next = path.find("__", pos);
      pointer += "/" + path.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      if (next == std::string::npos) break;
      pos = next + 2;
    }
    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value;
    try {
      j[json::json_pointer(pointer)] = parsed;
    } catch (const json::exception &e) {
      throw ConfigError("bad override " + name + ": " + e.what());
    }
  }
}

inline std::vector<std::pair<std::string, std::string>> process_environment() {
  std::vector<std::pair<std::string, std::string>> out;
  for (char **e = environ; e && *e; ++e) {
    std::string kv(*e);
    const auto eq = kv.find('=');
    if (eq != std::string::npos) out.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return out;
}

/// Defaults, then the file (if any) as a merge patch, then TGRASP_* overrides.
inline Config load_config(const std::string &path = {},
                          const std::vector<std::pair<std::string, std::string>> &env = process_environment()) {
  json j = to_json(Config{});
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json patch = json::parse(in, nullptr, false);
    if (patch.is_discarded()) throw ConfigError("config file '" + path + "' is not valid JSON");
    j.merge_patch(patch);
  }
  apply_env_overrides(j, env);
  return config_from_json(j);
}

} // namespace tgrasp

#endif // TGRASP_CONFIG_HPP
