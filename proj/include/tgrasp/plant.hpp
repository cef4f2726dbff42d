#ifndef TGRASP_PLANT_HPP
#define TGRASP_PLANT_HPP

// Simulated world: a three-finger hand reduced to per-finger 1-D closure
// against the test objects, friction hold with slip, and the shake profile
// as seen by the IMU.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tgrasp/contact.hpp"
#include "tgrasp/control.hpp"
#include "tgrasp/errors.hpp"
#include "tgrasp/fingertip.hpp"
#include "tgrasp/random.hpp"

namespace tgrasp {

inline constexpr double kGravity = 9.81;

enum class ObjectShape : std::uint8_t { Cylinder, Cuboid, Frustum, Irregular };

inline std::string_view to_string(ObjectShape s) {
  switch (s) {
  case ObjectShape::Cylinder: return "cylinder";
  case ObjectShape::Cuboid: return "cuboid";
  case ObjectShape::Frustum: return "frustum";
  case ObjectShape::Irregular: return "irregular";
  }
  return "?";
}

inline ObjectShape parse_shape(std::string_view s) {
  if (s == "cylinder") return ObjectShape::Cylinder;
  if (s == "cuboid") return ObjectShape::Cuboid;
  if (s == "frustum") return ObjectShape::Frustum;
  if (s == "irregular") return ObjectShape::Irregular;
  throw LookupError("unknown object shape '" + std::string(s) + "'");
}

struct ObjectSpec {
  std::string name;
  ObjectShape shape = ObjectShape::Cylinder;
  std::array<double, 3> dimensions_cm{}; // as listed for the object (frustum: top dia, bottom dia, height)
  double base_mass_g = 0.0;
  double added_mass_g = 0.0;
  double capacity_total_g = 0.0;       // heaviest fill the object can take; 0 = unbounded
  double deformability_mm_per_n = 0.0; // 0 = rigid
  double crush_force_n = 0.0;          // wall yield force; 0 = does not yield
  double surface_friction = 0.7;
  double effective_radius_cm = 4.0;
  double face_tilt = 0.0;           // non-parallel flat faces: pressure gradient along the pad
  double engagement = 1.0;          // fraction of grip force that a conforming pad turns into friction
  double flat_engagement_ratio = 1.0; // extra factor for flat pads, in (0, 1]
  double edge_contact_above_g = 0.0;  // total mass above which flat pads land on their edges; 0 = never
  bool palm_support = false;

  double total_mass_g() const noexcept { return base_mass_g + added_mass_g; }
  bool has_flat_faces() const noexcept { return shape == ObjectShape::Cuboid; }

  void validate() const {
    if (base_mass_g < 0.0 || added_mass_g < 0.0) throw ConfigError(name + ": masses must be >= 0");
    for (double d : dimensions_cm)
      if (!(d > 0.0)) throw ConfigError(name + ": dimensions must be positive");
    if (deformability_mm_per_n < 0.0) throw ConfigError(name + ": deformability must be >= 0");
    if (!(surface_friction > 0.0)) throw ConfigError(name + ": surface friction must be > 0");
    if (!(engagement > 0.0 && engagement <= 1.0) || !(flat_engagement_ratio > 0.0 && flat_engagement_ratio <= 1.0))
      throw ConfigError(name + ": engagement factors must lie in (0, 1]");
  }
};

/// The five grasp objects. Engagement and friction values are the committed
/// calibration (see `tgrasp calibrate-plant`).
inline std::vector<ObjectSpec> object_library() {
  std::vector<ObjectSpec> lib;

  ObjectSpec cup;
  cup.name = "plastic_cup";
  cup.shape = ObjectShape::Frustum;
  cup.dimensions_cm = {9.5, 5.3, 12.5};
  cup.base_mass_g = 10.0;
  cup.deformability_mm_per_n = 0.8;
  cup.crush_force_n = 6.0;
  cup.surface_friction = 0.6;
  cup.effective_radius_cm = (9.5 + 5.3) / 4.0;
  cup.engagement = 0.3256;
  cup.flat_engagement_ratio = 0.9922;
  lib.push_back(cup);

  ObjectSpec tea;
  tea.name = "tea_cup";
  tea.shape = ObjectShape::Cylinder;
  tea.dimensions_cm = {8.0, 8.0, 8.0};
  tea.base_mass_g = 200.0;
  tea.surface_friction = 0.7;
  tea.effective_radius_cm = 4.0;
  tea.engagement = 0.2384;
  tea.flat_engagement_ratio = 0.9344;
  lib.push_back(tea);

  ObjectSpec can;
  can.name = "can";
  can.shape = ObjectShape::Cylinder;
  can.dimensions_cm = {7.9, 7.9, 25.9};
  can.base_mass_g = 20.0;
  can.surface_friction = 0.5;
  can.effective_radius_cm = 7.9 / 2.0;
  can.engagement = 0.5654;
  can.flat_engagement_ratio = 0.356;
  lib.push_back(can);

  ObjectSpec bottle;
  bottle.name = "bottle";
  bottle.shape = ObjectShape::Irregular;
  bottle.dimensions_cm = {7.3, 8.7, 10.0};
  bottle.base_mass_g = 20.0;
  bottle.capacity_total_g = 510.0;
  bottle.deformability_mm_per_n = 0.3;
  bottle.surface_friction = 0.8;
  bottle.effective_radius_cm = (7.3 + 8.7) / 4.0;
  bottle.engagement = 0.3512;
  bottle.flat_engagement_ratio = 0.8989;
  bottle.edge_contact_above_g = 500.0;
  bottle.palm_support = true;
  lib.push_back(bottle);

  ObjectSpec cube;
  cube.name = "cube_box";
  cube.shape = ObjectShape::Cuboid;
  cube.dimensions_cm = {8.0, 8.0, 8.0};
  cube.base_mass_g = 100.0;
  cube.surface_friction = 0.6;
  cube.effective_radius_cm = 4.0;
  cube.face_tilt = 0.5;
  cube.engagement = 0.2504;
  cube.flat_engagement_ratio = 0.7796;
  lib.push_back(cube);

  return lib;
}

inline const ObjectSpec &find_object(const std::vector<ObjectSpec> &library, std::string_view name) {
  for (const auto &o : library)
    if (o.name == name) return o;
  throw LookupError("unknown object '" + std::string(name) + "'");
}

struct PlantParams {
  double closed_radius_mm = 15.0; // pad distance from the grasp axis at joint 0
  double stroke_mm = 60.0;        // pad travel over the normalized joint range
  double joint_speed = 2.5;       // normalized units per second
  double tip_stiffness_n_per_mm = 2.0;
  double tracking_force_n = 10.0; // per finger; 30 N across the hand
  double sponge_stiffness_n_per_mm = 0.25;
  double curved_patch_radius = 0.45; // normalized contact radius at reference force
  double flat_line_halfwidth = 0.35;
  double reference_force_n = 10.0;
  double slip_rate_mm_per_ns = 50.0;
  double drop_threshold_mm = 20.0;
  double placement_jitter_mm = 2.0;
  double jitter_engagement_loss = 0.01; // per mm of off-centre placement
  double drift_rate_biotac = 2.0e-5;    // normalized position per (N*s) under load
  double drift_rate_wts = 2.0e-4;
};

struct HandState {
  JointVector joints{};
  std::array<double, kFingers> aperture_mm{};
  std::array<double, kFingers> overlap_mm{};
  std::array<double, kFingers> normal_force_n{};
  std::array<double, kFingers> object_deformation_mm{};
  double calibration_drift = 0.0;
};

enum class OutcomeStatus : std::uint8_t { Held = 0, Slipped = 1, Dropped = 2, ContactLost = 3 };

inline std::string_view to_string(OutcomeStatus s) {
  switch (s) {
  case OutcomeStatus::Held: return "held";
  case OutcomeStatus::Slipped: return "slipped";
  case OutcomeStatus::Dropped: return "dropped";
  case OutcomeStatus::ContactLost: return "contact_lost";
  }
  return "?";
}

struct GraspOutcome {
  OutcomeStatus status = OutcomeStatus::Held;
  double slip_mm = 0.0;
  double peak_load_factor = 1.0;
  bool held_by_palm = false;

  bool operator==(const GraspOutcome &) const = default;
  /// Counts as a failed repetition in a weight sweep.
  bool failed() const noexcept {
    return status == OutcomeStatus::Dropped || (status == OutcomeStatus::ContactLost && !held_by_palm);
  }
};

struct HoldInputs {
  std::array<double, kFingers> normal_force_n{};
  std::array<double, kFingers> friction{};   // min(pad, object)
  std::array<double, kFingers> engagement{}; // fraction of force that resists slip
  double total_mass_g = 0.0;
  double load_factor = 1.0;
  double load_fraction = 1.0; // share of the weight carried by the hand (0 while on the table)
  double prior_slip_mm = 0.0;
  double dt = 0.0;
  bool edge_contact = false;
  bool palm_support = false;
};

inline double hold_capacity_n(const HoldInputs &in) noexcept {
  double cap = 0.0;
  for (std::size_t k = 0; k < kFingers; ++k) cap += in.normal_force_n[k] * in.friction[k] * in.engagement[k];
  return cap;
}

/// Friction hold: no slip while capacity covers the dynamic weight, slip at a
/// rate proportional to the deficit otherwise.
inline GraspOutcome hold_check(const HoldInputs &in, const PlantParams &params) {
  GraspOutcome out;
  out.peak_load_factor = in.load_factor;
  out.slip_mm = in.prior_slip_mm;
  const double required = in.total_mass_g / 1000.0 * kGravity * in.load_factor * in.load_fraction;
  const double capacity = hold_capacity_n(in);
  if (required > 0.0 && capacity <= 0.0) {
    out.slip_mm = std::max(out.slip_mm, params.drop_threshold_mm);
  } else if (capacity < required) {
    out.slip_mm += params.slip_rate_mm_per_ns * (required - capacity) * in.dt;
  }
  if (out.slip_mm >= params.drop_threshold_mm) {
    out.status = OutcomeStatus::Dropped;
  } else if (in.edge_contact) {
    out.status = OutcomeStatus::ContactLost;
    out.held_by_palm = in.palm_support;
  } else if (out.slip_mm > 0.0) {
    out.status = OutcomeStatus::Slipped;
  }
  return out;
}

// ---- slip under a static pull --------------------------------------------

struct SlipCurve {
  double alpha = 0.4; // mm per N beyond onset
  double beta = 0.02; // mm per N^2 beyond onset
};

/// Slip distance under a pull force F with onset F0.
inline double slip_pull(double force_n, double onset_n, const SlipCurve &curve) {
  if (!(force_n >= 0.0)) throw InputDomainError("pull force must be >= 0");
  if (force_n <= onset_n) return 0.0;
  const double excess = force_n - onset_n;
  return curve.alpha * excess + curve.beta * excess * excess;
}

// ---- shake profile --------------------------------------------------------

struct PerturbationProfile {
  double base_speed = 0.10; // rad/s
  double peak_speed = 0.13; // rad/s
  double amplitude_deg = 10.0;
  double ramp_s = 1.0;
  double lever_arm_m = 0.3;

  double amplitude_rad() const noexcept { return amplitude_deg * std::numbers::pi / 180.0; }
  double omega() const noexcept { return peak_speed / amplitude_rad(); }
  double oscillation_period_s() const noexcept { return 2.0 * std::numbers::pi / omega(); }
  double yaw_start() const noexcept { return ramp_s; }
  double pitch_start() const noexcept { return ramp_s + 2.0 * oscillation_period_s(); }
  double ramp_down_start() const noexcept { return ramp_s + 4.0 * oscillation_period_s(); }
  double duration_s() const noexcept { return 2.0 * ramp_s + 4.0 * oscillation_period_s(); }
  /// Closed-form peak tangential acceleration at the hand.
  double peak_acceleration() const noexcept { return lever_arm_m * amplitude_rad() * omega() * omega(); }
};

struct PoseSample {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double speed = 0.0; // commanded angular speed envelope, rad/s
  double load_factor = 1.0;
};

/// Ramp-up, two yaw periods, two pitch periods, ramp-down.
inline PoseSample perturbation_pose(const PerturbationProfile &profile, double t) {
  const double duration = profile.duration_s();
  if (!(t >= 0.0 && t <= duration)) throw InputDomainError("time outside the perturbation profile");
  PoseSample out;
  if (t < profile.yaw_start()) {
    out.speed = profile.base_speed + (profile.peak_speed - profile.base_speed) * t / profile.ramp_s;
    return out;
  }
  if (t >= profile.ramp_down_start()) {
    const double s = (t - profile.ramp_down_start()) / profile.ramp_s;
    out.speed = profile.peak_speed - (profile.peak_speed - profile.base_speed) * s;
    return out;
  }
  const bool yaw_phase = t < profile.pitch_start();
  const double tau = t - (yaw_phase ? profile.yaw_start() : profile.pitch_start());
  const double w = profile.omega();
  const double angle = profile.amplitude_deg * std::sin(w * tau);
  (yaw_phase ? out.yaw_deg : out.pitch_deg) = angle;
  out.speed = profile.peak_speed;
  const double accel = profile.lever_arm_m * profile.amplitude_rad() * w * w * std::abs(std::sin(w * tau));
  out.load_factor = 1.0 + accel / kGravity;
  return out;
}

struct ImuSample {
  std::int64_t timestamp_us = 0;
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;

  bool operator==(const ImuSample &) const = default;
};

/// Carrier attitude at shake-relative time t plus seeded sensor noise.
/// Outside the profile the attitude is level.
inline ImuSample imu_read(const PerturbationProfile &profile, double t, std::int64_t timestamp_us,
                          std::mt19937_64 &rng, double sigma_deg = 0.1) {
  ImuSample s{timestamp_us, 0.0, 0.0};
  if (t >= 0.0 && t <= profile.duration_s()) {
    const PoseSample p = perturbation_pose(profile, t);
    s.yaw_deg = p.yaw_deg;
    s.pitch_deg = p.pitch_deg;
  }
  if (sigma_deg > 0.0) {
    std::normal_distribution<double> gauss(0.0, sigma_deg);
    s.yaw_deg += gauss(rng);
    s.pitch_deg += gauss(rng);
  }
  return s;
}

inline ImuSample imu_read(const PerturbationProfile &profile, double t, std::int64_t timestamp_us, std::uint64_t seed,
                          double sigma_deg = 0.1) {
  std::mt19937_64 rng(derive_seed({seed, static_cast<std::uint64_t>(timestamp_us), 0x1a0ULL}));
  return imu_read(profile, t, timestamp_us, rng, sigma_deg);
}

// ---- contact geometry -----------------------------------------------------

/// Per-sensor pressure share in [0, 1] for a pad pressed with force N.
inline double pressure_share(const SensorLayout &layout, const ObjectSpec &object, const PlantParams &params,
                             const SurfacePoint &p, double force_n, double centre_offset_mm) {
  if (force_n <= 0.0) return 0.0;
  const double rel = force_n / params.reference_force_n;
  const double uc = 0.5 + centre_offset_mm / layout.patch_width_mm;
  if (layout.surface_shape == SurfaceShape::Curved) {
    const double rho = params.curved_patch_radius * std::cbrt(rel);
    const double d2 = (p.u - uc) * (p.u - uc) + (p.v - 0.5) * (p.v - 0.5);
    return std::max(0.0, 1.0 - d2 / (rho * rho));
  }
  if (object.has_flat_faces()) {
    const double s = 1.0 - object.face_tilt * std::abs(p.v - 0.5) * 2.0;
    return std::clamp(s, 0.0, 1.0);
  }
  const double w = params.flat_line_halfwidth * std::sqrt(rel) * std::sqrt(object.effective_radius_cm * 10.0 / 40.0);
  const double du = p.u - uc;
  return std::max(0.0, 1.0 - du * du / (w * w));
}

inline ContactField contact_field_for(const SensorLayout &layout, const ObjectSpec &object, const PlantParams &params,
                                      double force_n, double centre_offset_mm, bool edge_contact) {
  ContactField f;
  f.edge_contact = edge_contact;
  f.depths_mm.resize(layout.positions.size());
  for (std::size_t j = 0; j < layout.positions.size(); ++j)
    f.depths_mm[j] =
        force_n * pressure_share(layout, object, params, layout.positions[j], force_n, centre_offset_mm) /
        params.sponge_stiffness_n_per_mm;
  return f;
}

/// What the carrier is doing this tick.
struct CarrierState {
  double load_factor = 1.0;
  double load_fraction = 0.0;
};

struct PlantStep {
  HandState hand;
  std::array<ContactField, kFingers> fields;
  GraspOutcome hold;
};

/// Single-owner stepped hand/object simulation.
class Plant {
public:
  Plant(PlantParams params, SensorLayout layout, ObjectSpec object, JointVector initial, std::uint64_t seed)
      : params_(params), layout_(std::move(layout)), object_(std::move(object)) {
    hand_.joints = initial;
    std::mt19937_64 rng(derive_seed({seed, 0x91ace0ULL}));
    std::uniform_real_distribution<double> jitter(-params_.placement_jitter_mm, params_.placement_jitter_mm);
    for (auto &o : offset_mm_) o = jitter(rng);
    refresh_contact();
  }

  /// Advance dt seconds toward the joint targets.
  PlantStep step(const JointVector &targets, const CarrierState &carrier, double dt) {
    if (!(dt > 0.0)) throw InputDomainError("plant step needs dt > 0");
    const double max_move = params_.joint_speed * dt;
    for (std::size_t k = 0; k < kFingers; ++k) {
      const double stall = stall_closure(k);
      // a pad pressed on the object keeps tracking force unless commanded open
      const bool squeeze = hand_.overlap_mm[k] > 0.0 && targets[2 * k] <= hand_.joints[2 * k] &&
                           targets[2 * k + 1] <= hand_.joints[2 * k + 1];
      const double floor = squeeze_closure(k);
      for (std::size_t j = 2 * k; j < 2 * k + 2; ++j) {
        const double q = hand_.joints[j];
        double proposed = q + std::clamp(targets[j] - q, -max_move, max_move);
        if (squeeze) proposed = std::min(proposed, std::max(q - max_move, std::min(q, floor)));
        hand_.joints[j] = std::max(proposed, std::min(q, stall));
      }
    }
    refresh_contact();

    const double drift_rate =
        layout_.kind == FingertipKind::WtsFt ? params_.drift_rate_wts : params_.drift_rate_biotac;
    for (double n : hand_.normal_force_n) hand_.calibration_drift += drift_rate * n * dt;

    HoldInputs in;
    in.normal_force_n = hand_.normal_force_n;
    for (std::size_t k = 0; k < kFingers; ++k) {
      in.friction[k] = std::min(layout_.friction_mu, object_.surface_friction);
      in.engagement[k] = engagement(k);
    }
    in.total_mass_g = object_.total_mass_g();
    in.load_factor = carrier.load_factor;
    in.load_fraction = carrier.load_fraction;
    in.prior_slip_mm = slip_mm_;
    in.dt = dt;
    in.edge_contact = edge_contact();
    in.palm_support = object_.palm_support;
    const GraspOutcome hold = hold_check(in, params_);
    slip_mm_ = hold.slip_mm;

    PlantStep out;
    out.hand = hand_;
    out.hold = hold;
    for (std::size_t k = 0; k < kFingers; ++k)
      out.fields[k] = contact_field_for(layout_, object_, params_, hand_.normal_force_n[k], offset_mm_[k], in.edge_contact);
    return out;
  }

  /// Friction capacity of the current grasp, in newtons.
  double hold_capacity() const noexcept {
    double cap = 0.0;
    for (std::size_t k = 0; k < kFingers; ++k)
      cap += hand_.normal_force_n[k] * std::min(layout_.friction_mu, object_.surface_friction) * engagement(k);
    return cap;
  }

  bool edge_contact() const noexcept {
    return !layout_.edge_sensitive && object_.edge_contact_above_g > 0.0 &&
           object_.total_mass_g() > object_.edge_contact_above_g;
  }

  void release_load() noexcept { slip_mm_ = 0.0; }

  const HandState &hand() const noexcept { return hand_; }
  const ObjectSpec &object() const noexcept { return object_; }
  const SensorLayout &layout() const noexcept { return layout_; }
  const PlantParams &params() const noexcept { return params_; }
  double slip_mm() const noexcept { return slip_mm_; }
  const std::array<double, kFingers> &placement_offsets() const noexcept { return offset_mm_; }

private:
  double object_radius_mm(std::size_t k) const noexcept {
    return object_.effective_radius_cm * 10.0 + offset_mm_[k];
  }

  double series_compliance() const noexcept {
    return 1.0 / params_.tip_stiffness_n_per_mm + object_.deformability_mm_per_n;
  }

  // Lowest finger closure the actuator can reach before the tracking force stalls it.
  double stall_closure(std::size_t k) const noexcept {
    if (object_.crush_force_n > 0.0 && object_.crush_force_n < params_.tracking_force_n) return -1.0;
    const double overlap = params_.tracking_force_n * series_compliance();
    return (object_radius_mm(k) - overlap - params_.closed_radius_mm) / params_.stroke_mm;
  }

  // Closure at which the pad force reaches the tracking force, or the wall yield force if lower.
  double squeeze_closure(std::size_t k) const noexcept {
    double force = params_.tracking_force_n;
    if (object_.crush_force_n > 0.0) force = std::min(force, object_.crush_force_n);
    return (object_radius_mm(k) - force * series_compliance() - params_.closed_radius_mm) / params_.stroke_mm;
  }

  double engagement(std::size_t k) const noexcept {
    double e = object_.engagement;
    if (layout_.surface_shape == SurfaceShape::Flat) e *= object_.flat_engagement_ratio;
    return e * std::max(0.0, 1.0 - params_.jitter_engagement_loss * std::abs(offset_mm_[k]));
  }

  void refresh_contact() noexcept {
    for (std::size_t k = 0; k < kFingers; ++k) {
      const double closure = 0.5 * (hand_.joints[2 * k] + hand_.joints[2 * k + 1]);
      const double aperture = params_.closed_radius_mm + params_.stroke_mm * closure;
      const double overlap = std::max(0.0, object_radius_mm(k) - aperture);
      double force = overlap / series_compliance();
      if (object_.crush_force_n > 0.0) force = std::min(force, object_.crush_force_n);
      force = std::min(force, params_.tracking_force_n);
      hand_.aperture_mm[k] = std::max(0.0, aperture);
      hand_.overlap_mm[k] = overlap;
      hand_.normal_force_n[k] = force;
      hand_.object_deformation_mm[k] = std::max(0.0, overlap - force / params_.tip_stiffness_n_per_mm);
    }
  }

  PlantParams params_;
  SensorLayout layout_;
  ObjectSpec object_;
  HandState hand_;
  std::array<double, kFingers> offset_mm_{};
  double slip_mm_ = 0.0;
};

} // namespace tgrasp

#endif // TGRASP_PLANT_HPP
