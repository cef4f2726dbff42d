#ifndef TGRASP_STAGES_HPP
#define TGRASP_STAGES_HPP

// The four pipeline stages of an adaptive grasp run and the task sequencer
// that drives the seven assessment phases.
//
//   frame source     -> /fingertips/raw, /joints/actual, /imu, /grasp/status
//   contact detector -> /fingertips/normalized, /contact
//   contact callback -> /contact/global
//   adaptive grasp   -> /joints/target
//
// Every stage is a plain object fed one message per tick, so the same code
// runs under the single-context scheduler and under one thread per stage.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tgrasp/config.hpp"
#include "tgrasp/contact.hpp"
#include "tgrasp/control.hpp"
#include "tgrasp/errors.hpp"
#include "tgrasp/fingertip.hpp"
#include "tgrasp/messages.hpp"
#include "tgrasp/plant.hpp"
#include "tgrasp/random.hpp"
#include "tgrasp/signal.hpp"

namespace tgrasp {

enum class PreGraspKind : std::uint8_t { Sphere3Fingers, LargeDiameter, PrecisionDisk, PrecisionSphere };

inline std::string_view to_string(PreGraspKind k) {
  switch (k) {
  case PreGraspKind::Sphere3Fingers: return "sphere_3_fingers";
  case PreGraspKind::LargeDiameter: return "large_diameter";
  case PreGraspKind::PrecisionDisk: return "precision_disk";
  case PreGraspKind::PrecisionSphere: return "precision_sphere";
  }
  return "?";
}

inline PreGraspKind parse_pregrasp(std::string_view s) {
  for (auto k : {PreGraspKind::Sphere3Fingers, PreGraspKind::LargeDiameter, PreGraspKind::PrecisionDisk,
                 PreGraspKind::PrecisionSphere})
    if (to_string(k) == s) return k;
  throw LookupError("unknown pre-grasp '" + std::string(s) + "'");
}

struct PreGrasp {
  PreGraspKind kind = PreGraspKind::Sphere3Fingers;
  JointVector offsets{};
};

inline PreGrasp select_pregrasp(const Config &cfg, std::string_view object) {
  const auto it = cfg.pregrasp_for_object.find(std::string(object));
  if (it == cfg.pregrasp_for_object.end()) throw LookupError("no pre-grasp for object '" + std::string(object) + "'");
  const auto off = cfg.pregrasps.find(it->second);
  if (off == cfg.pregrasps.end()) throw LookupError("pre-grasp '" + it->second + "' is not defined");
  return {parse_pregrasp(it->second), off->second};
}

struct PhaseState {
  Phase phase = Phase::Idle;
  bool lock = false; // true while the phase's task is running
};

inline int ticks_for(double seconds, const HarnessTiming &t) {
  return std::max(1, static_cast<int>(std::llround(seconds * t.tick_hz)));
}

// ---- stage 2: fingertips + plant --------------------------------------------

struct SourceOutput {
  std::int64_t timestamp_us = 0;
  RawFrames raw;
  JointState actual;
  ImuSample imu;
  GraspStatus status;
};

class FrameSourceStage {
public:
  FrameSourceStage(const Config &cfg, ObjectSpec object, FingertipKind kind, std::uint64_t seed)
      : cfg_(&cfg), layout_(cfg.kind(kind).layout),
        plant_(cfg.plant, cfg.kind(kind).layout, std::move(object), cfg.limits.max, seed),
        imu_rng_(derive_seed({seed, 0x1a0ULL})) {
    for (std::size_t k = 0; k < kFingers; ++k) noise_rng_[k].seed(derive_seed({seed, 0xf1e1dULL, k}));
  }

  SourceOutput on_command(const ControlCommand &cmd, std::int64_t tick) {
    if (cmd.phase != phase_) {
      phase_ = cmd.phase;
      entry_tick_ = tick;
    }
    const double dt = cfg_->timing.dt();
    const double elapsed = static_cast<double>(tick - entry_tick_) * dt;
    const PerturbationProfile &profile = cfg_->profile;

    CarrierState carrier;
    double shake_time = -1.0;
    switch (cmd.phase) {
    case Phase::Lift: carrier.load_fraction = std::min(1.0, (elapsed + dt) / cfg_->timing.lift_s); break;
    case Phase::Shake:
      carrier.load_fraction = 1.0;
      shake_time = std::min(elapsed, profile.duration_s());
      carrier.load_factor = perturbation_pose(profile, shake_time).load_factor;
      break;
    case Phase::Dropoff: carrier.load_fraction = 1.0; break;
    default: break;
    }

    const PlantStep s = plant_.step(cmd.targets, carrier, dt);
    SourceOutput out;
    out.timestamp_us = tick * cfg_->timing.tick_us();
    for (std::size_t k = 0; k < kFingers; ++k)
      out.raw.fingers[k] = synthesize_frame(layout_, s.fields[k], out.timestamp_us, noise_rng_[k], cfg_->noise);
    out.actual.q = s.hand.joints;
    out.imu = imu_read(profile, shake_time, out.timestamp_us, imu_rng_, cfg_->imu_sigma_deg);
    out.status = s.hold;
    return out;
  }

  const Plant &plant() const noexcept { return plant_; }

private:
  const Config *cfg_;
  SensorLayout layout_;
  Plant plant_;
  std::array<std::mt19937_64, kFingers> noise_rng_;
  std::mt19937_64 imu_rng_;
  Phase phase_ = Phase::Idle;
  std::int64_t entry_tick_ = 0;
};

// ---- stage 1: contact detection -------------------------------------------------

struct DetectorOutput {
  NormalizedFrames normalized;
  ContactVector contact;
};

class ContactDetectorStage {
public:
  ContactDetectorStage(const Config &cfg, FingertipKind kind)
      : contact_(cfg.kind(kind).contact()),
        pipelines_{make(cfg, kind), make(cfg, kind), make(cfg, kind)} {}

  DetectorOutput on_raw(const RawFrames &raw) {
    DetectorOutput out;
    for (std::size_t k = 0; k < kFingers; ++k) {
      out.normalized.fingers[k] = pipelines_[k].process(raw.fingers[k]);
      out.contact.c[k] = detect_contact(pipelines_[k].detection_values(), contact_);
    }
    return out;
  }

private:
  static SignalPipeline make(const Config &cfg, FingertipKind kind) {
    return SignalPipeline(kind, cfg.filter_retention, cfg.delta_max, cfg.kind(kind).source);
  }

  ContactConfig contact_;
  std::array<SignalPipeline, kFingers> pipelines_;
};

// ---- stage 3: contact callback ---------------------------------------------------

/// Holds the latest contact vector; replaced whole on every update.
class ContactCallbackStage {
public:
  ContactVector on_contact(const ContactVector &c) {
    global_ = c;
    return global_;
  }
  const ContactVector &global() const noexcept { return global_; }

private:
  ContactVector global_;
};

// ---- stage 4: adaptive grasp + task sequencing -----------------------------------

struct ControllerInputs {
  ContactVector contact;
  JointVector actual{};
  GraspStatus status;
};

class AdaptiveGraspStage {
public:
  AdaptiveGraspStage(const Config &cfg, std::string_view object, bool grasp_request = true, int idle_limit_ticks = 50)
      : cfg_(&cfg), pregrasp_(select_pregrasp(cfg, object)), request_(grasp_request), idle_limit_(idle_limit_ticks) {
    previous_.fill(0.0);
    previous_ = cfg.limits.max;
    trace_.push_back(Phase::Idle);
  }

  ControlCommand on_inputs(const ControllerInputs &in) {
    if (done_) throw StateError("sequencer already finished");
    ++ticks_in_phase_;
    peak_load_ = std::max(peak_load_, in.status.peak_load_factor);
    const auto &t = cfg_->timing;
    const auto &limits = cfg_->limits;

    ControlCommand cmd;
    cmd.phase = state_.phase;
    cmd.targets = previous_;

    switch (state_.phase) {
    case Phase::Idle:
      if (finished_ || (!request_ && ticks_in_phase_ >= idle_limit_)) {
        cmd.done = true;
        done_ = true;
      } else if (request_ && !started_) {
        started_ = true;
        enter(Phase::Pickup);
      }
      break;
    case Phase::Pickup:
      cmd.targets = pregrasp_.offsets;
      if (ticks_in_phase_ >= ticks_for(t.pickup_s, t)) {
        min_detector_ = {false, false, false};
        enter(Phase::Grasp);
      }
      break;
    case Phase::Grasp:
      cmd.targets = adaptation_tick(in.contact, min_detector_, in.actual, previous_, cfg_->controller.kp_close, limits);
      if (grasp_complete(cmd.targets, limits, in.actual) || ticks_in_phase_ >= ticks_for(t.grasp_timeout_s, t)) {
        grasp_ticks_ = ticks_in_phase_;
        enter(Phase::Lift);
      }
      break;
    case Phase::Lift:
    case Phase::Shake:
    case Phase::Dropoff: {
      if (in.status.status == OutcomeStatus::Dropped) {
        latch(in.status);
        aborted_ = true;
        cmd.targets = limits.max;
        cmd.phase = Phase::Release;
        enter(Phase::Release);
        ticks_in_phase_ = 1;
        break;
      }
      cmd.targets = adaptation_tick(in.contact, min_detector_, in.actual, previous_, cfg_->controller.kp_hold, limits);
      const double duration = state_.phase == Phase::Lift    ? t.lift_s
                              : state_.phase == Phase::Shake ? cfg_->profile.duration_s()
                                                             : t.dropoff_s;
      if (ticks_in_phase_ >= ticks_for(duration, t)) {
        if (state_.phase == Phase::Dropoff) latch(in.status);
        enter(static_cast<Phase>(static_cast<int>(state_.phase) + 1));
      }
      break;
    }
    case Phase::Release:
      cmd.targets = limits.max;
      if (ticks_in_phase_ >= ticks_for(t.release_s, t)) {
        finished_ = true;
        state_.phase = Phase::Idle;
        state_.lock = false;
        ticks_in_phase_ = 0;
        if (aborted_) trace_.push_back(Phase::Idle);
      }
      break;
    }

    if (!limits.contains(cmd.targets)) ++limit_violations_;
    previous_ = cmd.targets;
    return cmd;
  }

  bool done() const noexcept { return done_; }
  const PhaseState &phase_state() const noexcept { return state_; }
  const std::vector<Phase> &trace() const noexcept { return trace_; }
  int limit_violations() const noexcept { return limit_violations_; }
  int grasp_ticks() const noexcept { return grasp_ticks_; }
  bool outcome_latched() const noexcept { return latched_; }
  const GraspOutcome &outcome() const noexcept { return outcome_; }

private:
  void enter(Phase p) {
    state_.lock = false;
    state_.phase = p;
    state_.lock = true;
    ticks_in_phase_ = 0;
    trace_.push_back(p);
  }

  void latch(const GraspStatus &status) {
    outcome_ = status;
    outcome_.peak_load_factor = peak_load_;
    latched_ = true;
  }

  const Config *cfg_;
  PreGrasp pregrasp_;
  bool request_;
  int idle_limit_;
  PhaseState state_;
  int ticks_in_phase_ = 0;
  bool started_ = false;
  bool finished_ = false;
  bool aborted_ = false;
  bool done_ = false;
  bool latched_ = false;
  int grasp_ticks_ = 0;
  int limit_violations_ = 0;
  double peak_load_ = 1.0;
  MinDetector min_detector_{false, false, false};
  JointVector previous_{};
  std::vector<Phase> trace_;
  GraspOutcome outcome_;
};

} // namespace tgrasp

#endif // TGRASP_STAGES_HPP
