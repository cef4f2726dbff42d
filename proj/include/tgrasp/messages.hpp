#ifndef TGRASP_MESSAGES_HPP
#define TGRASP_MESSAGES_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "tgrasp/contact.hpp"
#include "tgrasp/control.hpp"
#include "tgrasp/fingertip.hpp"
#include "tgrasp/plant.hpp"
#include "tgrasp/signal.hpp"

namespace tgrasp {

/// Grasp assessment phases, numbered as in the task sequence.
enum class Phase : std::uint8_t { Idle = 1, Pickup = 2, Grasp = 3, Lift = 4, Shake = 5, Dropoff = 6, Release = 7 };

inline std::string_view to_string(Phase p) {
  switch (p) {
  case Phase::Idle: return "idle";
  case Phase::Pickup: return "pickup";
  case Phase::Grasp: return "grasp";
  case Phase::Lift: return "lift";
  case Phase::Shake: return "shake";
  case Phase::Dropoff: return "dropoff";
  case Phase::Release: return "release";
  }
  return "?";
}

struct RawFrames {
  std::array<FingertipFrame, kFingers> fingers;
  bool operator==(const RawFrames &) const = default;
};

struct NormalizedFrames {
  std::array<NormalizedFrame, kFingers> fingers;
  bool operator==(const NormalizedFrames &) const = default;
};

struct JointState {
  JointVector q{};
  bool operator==(const JointState &) const = default;
};

/// Controller output for one tick: joint targets plus the carrier task.
struct ControlCommand {
  Phase phase = Phase::Idle;
  bool done = false;
  JointVector targets{};
  bool operator==(const ControlCommand &) const = default;
};

using GraspStatus = GraspOutcome;

using Payload = std::variant<RawFrames, NormalizedFrames, ContactVector, JointState, ControlCommand, ImuSample, GraspStatus>;

namespace topics {
inline constexpr std::string_view kRaw = "/fingertips/raw";
inline constexpr std::string_view kNormalized = "/fingertips/normalized";
inline constexpr std::string_view kContact = "/contact";
inline constexpr std::string_view kContactGlobal = "/contact/global";
inline constexpr std::string_view kJointsActual = "/joints/actual";
inline constexpr std::string_view kJointsTarget = "/joints/target";
inline constexpr std::string_view kImu = "/imu";
inline constexpr std::string_view kGraspStatus = "/grasp/status";
} // namespace topics

} // namespace tgrasp

#endif // TGRASP_MESSAGES_HPP
