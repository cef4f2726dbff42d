#ifndef TGRASP_CONTROL_HPP
#define TGRASP_CONTROL_HPP

// Proportional grasp adaptation: the P law, the joint-target clamp, the
// fixed-decrement closing step and the grasp-completion predicate.
//
// Joint coordinates are normalized, with the lower limit in the closing
// direction. Finger k owns joints 2k and 2k+1 and both gate on contact bit k.

#include <array>
#include <cmath>
#include <cstddef>

#include "tgrasp/contact.hpp"
#include "tgrasp/errors.hpp"

namespace tgrasp {

inline constexpr std::size_t kJoints = 6;

using JointVector = std::array<double, kJoints>;
using MinDetector = std::array<bool, kFingers>;

constexpr std::size_t finger_of(std::size_t joint) noexcept { return joint / 2; }

struct JointLimits {
  JointVector min{};
  JointVector max{};

  static JointLimits uniform(double lo, double hi) {
    JointLimits l;
    l.min.fill(lo);
    l.max.fill(hi);
    l.validate();
    return l;
  }

  void validate() const {
    for (std::size_t i = 0; i < kJoints; ++i)
      if (!(min[i] < max[i])) throw ConfigError("joint limits require min < max on every joint");
  }

  bool contains(const JointVector &q) const noexcept {
    for (std::size_t i = 0; i < kJoints; ++i)
      if (q[i] < min[i] || q[i] > max[i]) return false;
    return true;
  }
};

struct ControllerParams {
  double kp_close = 0.04; // coarse closing gain, normalized units per tick
  double kp_hold = 0.01;  // fine maintenance gain
  double p0 = 0.0;
  double setpoint = 0.0;

  void validate() const {
    if (!(kp_close >= kp_hold && kp_hold > 0.0)) throw ConfigError("gain schedule needs kp_close >= kp_hold > 0");
  }
};

/// P_out = Kp * (SP - PV) + p0
constexpr double p_controller(double setpoint, double measured, double kp, double p0) noexcept {
  return kp * (setpoint - measured) + p0;
}

/// Target for one joint: the P output clamped into limits while the finger is
/// free, the actual position once the finger is in contact.
constexpr double clamp_target(double p_out, double s_min, double s_max, bool contact, double actual) noexcept {
  if (!contact && s_min <= p_out && p_out <= s_max) return p_out;
  if (!contact && p_out < s_min) return s_min;
  if (!contact && p_out > s_max) return s_max;
  return actual;
}

struct ClosingStep {
  double position = 0.0;
  bool at_min = false;
};

/// Move one decrement toward the closed limit; pins to the limit when the
/// decrement would overshoot it. Differences within 1e-12 of the limit snap onto it.
inline ClosingStep closing_step(double actual, double kp, double min_position) {
  if (!(kp > 0.0)) throw InputDomainError("closing gain must be > 0");
  double next = actual - kp;
  if (std::abs(next - min_position) <= 1e-12) next = min_position;
  if (next >= min_position && actual != min_position) return {next, false};
  return {min_position, true};
}

/// True when every joint target sits on a limit or on the actual position.
inline bool grasp_complete(const JointVector &target, const JointLimits &limits, const JointVector &actual) noexcept {
  for (std::size_t i = 0; i < kJoints; ++i)
    if (target[i] != limits.max[i] && target[i] != limits.min[i] && target[i] != actual[i]) return false;
  return true;
}

/// One control tick of grasp adaptation. Fingers in contact hold their
/// actual position; free fingers advance one closing step from their last
/// commanded target; pinned fingers stay at the limit.
inline JointVector adaptation_tick(const ContactVector &contact, MinDetector &min_detector, const JointVector &actual,
                                   const JointVector &previous_target, double kp, const JointLimits &limits) {
  JointVector out{};
  for (std::size_t k = 0; k < kFingers; ++k) {
    bool pinned = true;
    for (std::size_t j = 2 * k; j < 2 * k + 2; ++j) {
      if (contact[k]) {
        out[j] = clamp_target(previous_target[j], limits.min[j], limits.max[j], true, actual[j]);
        pinned = false;
      } else if (min_detector[k]) {
        out[j] = limits.min[j];
      } else {
        const ClosingStep step = closing_step(previous_target[j], kp, limits.min[j]);
        out[j] = clamp_target(step.position, limits.min[j], limits.max[j], false, actual[j]);
        pinned = pinned && step.at_min;
      }
    }
    if (!contact[k] && pinned) min_detector[k] = true;
  }
  return out;
}

} // namespace tgrasp

#endif // TGRASP_CONTROL_HPP
