#ifndef TGRASP_CONTACT_HPP
#define TGRASP_CONTACT_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "tgrasp/errors.hpp"

namespace tgrasp {

inline constexpr std::size_t kFingers = 3; // thumb, index, ring

struct ContactConfig {
  double zeta = 0.0; // per-sensor activation threshold
  int psi = 1;       // activated sensors required for finger contact

  void validate(int sensor_count) const {
    if (!(zeta >= 0.0)) throw ConfigError("zeta must be >= 0");
    if (psi < 1 || psi > sensor_count) throw ConfigError("psi must lie in [1, sensor_count]");
  }
};

/// Per-finger contact state. Always replaced as a whole value.
struct ContactVector {
  std::array<bool, kFingers> c{false, false, false};

  bool operator[](std::size_t k) const { return c[k]; }
  bool all() const { return c[0] && c[1] && c[2]; }
  bool operator==(const ContactVector &) const = default;

  std::uint8_t bits() const {
    return static_cast<std::uint8_t>((c[0] ? 1 : 0) | (c[1] ? 2 : 0) | (c[2] ? 4 : 0));
  }
  static ContactVector from_bits(std::uint8_t b) {
    return ContactVector{{(b & 1) != 0, (b & 2) != 0, (b & 4) != 0}};
  }
};

constexpr int sensor_activation(double value, double zeta) noexcept { return value >= zeta ? 1 : 0; }

inline int activated_count(std::span<const double> values, double zeta) noexcept {
  int n = 0;
  for (double v : values) n += sensor_activation(v, zeta);
  return n;
}

inline bool detect_contact(std::span<const double> values, const ContactConfig &cfg) noexcept {
  return activated_count(values, cfg.zeta) >= cfg.psi;
}

inline ContactVector contact_vector(std::span<const std::span<const double>> frames, const ContactConfig &cfg) {
  if (frames.size() != kFingers)
    throw ConfigError("contact_vector needs exactly 3 frames, got " + std::to_string(frames.size()));
  ContactVector out;
  for (std::size_t k = 0; k < kFingers; ++k) out.c[k] = detect_contact(frames[k], cfg);
  return out;
}

} // namespace tgrasp

#endif // TGRASP_CONTACT_HPP
