#ifndef TGRASP_FINGERTIP_HPP
#define TGRASP_FINGERTIP_HPP

// Layouts and raw-frame synthesis for the two emulated
// fingertip families: a curved 24-electrode skin (BioTacSP) and a flat
// 4x8 force-cell matrix (WtsFt).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tgrasp/errors.hpp"

namespace tgrasp {

inline constexpr int kAdcMax = 4095; // 12-bit readings

enum class FingertipKind : std::uint8_t { BioTacSP = 0, WtsFt = 1 };
enum class SurfaceShape : std::uint8_t { Curved, Flat };

inline std::string_view to_string(FingertipKind k) {
  return k == FingertipKind::BioTacSP ? "biotac" : "wts";
}

inline FingertipKind parse_kind(std::string_view s) {
  if (s == "biotac" || s == "BioTacSP" || s == "biotac_sp") return FingertipKind::BioTacSP;
  if (s == "wts" || s == "WtsFt" || s == "wts_ft") return FingertipKind::WtsFt;
  throw LookupError("unknown fingertip kind '" + std::string(s) + "'");
}

struct SurfacePoint {
  double u = 0.0;
  double v = 0.0;
};

struct SensorLayout {
  FingertipKind kind = FingertipKind::BioTacSP;
  int sensor_count = 24; // electrodes or cells; BioTacSP also carries 4 scalar channels
  int scalar_channels = 4;
  std::vector<SurfacePoint> positions;
  SurfaceShape surface_shape = SurfaceShape::Curved;
  double delta_min_mm = 5.0;
  double gain = 400.0; // counts per mm of indentation above delta_min
  double friction_mu = 1.0;
  bool edge_sensitive = true;
  double patch_width_mm = 20.0; // physical width spanned by u in [0,1]
  double mass_g = 9.5;

  /// Throws ConfigError when the layout violates its invariants.
  void validate() const {
    const int expected = kind == FingertipKind::BioTacSP ? 24 : 32;
    const int expected_scalars = kind == FingertipKind::BioTacSP ? 4 : 0;
    if (sensor_count != expected || scalar_channels != expected_scalars)
      throw ConfigError("sensor count does not match fingertip kind");
    if (positions.size() != static_cast<std::size_t>(sensor_count))
      throw ConfigError("sensor position table size mismatch");
    for (const auto &p : positions)
      if (!(p.u >= 0.0 && p.u <= 1.0 && p.v >= 0.0 && p.v <= 1.0))
        throw ConfigError("sensor position outside the unit patch");
    if (!(delta_min_mm > 0.0) || !(gain > 0.0) || !(friction_mu > 0.0 && friction_mu <= 2.0))
      throw ConfigError("delta_min, gain and friction must be positive (friction <= 2)");
  }
};

/// Default electrode table: three rings of eight around the patch centre.
inline std::vector<SurfacePoint> biotac_default_positions() {
  return {
      {0.6200, 0.5000}, {0.5849, 0.5849}, {0.5000, 0.6200}, {0.4151, 0.5849},
      {0.3800, 0.5000}, {0.4151, 0.4151}, {0.5000, 0.3800}, {0.5849, 0.4151},
      {0.7217, 0.5918}, {0.5918, 0.7217}, {0.4082, 0.7217}, {0.2783, 0.5918},
      {0.2783, 0.4082}, {0.4082, 0.2783}, {0.5918, 0.2783}, {0.7217, 0.4082},
      {0.8600, 0.5000}, {0.7546, 0.7546}, {0.5000, 0.8600}, {0.2454, 0.7546},
      {0.1400, 0.5000}, {0.2454, 0.2454}, {0.5000, 0.1400}, {0.7546, 0.2454},
  };
}

/// Cell centres of the 4 (columns, u) x 8 (rows, v) matrix, row-major.
inline std::vector<SurfacePoint> wts_grid_positions() {
  std::vector<SurfacePoint> out;
  out.reserve(32);
  for (int row = 0; row < 8; ++row)
    for (int col = 0; col < 4; ++col)
      out.push_back({(col + 0.5) / 4.0, (row + 0.5) / 8.0});
  return out;
}

inline SensorLayout default_layout(FingertipKind kind) {
  SensorLayout l;
  l.kind = kind;
  if (kind == FingertipKind::BioTacSP) {
    l.sensor_count = 24;
    l.scalar_channels = 4;
    l.positions = biotac_default_positions();
    l.surface_shape = SurfaceShape::Curved;
    l.delta_min_mm = 5.0;
    l.gain = 400.0;
    l.friction_mu = 1.0;
    l.edge_sensitive = true;
    l.patch_width_mm = 20.0;
    l.mass_g = 9.5;
  } else {
    l.sensor_count = 32;
    l.scalar_channels = 0;
    l.positions = wts_grid_positions();
    l.surface_shape = SurfaceShape::Flat;
    l.delta_min_mm = 30.0;
    l.gain = 400.0;
    l.friction_mu = 0.6;
    l.edge_sensitive = false;
    l.patch_width_mm = 28.0;
    l.mass_g = 25.8;
  }
  return l;
}

struct SampleSchedule {
  double electrode_hz = 0.0;
  double pac_hz = 0.0;
  double pdc_hz = 0.0;
  double tac_hz = 0.0;
  double tdc_hz = 0.0;
  double cell_hz = 0.0;      // WtsFt matrix frame rate
  double aggregate_hz = 0.0; // total sample clock of the device
};

inline SampleSchedule sample_schedule(FingertipKind kind) {
  SampleSchedule s;
  if (kind == FingertipKind::BioTacSP) {
    s.electrode_hz = 73.0;
    s.pac_hz = 2200.0;
    s.pdc_hz = 73.0;
    s.tac_hz = 73.0;
    s.tdc_hz = 73.0;
    s.aggregate_hz = 4400.0;
  } else {
    s.cell_hz = 400.0;
    s.aggregate_hz = 400.0;
  }
  return s;
}

// BioTacSP sample interleaving at the 4.4 kHz clock. A 60-slot cycle: even
// slots carry PAC, odd slots walk the 24 electrodes round-robin, then PDC,
// TAC, TDC and three idle slots. That yields 2200 Hz PAC and 73.3 Hz for
// every other channel.
enum class BioTacChannel : std::uint8_t { Pac, Electrode, Pdc, Tac, Tdc, Idle };

struct BioTacSlot {
  BioTacChannel channel = BioTacChannel::Idle;
  int electrode = -1;
};

inline constexpr std::size_t kBioTacCycleSlots = 60;

constexpr BioTacSlot biotac_slot(std::size_t slot) noexcept {
  const std::size_t s = slot % kBioTacCycleSlots;
  if (s % 2 == 0) return {BioTacChannel::Pac, -1};
  const std::size_t odd = s / 2; // 0..29
  if (odd < 24) return {BioTacChannel::Electrode, static_cast<int>(odd)};
  switch (odd) {
  case 24: return {BioTacChannel::Pdc, -1};
  case 25: return {BioTacChannel::Tac, -1};
  case 26: return {BioTacChannel::Tdc, -1};
  default: return {BioTacChannel::Idle, -1};
  }
}

inline std::int64_t biotac_slot_timestamp_us(std::size_t slot) {
  return static_cast<std::int64_t>(std::llround(static_cast<double>(slot) * 1.0e6 / 4400.0));
}

struct FingertipFrame {
  FingertipKind kind = FingertipKind::BioTacSP;
  std::int64_t timestamp_us = 0;
  std::vector<std::uint16_t> values;
  std::uint16_t pac = 0, pdc = 0, tac = 0, tdc = 0; // zero for WtsFt

  bool operator==(const FingertipFrame &) const = default;
};

struct ContactField {
  std::vector<double> depths_mm; // one per sensor
  bool edge_contact = false;
};

struct NoiseConfig {
  double sigma_counts = 8.0; // BioTacSP only
  std::uint16_t pac_baseline = 2048;
  std::uint16_t tac_baseline = 2048;
  std::uint16_t tdc_baseline = 2048;
};

/// Thresholded-linear transfer with 12-bit saturation.
inline int indentation_to_reading(double depth_mm, const SensorLayout &layout) {
  if (!(depth_mm >= 0.0)) throw InputDomainError("indentation depth must be >= 0");
  if (depth_mm <= layout.delta_min_mm) return 0;
  const double counts = std::round(layout.gain * (depth_mm - layout.delta_min_mm));
  return counts >= kAdcMax ? kAdcMax : static_cast<int>(counts);
}

/// Synthesizes one frame, drawing sensor noise from `rng`.
inline FingertipFrame synthesize_frame(const SensorLayout &layout, const ContactField &field,
                                       std::int64_t timestamp_us, std::mt19937_64 &rng,
                                       const NoiseConfig &noise = {}) {
  if (field.depths_mm.size() != static_cast<std::size_t>(layout.sensor_count))
    throw ConfigError("contact field has " + std::to_string(field.depths_mm.size()) +
                      " depths, layout expects " + std::to_string(layout.sensor_count));
  for (double d : field.depths_mm)
    if (!std::isfinite(d) || d < 0.0) throw InputDomainError("contact depths must be finite and >= 0");

  FingertipFrame frame;
  frame.kind = layout.kind;
  frame.timestamp_us = timestamp_us;
  frame.values.assign(field.depths_mm.size(), 0);

  const bool blind = field.edge_contact && !layout.edge_sensitive;
  const bool noisy = layout.kind == FingertipKind::BioTacSP && noise.sigma_counts > 0.0;
  std::normal_distribution<double> gauss(0.0, noisy ? noise.sigma_counts : 1.0);

  double depth_sum = 0.0;
  for (std::size_t i = 0; i < field.depths_mm.size(); ++i) {
    depth_sum += field.depths_mm[i];
    if (blind) continue;
    double v = indentation_to_reading(field.depths_mm[i], layout);
    if (noisy) v = std::round(v + gauss(rng));
    frame.values[i] = static_cast<std::uint16_t>(std::clamp(v, 0.0, static_cast<double>(kAdcMax)));
  }

  if (layout.kind == FingertipKind::BioTacSP) {
    frame.pac = noise.pac_baseline;
    frame.tac = noise.tac_baseline;
    frame.tdc = noise.tdc_baseline;
    const double mean_depth = field.depths_mm.empty() ? 0.0 : depth_sum / field.depths_mm.size();
    frame.pdc = blind ? 0 : static_cast<std::uint16_t>(indentation_to_reading(mean_depth, layout));
  }
  return frame;
}

inline FingertipFrame synthesize_frame(const SensorLayout &layout, const ContactField &field,
                                       std::int64_t timestamp_us, std::uint64_t noise_seed,
                                       const NoiseConfig &noise = {}) {
  std::mt19937_64 rng(noise_seed);
  return synthesize_frame(layout, field, timestamp_us, rng, noise);
}

} // namespace tgrasp

#endif // TGRASP_FINGERTIP_HPP
