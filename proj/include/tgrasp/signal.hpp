#ifndef TGRASP_SIGNAL_HPP
#define TGRASP_SIGNAL_HPP

// Per-sensor smoothing and normalized-delta stages for fingertip streams.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "tgrasp/errors.hpp"
#include "tgrasp/fingertip.hpp"

namespace tgrasp {

/// Exponential moving average state, one filtered value per sensor.
struct FilterState {
  double retention = 0.8; // fraction of the previous filtered value kept each step
  std::vector<double> filtered;
  bool initialized = false;

  explicit FilterState(double p = 0.8) : retention(p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("filter retention must lie in [0, 1]");
  }
};

struct NormalizedFrame {
  std::int64_t timestamp_us = 0;
  std::vector<double> values;

  bool operator==(const NormalizedFrame &) const = default;
};

/// A <- P*A + (1-P)*r element-wise. The first call seeds A with r.
inline void lowpass_step(FilterState &state, std::span<const double> readings) {
  if (!state.initialized) {
    state.filtered.assign(readings.begin(), readings.end());
    state.initialized = true;
    return;
  }
  if (readings.size() != state.filtered.size()) throw ConfigError("frame shape does not match filter state");
  const double p = state.retention;
  for (std::size_t i = 0; i < readings.size(); ++i)
    state.filtered[i] = p * state.filtered[i] + (1.0 - p) * readings[i];
}

/// |A - r| per sensor, clamped to delta_max.
inline NormalizedFrame normalize_delta(const FilterState &state, std::span<const double> readings,
                                       std::int64_t timestamp_us, double delta_max = 200.0) {
  if (!state.initialized) throw StateError("normalize_delta on an uninitialized filter");
  if (readings.size() != state.filtered.size()) throw ConfigError("frame shape does not match filter state");
  NormalizedFrame out{timestamp_us, std::vector<double>(readings.size())};
  for (std::size_t i = 0; i < readings.size(); ++i)
    out.values[i] = std::min(delta_max, std::abs(state.filtered[i] - readings[i]));
  return out;
}

enum class PipelineStage : std::uint8_t { Lowpass, Normalize, Identity };

/// Which signal the contact detector thresholds.
enum class ContactSource : std::uint8_t { Normalized, Filtered, Raw };

struct PipelineDescriptor {
  std::vector<PipelineStage> stages;
};

inline PipelineDescriptor pipeline_for(FingertipKind kind) {
  if (kind == FingertipKind::BioTacSP) return {{PipelineStage::Lowpass, PipelineStage::Normalize}};
  return {{PipelineStage::Identity}};
}

inline std::vector<double> to_doubles(const FingertipFrame &frame) {
  return {frame.values.begin(), frame.values.end()};
}

/// Stateful per-fingertip processing chain.
class SignalPipeline {
public:
  SignalPipeline(FingertipKind kind, double retention = 0.8, double delta_max = 200.0,
                 ContactSource source = ContactSource::Normalized)
      : kind_(kind), descriptor_(pipeline_for(kind)), state_(retention), delta_max_(delta_max),
        source_(source) {}

  /// Feed one raw frame; returns the normalized output for this step.
  NormalizedFrame process(const FingertipFrame &frame) {
    if (frame.kind != kind_) throw ConfigError("frame kind does not match pipeline kind");
    raw_ = to_doubles(frame);
    if (kind_ == FingertipKind::WtsFt) {
      NormalizedFrame out{frame.timestamp_us, raw_};
      for (double &v : out.values) v = std::clamp(v, 0.0, static_cast<double>(kAdcMax));
      last_ = out;
      return out;
    }
    lowpass_step(state_, raw_);
    last_ = normalize_delta(state_, raw_, frame.timestamp_us, delta_max_);
    return last_;
  }

  /// The values the contact detector should threshold after the last process() call.
  std::span<const double> detection_values() const {
    if (kind_ == FingertipKind::WtsFt) return last_.values;
    switch (source_) {
    case ContactSource::Raw: return raw_;
    case ContactSource::Filtered: return state_.filtered;
    case ContactSource::Normalized: break;
    }
    return last_.values;
  }

  const PipelineDescriptor &descriptor() const noexcept { return descriptor_; }
  const FilterState &state() const noexcept { return state_; }

private:
  FingertipKind kind_;
  PipelineDescriptor descriptor_;
  FilterState state_;
  double delta_max_;
  ContactSource source_;
  std::vector<double> raw_;
  NormalizedFrame last_;
};

} // namespace tgrasp

#endif // TGRASP_SIGNAL_HPP
