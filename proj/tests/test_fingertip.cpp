#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tgrasp/fingertip.hpp"

using namespace tgrasp;

namespace {

ContactField uniform_field(const SensorLayout &l, double depth) {
  ContactField f;
  f.depths_mm.assign(static_cast<std::size_t>(l.sensor_count), depth);
  return f;
}

NoiseConfig quiet() {
  NoiseConfig n;
  n.sigma_counts = 0.0;
  return n;
}

} // namespace

TEST(Layout, DefaultsValidate) {
  for (auto k : {FingertipKind::BioTacSP, FingertipKind::WtsFt}) EXPECT_NO_THROW(default_layout(k).validate());
  EXPECT_EQ(default_layout(FingertipKind::BioTacSP).sensor_count, 24);
  EXPECT_EQ(default_layout(FingertipKind::BioTacSP).scalar_channels, 4);
  EXPECT_EQ(default_layout(FingertipKind::WtsFt).sensor_count, 32);
  EXPECT_EQ(default_layout(FingertipKind::WtsFt).scalar_channels, 0);
}

TEST(Layout, RejectsBrokenInvariants) {
  auto l = default_layout(FingertipKind::BioTacSP);
  l.sensor_count = 23;
  EXPECT_THROW(l.validate(), ConfigError);
  l = default_layout(FingertipKind::WtsFt);
  l.positions.pop_back();
  EXPECT_THROW(l.validate(), ConfigError);
  l = default_layout(FingertipKind::WtsFt);
  l.delta_min_mm = 0.0;
  EXPECT_THROW(l.validate(), ConfigError);
}

TEST(Layout, WtsGridIsRowMajorFourByEight) {
  const auto p = wts_grid_positions();
  ASSERT_EQ(p.size(), 32u);
  EXPECT_DOUBLE_EQ(p[0].u, 0.125);
  EXPECT_DOUBLE_EQ(p[0].v, 0.0625);
  EXPECT_DOUBLE_EQ(p[3].u, 0.875);
  EXPECT_DOUBLE_EQ(p[4].v, 0.1875);
}

TEST(Layout, KindNamesRoundTrip) {
  for (auto k : {FingertipKind::BioTacSP, FingertipKind::WtsFt}) EXPECT_EQ(parse_kind(to_string(k)), k);
  EXPECT_THROW(parse_kind("gelsight"), LookupError);
}

TEST(Schedule, RatesMatchDeviceTables) {
  const auto b = sample_schedule(FingertipKind::BioTacSP);
  EXPECT_EQ(b.electrode_hz, 73.0);
  EXPECT_EQ(b.pac_hz, 2200.0);
  EXPECT_EQ(b.pdc_hz, 73.0);
  EXPECT_EQ(b.tac_hz, 73.0);
  EXPECT_EQ(b.tdc_hz, 73.0);
  EXPECT_EQ(b.aggregate_hz, 4400.0);
  EXPECT_EQ(sample_schedule(FingertipKind::WtsFt).cell_hz, 400.0);
}

TEST(Schedule, SlotCycleCounts) {
  int pac = 0, pdc = 0, tac = 0, tdc = 0, idle = 0;
  std::array<int, 24> electrodes{};
  for (std::size_t s = 0; s < 4400; ++s) {
    const auto slot = biotac_slot(s);
    switch (slot.channel) {
    case BioTacChannel::Pac: ++pac; break;
    case BioTacChannel::Electrode: ++electrodes[static_cast<std::size_t>(slot.electrode)]; break;
    case BioTacChannel::Pdc: ++pdc; break;
    case BioTacChannel::Tac: ++tac; break;
    case BioTacChannel::Tdc: ++tdc; break;
    case BioTacChannel::Idle: ++idle; break;
    }
  }
  EXPECT_EQ(pac, 2200);
  // 4400 slots = 73 full cycles + 20 slots
  for (int n : electrodes) EXPECT_NEAR(n, 73, 1);
  EXPECT_EQ(pdc, 73);
  EXPECT_EQ(tac, 73);
  EXPECT_EQ(tdc, 73);
  EXPECT_EQ(biotac_slot_timestamp_us(4400), 1000000);
}

TEST(Transfer, ThresholdAndGain) {
  const auto l = default_layout(FingertipKind::BioTacSP);
  EXPECT_EQ(indentation_to_reading(0.0, l), 0);
  EXPECT_EQ(indentation_to_reading(5.0, l), 0);
  EXPECT_EQ(indentation_to_reading(5.5, l), 200);
  EXPECT_EQ(indentation_to_reading(6.0, l), 400);
  EXPECT_EQ(indentation_to_reading(100.0, l), kAdcMax);
  EXPECT_THROW(indentation_to_reading(-0.1, l), InputDomainError);
}

TEST(Transfer, MonotoneInDepth) {
  const auto l = default_layout(FingertipKind::WtsFt);
  int prev = 0;
  for (int i = 0; i <= 800; ++i) {
    const int v = indentation_to_reading(i * 0.05, l);
    EXPECT_GE(v, prev);
    EXPECT_LE(v, kAdcMax);
    prev = v;
  }
}

TEST(Synthesis, NoContactIsZeroWithoutNoise) {
  for (auto k : {FingertipKind::BioTacSP, FingertipKind::WtsFt}) {
    const auto l = default_layout(k);
    const auto f = synthesize_frame(l, uniform_field(l, 0.0), 0, 1, quiet());
    EXPECT_TRUE(std::all_of(f.values.begin(), f.values.end(), [](auto v) { return v == 0; }));
    EXPECT_EQ(f.pdc, 0);
  }
}

TEST(Synthesis, SaturatesAtFullScale) {
  const auto l = default_layout(FingertipKind::WtsFt);
  const auto f = synthesize_frame(l, uniform_field(l, 1000.0), 0, 1, quiet());
  EXPECT_TRUE(std::all_of(f.values.begin(), f.values.end(), [](auto v) { return v == kAdcMax; }));
}

TEST(Synthesis, EdgeContactBlindsFlatPad) {
  const auto l = default_layout(FingertipKind::WtsFt);
  auto field = uniform_field(l, 40.0);
  field.edge_contact = true;
  const auto f = synthesize_frame(l, field, 0, 1, quiet());
  EXPECT_TRUE(std::all_of(f.values.begin(), f.values.end(), [](auto v) { return v == 0; }));

  const auto b = default_layout(FingertipKind::BioTacSP);
  auto bf = uniform_field(b, 10.0);
  bf.edge_contact = true;
  EXPECT_EQ(synthesize_frame(b, bf, 0, 1, quiet()).values[0], 2000);
}

TEST(Synthesis, ShapeMismatchAndBadDepths) {
  const auto l = default_layout(FingertipKind::BioTacSP);
  ContactField f;
  f.depths_mm.assign(10, 0.0);
  EXPECT_THROW(synthesize_frame(l, f, 0, 1), ConfigError);
  auto g = uniform_field(l, 0.0);
  g.depths_mm[3] = std::nan("");
  EXPECT_THROW(synthesize_frame(l, g, 0, 1), InputDomainError);
}

TEST(Synthesis, NoiseIsSeededAndBounded) {
  const auto l = default_layout(FingertipKind::BioTacSP);
  const auto field = uniform_field(l, 7.0);
  const auto a = synthesize_frame(l, field, 10, 42);
  const auto b = synthesize_frame(l, field, 10, 42);
  const auto c = synthesize_frame(l, field, 10, 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  double mean = 0.0;
  for (auto v : a.values) mean += v;
  mean /= static_cast<double>(a.values.size());
  EXPECT_NEAR(mean, 800.0, 8.0 * 4); // well inside 4 standard errors of sigma=8
}

TEST(Synthesis, NoiseStdDevMatchesConfig) {
  const auto l = default_layout(FingertipKind::BioTacSP);
  const auto field = uniform_field(l, 10.0);
  std::mt19937_64 rng(9);
  double sum = 0.0, sq = 0.0;
  int n = 0;
  for (int i = 0; i < 2000; ++i)
    for (auto v : synthesize_frame(l, field, 0, rng).values) {
      const double e = v - 2000.0;
      sum += e;
      sq += e * e;
      ++n;
    }
  const double sd = std::sqrt(sq / n - (sum / n) * (sum / n));
  EXPECT_NEAR(sd, 8.0, 0.2);
}

TEST(Synthesis, WtsIsNoiseFree) {
  const auto l = default_layout(FingertipKind::WtsFt);
  const auto f = synthesize_frame(l, uniform_field(l, 31.0), 0, 5);
  EXPECT_TRUE(std::all_of(f.values.begin(), f.values.end(), [](auto v) { return v == 400; }));
}
