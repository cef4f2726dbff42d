#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tgrasp/signal.hpp"

using namespace tgrasp;

TEST(Lowpass, FirstFrameSeedsState) {
  FilterState s(0.8);
  const std::vector<double> r{100.0, 200.0};
  lowpass_step(s, r);
  EXPECT_TRUE(s.initialized);
  EXPECT_EQ(s.filtered, r);
}

TEST(Lowpass, ElementWiseUpdate) {
  FilterState s(0.8);
  lowpass_step(s, std::vector<double>{0.0, 100.0});
  lowpass_step(s, std::vector<double>{100.0, 100.0});
  EXPECT_DOUBLE_EQ(s.filtered[0], 0.8 * 0.0 + 0.2 * 100.0);
  EXPECT_DOUBLE_EQ(s.filtered[1], 100.0);
}

TEST(Lowpass, ExtremeRetention) {
  FilterState identity(0.0), hold(1.0);
  lowpass_step(identity, std::vector<double>{5.0});
  lowpass_step(hold, std::vector<double>{5.0});
  for (double r : {17.0, -3.0, 4095.0}) {
    lowpass_step(identity, std::vector<double>{r});
    lowpass_step(hold, std::vector<double>{r});
    EXPECT_EQ(identity.filtered[0], r);
    EXPECT_EQ(hold.filtered[0], 5.0);
  }
}

TEST(Lowpass, RejectsBadRetentionAndShape) {
  EXPECT_THROW(FilterState(-0.1), ConfigError);
  EXPECT_THROW(FilterState(1.5), ConfigError);
  FilterState s;
  lowpass_step(s, std::vector<double>{1.0, 2.0});
  EXPECT_THROW(lowpass_step(s, std::vector<double>{1.0}), ConfigError);
}

TEST(Normalize, DeltaAndClamp) {
  FilterState s(0.5);
  lowpass_step(s, std::vector<double>{0.0, 0.0});
  const std::vector<double> r{100.0, 1000.0};
  lowpass_step(s, r);
  const auto n = normalize_delta(s, r, 7, 200.0);
  EXPECT_EQ(n.timestamp_us, 7);
  EXPECT_DOUBLE_EQ(n.values[0], 50.0);
  EXPECT_DOUBLE_EQ(n.values[1], 200.0);
}

TEST(Normalize, UninitializedFilterIsAStateError) {
  FilterState s;
  EXPECT_THROW(normalize_delta(s, std::vector<double>{1.0}, 0), StateError);
}

TEST(Normalize, ConstantInputDecaysToZero) {
  FilterState s(0.8);
  lowpass_step(s, std::vector<double>{0.0});
  const std::vector<double> r{1000.0};
  double prev = 1e9;
  for (int k = 0; k < 200; ++k) {
    lowpass_step(s, r);
    const double v = normalize_delta(s, r, 0, 1e9).values[0];
    EXPECT_LE(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-9);
}

TEST(Pipeline, DescriptorsPerKind) {
  EXPECT_EQ(pipeline_for(FingertipKind::BioTacSP).stages,
            (std::vector{PipelineStage::Lowpass, PipelineStage::Normalize}));
  EXPECT_EQ(pipeline_for(FingertipKind::WtsFt).stages, std::vector{PipelineStage::Identity});
}

TEST(Pipeline, WtsPassesRawThrough) {
  SignalPipeline p(FingertipKind::WtsFt);
  FingertipFrame f;
  f.kind = FingertipKind::WtsFt;
  f.timestamp_us = 3;
  f.values.assign(32, 0);
  f.values[5] = 1234;
  const auto out = p.process(f);
  EXPECT_EQ(out.values[5], 1234.0);
  EXPECT_EQ(std::vector<double>(p.detection_values().begin(), p.detection_values().end()), out.values);
}

TEST(Pipeline, BioTacSourceSelection) {
  FingertipFrame f;
  f.values.assign(24, 100);
  FingertipFrame g = f;
  g.values.assign(24, 300);
  for (auto src : {ContactSource::Normalized, ContactSource::Filtered, ContactSource::Raw}) {
    SignalPipeline p(FingertipKind::BioTacSP, 0.5, 200.0, src);
    p.process(f);
    const auto n = p.process(g);
    const double expected = src == ContactSource::Raw ? 300.0 : src == ContactSource::Filtered ? 200.0 : 100.0;
    EXPECT_DOUBLE_EQ(p.detection_values()[0], expected);
    EXPECT_DOUBLE_EQ(n.values[0], 100.0);
  }
}

TEST(Pipeline, KindMismatchRejected) {
  SignalPipeline p(FingertipKind::BioTacSP);
  FingertipFrame f;
  f.kind = FingertipKind::WtsFt;
  f.values.assign(32, 0);
  EXPECT_THROW(p.process(f), ConfigError);
}
