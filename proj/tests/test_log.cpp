#include <gtest/gtest.h>

#include "tgrasp/log.hpp"

using namespace tgrasp;

namespace {

RunLog sample_log() {
  RunLog log;
  log.meta = {{"run_id", "unit"}, {"kind", "biotac"}};
  RawFrames raw;
  for (auto &f : raw.fingers) {
    f.kind = FingertipKind::BioTacSP;
    f.timestamp_us = 20000;
    f.values.assign(24, 0);
    f.values[2] = 4095;
    f.pac = 2048;
    f.pdc = 17;
  }
  NormalizedFrames norm;
  for (auto &f : norm.fingers) f = {20000, std::vector<double>(24, 0.125)};
  log.records = {
      {TopicId::JointsTarget, 0, ControlCommand{Phase::Pickup, false, {0.85, 0.85, 0.85, 0.85, 0.85, 0.85}}},
      {TopicId::Raw, 20000, raw},
      {TopicId::Normalized, 20000, norm},
      {TopicId::Contact, 20000, ContactVector{{true, false, true}}},
      {TopicId::JointsActual, 20000, JointState{{0.9, 0.9, 0.8, 0.8, 0.7, 0.7}}},
      {TopicId::Imu, 20000, ImuSample{20000, 0.25, -0.5}},
      {TopicId::GraspStatus, 20000, GraspStatus{OutcomeStatus::Slipped, 1.5, 1.002, false}},
  };
  log.outcome = {OutcomeStatus::Held, 0.0, 1.0028, false};
  log.outcome_timestamp_us = 40000;
  return log;
}

} // namespace

TEST(LogFormat, HeaderLayout) {
  const auto bytes = encode_log(sample_log());
  ASSERT_GT(bytes.size(), 16u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 8), "TGRASPLG");
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[9], 0);
  const std::uint32_t meta_len = bytes[12] | bytes[13] << 8 | bytes[14] << 16 | bytes[15] << 24;
  EXPECT_EQ(meta_len, sample_log().meta.dump().size());
}

TEST(LogFormat, RoundTripIsLossless) {
  const RunLog log = sample_log();
  const auto bytes = encode_log(log);
  const RunLog back = decode_log(bytes);
  EXPECT_EQ(back.meta, log.meta);
  EXPECT_EQ(back.records, log.records);
  EXPECT_EQ(back.outcome, log.outcome);
  EXPECT_EQ(back.outcome_timestamp_us, log.outcome_timestamp_us);
  EXPECT_EQ(encode_log(back), bytes);
}

TEST(LogFormat, EveryTruncationIsAParseError) {
  const auto bytes = encode_log(sample_log());
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(n));
    try {
      decode_log(cut);
      FAIL() << "accepted a log truncated to " << n << " bytes";
    } catch (const ParseError &e) {
      EXPECT_LE(e.offset(), n);
    }
  }
}

TEST(LogFormat, CorruptionIsReportedWithOffset) {
  auto bytes = encode_log(sample_log());
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_log(bad_magic), ParseError);

  auto bad_version = bytes;
  bad_version[8] = 9;
  EXPECT_THROW(decode_log(bad_version), ParseError);

  const std::size_t first_record = 16 + sample_log().meta.dump().size();
  auto bad_topic = bytes;
  bad_topic[first_record + 4] = 42;
  try {
    decode_log(bad_topic);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.offset(), first_record + 4);
    EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos);
  }

  auto trailing = bytes;
  trailing.insert(trailing.end(), {1, 0, 0, 0, 3});
  EXPECT_THROW(decode_log(trailing), ParseError);
}

TEST(LogFormat, RecordsSortByTimeThenTopic) {
  std::vector<LogRecord> r{{TopicId::Imu, 5, ImuSample{}},
                           {TopicId::Raw, 10, RawFrames{}},
                           {TopicId::Contact, 5, ContactVector{}},
                           {TopicId::JointsTarget, 0, ControlCommand{}}};
  sort_records(r);
  EXPECT_EQ(r[0].timestamp_us, 0);
  EXPECT_EQ(r[1].topic, TopicId::Contact);
  EXPECT_EQ(r[2].topic, TopicId::Imu);
  EXPECT_EQ(r[3].topic, TopicId::Raw);
}

TEST(Csv, RoundTripOfRecord) {
  RunLog log = sample_log();
  log.meta = {{"run_id", "r1"}, {"kind", "biotac"}, {"object", "can"}, {"added_mass_g", 30.0}};
  const ExperimentRecord rec = record_from_log(log);
  ASSERT_FALSE(rec.rows.empty());
  const ExperimentRecord back = parse_csv(to_csv(rec));
  EXPECT_EQ(back, rec);
}

TEST(Csv, NumbersSurviveExactly) {
  EXPECT_EQ(detail::parse_double(detail::fmt_double(0.1 + 0.2)), 0.1 + 0.2);
  EXPECT_EQ(detail::parse_double(detail::fmt_double(-1.0e-300)), -1.0e-300);
  EXPECT_THROW(detail::parse_double("1.5x"), ParseError);
}
