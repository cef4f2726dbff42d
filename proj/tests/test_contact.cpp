#include <gtest/gtest.h>

#include <random>
#include <span>
#include <vector>

#include "tgrasp/contact.hpp"

using namespace tgrasp;

namespace {
std::vector<double> frame_with(int n_active, int size, double zeta) {
  std::vector<double> v(static_cast<std::size_t>(size), 0.0);
  for (int i = 0; i < n_active; ++i) v[static_cast<std::size_t>(i)] = zeta;
  return v;
}
} // namespace

TEST(Activation, BoundaryIsInclusive) {
  EXPECT_EQ(sensor_activation(50.0, 50.0), 1);
  EXPECT_EQ(sensor_activation(49.999, 50.0), 0);
  EXPECT_EQ(sensor_activation(0.0, 10.0), 0);
  for (double v : {0.0, 1.0, 4095.0}) EXPECT_EQ(sensor_activation(v, 0.0), 1);
}

TEST(Detect, PsiBoundary) {
  const ContactConfig bio{60.0, 5};
  EXPECT_TRUE(detect_contact(frame_with(5, 24, 60.0), bio));
  EXPECT_FALSE(detect_contact(frame_with(4, 24, 60.0), bio));
  const ContactConfig wts{1200.0, 3};
  EXPECT_TRUE(detect_contact(frame_with(3, 32, 1200.0), wts));
  EXPECT_FALSE(detect_contact(frame_with(2, 32, 1200.0), wts));
}

TEST(Detect, ConfigValidation) {
  EXPECT_THROW((ContactConfig{-1.0, 3}.validate(24)), ConfigError);
  EXPECT_THROW((ContactConfig{1.0, 0}.validate(24)), ConfigError);
  EXPECT_THROW((ContactConfig{1.0, 25}.validate(24)), ConfigError);
  EXPECT_NO_THROW((ContactConfig{0.0, 24}.validate(24)));
}

TEST(Vector, ArityAndPerFingerDecision) {
  const ContactConfig cfg{10.0, 2};
  const auto on = frame_with(2, 24, 10.0), off = frame_with(0, 24, 10.0);
  std::vector<std::span<const double>> frames{on, off, off};
  EXPECT_EQ(contact_vector(frames, cfg), (ContactVector{{true, false, false}}));
  frames = {off, off, off};
  EXPECT_EQ(contact_vector(frames, cfg), ContactVector{});
  frames = {on, on, on};
  EXPECT_TRUE(contact_vector(frames, cfg).all());
  frames = {on, on};
  EXPECT_THROW(contact_vector(frames, cfg), ConfigError);
}

TEST(Vector, BitsRoundTrip) {
  for (std::uint8_t b = 0; b < 8; ++b) EXPECT_EQ(ContactVector::from_bits(b).bits(), b);
}

TEST(Detect, MonotoneInZetaAndPsi) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(0.0, 200.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(24);
    for (double &x : v) x = value(rng);
    for (double z = 0.0; z < 200.0; z += 10.0) {
      EXPECT_GE(activated_count(v, z), activated_count(v, z + 10.0));
      for (int psi = 1; psi < 24; ++psi) {
        if (!detect_contact(v, {z, psi})) {
          EXPECT_FALSE(detect_contact(v, {z + 10.0, psi}));
          EXPECT_FALSE(detect_contact(v, {z, psi + 1}));
        }
      }
    }
  }
}
