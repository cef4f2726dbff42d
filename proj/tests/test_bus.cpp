#include <gtest/gtest.h>

#include <thread>

#include "tgrasp/bus.hpp"

using namespace tgrasp;

TEST(Bus, NoReplayForLateSubscribers) {
  MessageBus bus;
  bus.advertise<ContactVector>(topics::kContact);
  bus.publish(topics::kContact, 1, ContactVector{{true, false, false}});
  auto sub = bus.subscribe(topics::kContact);
  EXPECT_FALSE(sub->try_next().has_value());
  bus.publish(topics::kContact, 2, ContactVector{});
  ASSERT_EQ(sub->pending(), 1u);
  EXPECT_EQ(sub->try_next()->timestamp_us, 2);
}

TEST(Bus, SubscribersSeeIdenticalStreams) {
  MessageBus bus;
  bus.advertise<ContactVector>(topics::kContact);
  auto a = bus.subscribe(topics::kContact);
  auto b = bus.subscribe(topics::kContact);
  for (std::uint8_t i = 0; i < 8; ++i) bus.publish(topics::kContact, i, ContactVector::from_bits(i));
  for (std::uint8_t i = 0; i < 8; ++i) {
    const auto ma = a->try_next(), mb = b->try_next();
    ASSERT_TRUE(ma && mb);
    EXPECT_EQ(std::get<ContactVector>(ma->payload), std::get<ContactVector>(mb->payload));
    EXPECT_EQ(std::get<ContactVector>(ma->payload).bits(), i);
  }
}

TEST(Bus, FifoOverTenThousandMessages) {
  MessageBus bus;
  bus.advertise<ContactVector>(topics::kContact);
  auto sub = bus.subscribe(topics::kContact);
  std::thread producer([&] {
    for (int i = 0; i < 10000; ++i)
      bus.publish(topics::kContact, i, ContactVector::from_bits(static_cast<std::uint8_t>(i % 8)));
  });
  for (int i = 0; i < 10000; ++i) {
    const auto m = sub->next();
    ASSERT_TRUE(m);
    ASSERT_EQ(m->timestamp_us, i);
    ASSERT_EQ(std::get<ContactVector>(m->payload).bits(), i % 8);
  }
  producer.join();
}

TEST(Bus, TypeContracts) {
  MessageBus bus;
  bus.advertise<ContactVector>(topics::kContact);
  EXPECT_NO_THROW(bus.advertise<ContactVector>(topics::kContact));
  EXPECT_THROW(bus.advertise<JointState>(topics::kContact), ContractError);
  EXPECT_THROW(bus.publish(topics::kContact, 0, JointState{}), ContractError);
  EXPECT_THROW(bus.publish("/nowhere", 0, JointState{}), ContractError);
  EXPECT_THROW(bus.subscribe("/nowhere"), ContractError);
}

TEST(Bus, CloseWakesBlockedReaders) {
  MessageBus bus;
  bus.advertise<ContactVector>(topics::kContact);
  auto sub = bus.subscribe(topics::kContact);
  bus.publish(topics::kContact, 1, ContactVector{});
  std::thread closer([&] { bus.close(); });
  EXPECT_TRUE(sub->next().has_value()); // queued message still delivered
  EXPECT_FALSE(sub->next().has_value());
  closer.join();
}

TEST(Bus, StandardTopicsIncludeTheSensorStreams) {
  MessageBus bus;
  advertise_standard_topics(bus);
  const auto names = bus.topic_names();
  for (auto t : {"/fingertips/raw", "/fingertips/normalized", "/contact", "/joints/actual", "/joints/target", "/imu"})
    EXPECT_NE(std::find(names.begin(), names.end(), t), names.end()) << t;
}
