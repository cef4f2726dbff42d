#ifndef TGRASP_BUS_HPP
#define TGRASP_BUS_HPP

// In-process publish/subscribe bus. Each topic carries one payload
// alternative; subscribers see every message published after they
// subscribed, in publication order.

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tgrasp/errors.hpp"
#include "tgrasp/messages.hpp"

namespace tgrasp {

struct BusMessage {
  std::string topic;
  std::int64_t timestamp_us = 0;
  Payload payload;
};

class Subscription {
public:
  /// Blocks until a message arrives; empty once the bus is closed and drained.
  std::optional<BusMessage> next() {
    std::unique_lock lock(mutex_);
    ready_.wait(lock, [&] { return !queue_.empty() || closed_; });
    if (queue_.empty()) return std::nullopt;
    BusMessage m = std::move(queue_.front());
    queue_.pop_front();
    return m;
  }

  std::optional<BusMessage> try_next() {
    std::lock_guard lock(mutex_);
    if (queue_.empty()) return std::nullopt;
    BusMessage m = std::move(queue_.front());
    queue_.pop_front();
    return m;
  }

  std::size_t pending() const {
    std::lock_guard lock(mutex_);
    return queue_.size();
  }

private:
  friend class MessageBus;

  void push(const BusMessage &m) {
    {
      std::lock_guard lock(mutex_);
      queue_.push_back(m);
    }
    ready_.notify_one();
  }

  void close() {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    ready_.notify_all();
  }

  mutable std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<BusMessage> queue_;
  bool closed_ = false;
};

class MessageBus {
public:
  MessageBus() = default;
  MessageBus(const MessageBus &) = delete;
  MessageBus &operator=(const MessageBus &) = delete;

  ~MessageBus() { close(); }

  /// Registers `topic` for payload alternative T. Re-registering with the same type is a no-op.
  template <typename T> void advertise(std::string_view topic) {
    constexpr std::size_t index = variant_index<T>();
    std::lock_guard lock(mutex_);
    auto [it, inserted] = topics_.try_emplace(std::string(topic));
    if (!inserted && it->second.type_index != index)
      throw ContractError("topic '" + std::string(topic) + "' already registered with another payload type");
    it->second.type_index = index;
  }

  std::shared_ptr<Subscription> subscribe(std::string_view topic) {
    std::lock_guard lock(mutex_);
    auto it = topics_.find(std::string(topic));
    if (it == topics_.end()) throw ContractError("subscribe to unregistered topic '" + std::string(topic) + "'");
    auto sub = std::make_shared<Subscription>();
    if (closed_) sub->close();
    it->second.subscribers.push_back(sub);
    return sub;
  }

  void publish(std::string_view topic, std::int64_t timestamp_us, Payload payload) {
    std::lock_guard lock(mutex_);
    auto it = topics_.find(std::string(topic));
    if (it == topics_.end()) throw ContractError("publish on unregistered topic '" + std::string(topic) + "'");
    if (payload.index() != it->second.type_index)
      throw ContractError("payload type does not match topic '" + std::string(topic) + "'");
    const BusMessage msg{it->first, timestamp_us, std::move(payload)};
    for (auto &sub : it->second.subscribers) sub->push(msg);
  }

  /// Wakes blocked subscribers; they drain what is queued and then see end-of-stream.
  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    for (auto &[name, t] : topics_)
      for (auto &sub : t.subscribers) sub->close();
  }

  std::vector<std::string> topic_names() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto &[name, t] : topics_) out.push_back(name);
    return out;
  }

private:
  template <typename T, std::size_t I = 0> static constexpr std::size_t variant_index() {
    static_assert(I < std::variant_size_v<Payload>, "type is not a bus payload");
    if constexpr (std::is_same_v<std::variant_alternative_t<I, Payload>, T>) return I;
    else return variant_index<T, I + 1>();
  }

  struct Topic {
    std::size_t type_index = 0;
    std::vector<std::shared_ptr<Subscription>> subscribers;
  };

  mutable std::mutex mutex_;
  std::map<std::string, Topic, std::less<>> topics_;
  bool closed_ = false;
};

/// Registers the standard topic set.
inline void advertise_standard_topics(MessageBus &bus) {
  bus.advertise<RawFrames>(topics::kRaw);
  bus.advertise<NormalizedFrames>(topics::kNormalized);
  bus.advertise<ContactVector>(topics::kContact);
  bus.advertise<ContactVector>(topics::kContactGlobal);
  bus.advertise<JointState>(topics::kJointsActual);
  bus.advertise<ControlCommand>(topics::kJointsTarget);
  bus.advertise<ImuSample>(topics::kImu);
  bus.advertise<GraspStatus>(topics::kGraspStatus);
}

} // namespace tgrasp

#endif // TGRASP_BUS_HPP
