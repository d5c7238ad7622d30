#pragma once

#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <string>
#include <vector>

namespace hivemon {

/// Fault injection knobs for the in-process channel. All off by default;
/// a reorder_window of 0 means in-order delivery.
struct FaultConfig {
    double duplicate_rate = 0.0;
    double drop_rate = 0.0;
    size_t reorder_window = 0;
    uint64_t rng_seed = 1;
};

struct Delivery {
    std::string topic;
    std::string payload;
};

/// One subscriber's delivery stream. Messages are released in key order,
/// where each message's key is its publish index plus a random offset in
/// [0, reorder_window]; that bounds displacement by the window size.
class Subscription {
public:
    /// Next deliverable message, if any is releasable right now.
    std::optional<Delivery> try_pop();

    /// Blocks until a message is releasable or the channel closes.
    /// nullopt means closed and fully drained.
    std::optional<Delivery> wait_pop();

    bool closed() const;

private:
    friend class Channel;

    struct Entry {
        uint64_t key;
        uint64_t order;
        Delivery delivery;
        bool operator>(const Entry& other) const {
            return key != other.key ? key > other.key : order > other.order;
        }
    };

    std::optional<Delivery> pop_locked();

    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::string filter_;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap_;
    uint64_t max_index_ = 0;
    uint64_t order_counter_ = 0;
    bool closed_ = false;
};

/// Broker-like in-process channel with an at-least-once contract: an acked
/// publish is enqueued to every matching subscriber; fault injection may
/// duplicate it or delay it within the reorder window, never corrupt it.
class Channel {
public:
    explicit Channel(FaultConfig faults = {});

    /// Registers a subscriber; only publishes after this call are seen.
    std::shared_ptr<Subscription> subscribe(std::string topic_filter);

    /// True = acked (enqueued everywhere it matches). False = this attempt
    /// was dropped by fault injection; the caller may retry. Throws
    /// ChannelClosedError after close().
    bool publish(const std::string& topic, const std::string& payload);

    /// Stops accepting publishes and lets subscribers drain what is left.
    void close();

private:
    uint64_t next_bits();
    double next_unit();

    std::mutex mutex_;
    FaultConfig faults_;
    uint64_t rng_state_;
    uint64_t publish_index_ = 0;
    bool closed_ = false;
    std::vector<std::shared_ptr<Subscription>> subscriptions_;
};

}  // namespace hivemon
