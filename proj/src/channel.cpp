#include "hivemon/channel.hpp"

#include "hivemon/errors.hpp"
#include "hivemon/message.hpp"

namespace hivemon {

std::optional<Delivery> Subscription::pop_locked() {
    if (heap_.empty()) return std::nullopt;
    // A buffered message is releasable once no future publish can precede it
    // in key order (every future key exceeds the newest publish index).
    if (!closed_ && heap_.top().key > max_index_) return std::nullopt;
    Delivery d = heap_.top().delivery;
    heap_.pop();
    return d;
}

std::optional<Delivery> Subscription::try_pop() {
    std::lock_guard lock(mutex_);
    return pop_locked();
}

std::optional<Delivery> Subscription::wait_pop() {
    std::unique_lock lock(mutex_);
    for (;;) {
        if (auto d = pop_locked()) return d;
        if (closed_) return std::nullopt;
        cv_.wait(lock);
    }
}

bool Subscription::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

Channel::Channel(FaultConfig faults) : faults_(faults), rng_state_(faults.rng_seed) {}

uint64_t Channel::next_bits() {
    // splitmix64
    rng_state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = rng_state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Channel::next_unit() { return double(next_bits() >> 11) * 0x1.0p-53; }

std::shared_ptr<Subscription> Channel::subscribe(std::string topic_filter) {
    std::lock_guard lock(mutex_);
    if (closed_) throw ChannelClosedError("subscribe on a closed channel");
    auto sub = std::make_shared<Subscription>();
    sub->filter_ = std::move(topic_filter);
    subscriptions_.push_back(sub);
    return sub;
}

bool Channel::publish(const std::string& topic, const std::string& payload) {
    std::lock_guard lock(mutex_);
    if (closed_) throw ChannelClosedError("publish on a closed channel");

    // Fault decisions are drawn per publish attempt, independent of the
    // subscriber set, so a fixed seed gives a fixed fault schedule.
    const bool drop = faults_.drop_rate > 0.0 && next_unit() < faults_.drop_rate;
    const bool duplicate = faults_.duplicate_rate > 0.0 && next_unit() < faults_.duplicate_rate;
    uint64_t offset_a = 0;
    uint64_t offset_b = 0;
    if (faults_.reorder_window > 0) {
        offset_a = next_bits() % (faults_.reorder_window + 1);
        offset_b = next_bits() % (faults_.reorder_window + 1);
    }
    if (drop) return false;

    const uint64_t index = publish_index_++;
    for (auto& sub : subscriptions_) {
        if (!topic_matches(sub->filter_, topic)) continue;
        std::lock_guard sub_lock(sub->mutex_);
        sub->max_index_ = index;
        sub->heap_.push({index + offset_a, sub->order_counter_++, {topic, payload}});
        if (duplicate) {
            sub->heap_.push({index + offset_b, sub->order_counter_++, {topic, payload}});
        }
        sub->cv_.notify_all();
    }
    return true;
}

void Channel::close() {
    std::lock_guard lock(mutex_);
    if (closed_) return;
    closed_ = true;
    for (auto& sub : subscriptions_) {
        std::lock_guard sub_lock(sub->mutex_);
        sub->closed_ = true;
        sub->cv_.notify_all();
    }
}

}  // namespace hivemon
