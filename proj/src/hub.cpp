#include "hivemon/hub.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hivemon/errors.hpp"

namespace hivemon {

Hub::Hub(HubConfig config, Store& store) : config_(std::move(config)), store_(store) {}

Hub::HiveSlot& Hub::slot_for(const std::string& hive_id) {
    std::lock_guard lock(slots_mutex_);
    auto it = slots_.find(hive_id);
    if (it == slots_.end()) {
        auto slot = std::make_unique<HiveSlot>();
        slot->state.hive_id = hive_id;
        auto geom = config_.geometry_by_hive.find(hive_id);
        slot->state.geometry =
            geom != config_.geometry_by_hive.end() ? geom->second : config_.default_geometry;
        it = slots_.emplace(hive_id, std::move(slot)).first;
    }
    return *it->second;
}

void Hub::handle(const std::string& topic, const std::string& payload) {
    std::string topic_hive;
    TelemetryMessage msg;
    try {
        if (!topic_matches(config_.topic_filter, topic)) {
            ++rejected_payloads_;
            return;
        }
        topic_hive = parse_telemetry_topic(topic);
        msg = decode_message(payload);
    } catch (const Error&) {
        ++rejected_payloads_;
        return;
    }
    if (topic_hive != msg.hive_id) {
        ++rejected_payloads_;
        return;
    }
    ingest(msg);
}

DedupOutcome Hub::ingest(const TelemetryMessage& msg) {
    HiveSlot& slot = slot_for(msg.hive_id);
    std::lock_guard lock(slot.mutex);
    HiveIngestState& state = slot.state;

    if (msg.seq < state.next_expected_seq) {
        ++state.counters.duplicates_dropped;
        return DedupOutcome::Duplicate;
    }
    if (msg.seq == state.next_expected_seq) {
        apply(state, msg);
        drain_pending(state);
        return DedupOutcome::Accept;
    }
    // Ahead of the expected seq: hold until contiguous or until the holding
    // area outgrows the reorder window.
    if (!state.pending.emplace(msg.seq, msg).second) {
        ++state.counters.duplicates_dropped;
        return DedupOutcome::Duplicate;
    }
    flush_gap(state);
    return DedupOutcome::Buffered;
}

void Hub::apply(HiveIngestState& state, const TelemetryMessage& msg) {
    state.next_expected_seq = msg.seq + 1;

    const ForceQuad forces{msg.cells_g[0], msg.cells_g[1], msg.cells_g[2], msg.cells_g[3]};
    ComputedPoint point;
    point.total_g = forces.total();
    point.ts_ms = msg.ts_ms;
    point.seq = msg.seq;
    try {
        const Vec2 com = reconstruct_center_of_mass(forces, state.geometry, config_.epsilon_force_g);
        // Noise can push single cells slightly negative; a point outside the
        // platform is physically impossible, so persisted points are clamped
        // to it.
        point.x_mm = std::clamp(com.x, 0.0, state.geometry.length_x_mm);
        point.y_mm = std::clamp(com.y, 0.0, state.geometry.length_y_mm);
    } catch (const DegenerateLoadError&) {
        ++state.counters.degenerate_readings;
        return;
    }

    Record record;
    record.hive_id = msg.hive_id;
    record.seq = point.seq;
    record.ts_ms = point.ts_ms;
    record.cells_g = msg.cells_g;
    record.total_g = point.total_g;
    record.x_mm = point.x_mm;
    record.y_mm = point.y_mm;

    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            store_.append(record);
            ++state.counters.applied;
            return;
        } catch (const std::exception&) {
            if (attempt == 0) continue;
            ++state.counters.dead_lettered;
            std::ofstream dead(store_.directory() / "deadletter.log", std::ios::app);
            dead << encode_message(msg) << "\n";
        }
    }
}

void Hub::drain_pending(HiveIngestState& state) {
    for (auto it = state.pending.find(state.next_expected_seq); it != state.pending.end();
         it = state.pending.find(state.next_expected_seq)) {
        const TelemetryMessage msg = it->second;
        state.pending.erase(it);
        apply(state, msg);
    }
}

void Hub::flush_gap(HiveIngestState& state) {
    while (!state.pending.empty()) {
        const uint64_t max_pending = state.pending.rbegin()->first;
        const bool overflow = state.pending.size() > config_.reorder_window ||
                              max_pending - state.next_expected_seq > config_.reorder_window;
        if (!overflow) break;
        const uint64_t first_present = state.pending.begin()->first;
        ++state.counters.gaps_detected;
        state.counters.missing_seqs += first_present - state.next_expected_seq;
        state.next_expected_seq = first_present;
        drain_pending(state);
    }
}

void Hub::flush_all() {
    std::vector<HiveSlot*> slots;
    {
        std::lock_guard lock(slots_mutex_);
        for (auto& [_, slot] : slots_) slots.push_back(slot.get());
    }
    for (HiveSlot* slot : slots) {
        std::lock_guard lock(slot->mutex);
        HiveIngestState& state = slot->state;
        while (!state.pending.empty()) {
            const uint64_t first_present = state.pending.begin()->first;
            ++state.counters.gaps_detected;
            state.counters.missing_seqs += first_present - state.next_expected_seq;
            state.next_expected_seq = first_present;
            drain_pending(state);
        }
    }
}

HiveCounters Hub::counters(const std::string& hive_id) const {
    auto* self = const_cast<Hub*>(this);
    HiveSlot& slot = self->slot_for(hive_id);
    std::lock_guard lock(slot.mutex);
    return slot.state.counters;
}

uint64_t Hub::rejected_payloads() const { return rejected_payloads_.load(); }

std::string Hub::status_text() const {
    std::ostringstream out;
    std::lock_guard lock(slots_mutex_);
    for (const auto& [hive_id, slot] : slots_) {
        std::lock_guard slot_lock(slot->mutex);
        const HiveCounters& c = slot->state.counters;
        out << "hive=" << hive_id << " applied=" << c.applied
            << " duplicates=" << c.duplicates_dropped << " gaps=" << c.gaps_detected
            << " missing=" << c.missing_seqs << " degenerate=" << c.degenerate_readings
            << " deadletter=" << c.dead_lettered << " pending=" << slot->state.pending.size()
            << "\n";
    }
    out << "transport rejected_payloads=" << rejected_payloads_.load() << "\n";
    return out.str();
}

}  // namespace hivemon
