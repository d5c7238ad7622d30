#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "hivemon/message.hpp"
#include "hivemon/physics.hpp"
#include "hivemon/store.hpp"

namespace hivemon {

/// What the dedup filter decided about one incoming message.
enum class DedupOutcome { Accept, Duplicate, Buffered };

struct HubConfig {
    PlatformGeometry default_geometry;
    std::map<std::string, PlatformGeometry> geometry_by_hive;
    size_t reorder_window = 5;
    double epsilon_force_g = kDefaultDegenerateForceG;
    std::string topic_filter = "apiary/+/telemetry";
};

struct HiveCounters {
    uint64_t applied = 0;
    uint64_t duplicates_dropped = 0;
    uint64_t gaps_detected = 0;
    uint64_t missing_seqs = 0;
    uint64_t degenerate_readings = 0;
    uint64_t dead_lettered = 0;
};

/// Per-hive ingest state: the next expected sequence number plus a bounded
/// holding area for messages that arrived ahead of it.
struct HiveIngestState {
    std::string hive_id;
    PlatformGeometry geometry;
    uint64_t next_expected_seq = 0;
    std::map<uint64_t, TelemetryMessage> pending;
    HiveCounters counters;
};

/// Applies formulas-in-reverse to deduplicated telemetry and appends the
/// results to the store. Per-hive application is serialized; different
/// hives proceed independently.
class Hub {
public:
    Hub(HubConfig config, Store& store);

    /// Decodes and ingests one raw payload. Transport errors are counted,
    /// never thrown; this is safe to call from several connection threads.
    void handle(const std::string& topic, const std::string& payload);

    /// Dedups and applies one decoded message.
    DedupOutcome ingest(const TelemetryMessage& msg);

    /// End-of-stream: applies everything still held in reorder buffers,
    /// recording gaps for the seqs that never arrived.
    void flush_all();

    HiveCounters counters(const std::string& hive_id) const;
    uint64_t rejected_payloads() const;

    /// One line per hive plus a transport line, for the status dump.
    std::string status_text() const;

private:
    struct HiveSlot {
        std::mutex mutex;
        HiveIngestState state;
    };

    HiveSlot& slot_for(const std::string& hive_id);
    void apply(HiveIngestState& state, const TelemetryMessage& msg);
    void drain_pending(HiveIngestState& state);
    void flush_gap(HiveIngestState& state);

    HubConfig config_;
    Store& store_;
    mutable std::mutex slots_mutex_;
    std::map<std::string, std::unique_ptr<HiveSlot>> slots_;
    std::atomic<uint64_t> rejected_payloads_{0};
};

}  // namespace hivemon
