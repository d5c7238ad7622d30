#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace hivemon {

/// One averaged four-cell reading as it travels from a node to the hub.
struct TelemetryMessage {
    std::string hive_id;
    uint64_t seq = 0;
    int64_t ts_ms = 0;
    std::array<double, 4> cells_g{};

    friend bool operator==(const TelemetryMessage&, const TelemetryMessage&) = default;
};

/// True when id is 1..64 chars drawn from [a-z0-9_-].
bool valid_hive_id(const std::string& id);

/// Canonical JSON payload: exactly the keys hive_id, seq, ts_ms, cells_g in
/// that order, no extra whitespace. Stable bytes for stable input. Throws
/// InvalidMessageError when the message violates its invariants.
std::string encode_message(const TelemetryMessage& msg);

/// Parses canonical or key-reordered payloads and validates every invariant.
/// Throws MalformedPayloadError on bad syntax and SchemaViolationError on
/// missing/extra keys, wrong arity or types, or non-finite cell values.
TelemetryMessage decode_message(const std::string& payload);

/// Topic convention: apiary/<hive_id>/telemetry.
std::string telemetry_topic(const std::string& hive_id);

/// Extracts the hive id from a telemetry topic. Throws SchemaViolationError
/// when the topic does not follow the convention or embeds a bad hive id.
std::string parse_telemetry_topic(const std::string& topic);

/// MQTT-style single-level wildcard match; "apiary/+/telemetry" matches the
/// telemetry topic of any hive.
bool topic_matches(const std::string& filter, const std::string& topic);

}  // namespace hivemon
