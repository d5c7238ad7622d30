#include "hivemon/message.hpp"

#include <cmath>

#include <json.hpp>

#include "hivemon/errors.hpp"

namespace hivemon {

namespace {

constexpr std::string_view kTopicPrefix = "apiary/";
constexpr std::string_view kTopicSuffix = "/telemetry";

bool valid_id_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

void check_invariants(const TelemetryMessage& msg, const char* context) {
    if (!valid_hive_id(msg.hive_id)) {
        throw InvalidMessageError(std::string(context) + ": bad hive_id '" + msg.hive_id + "'");
    }
    for (double v : msg.cells_g) {
        if (!std::isfinite(v)) {
            throw InvalidMessageError(std::string(context) + ": non-finite cell value");
        }
    }
}

}  // namespace

bool valid_hive_id(const std::string& id) {
    if (id.empty() || id.size() > 64) return false;
    for (char c : id) {
        if (!valid_id_char(c)) return false;
    }
    return true;
}

std::string encode_message(const TelemetryMessage& msg) {
    check_invariants(msg, "encode_message");
    nlohmann::ordered_json j;
    j["hive_id"] = msg.hive_id;
    j["seq"] = msg.seq;
    j["ts_ms"] = msg.ts_ms;
    j["cells_g"] = msg.cells_g;
    return j.dump();
}

TelemetryMessage decode_message(const std::string& payload) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(payload);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedPayloadError(std::string("bad payload syntax: ") + e.what());
    }

    if (!j.is_object()) throw SchemaViolationError("payload is not a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "hive_id" && key != "seq" && key != "ts_ms" && key != "cells_g") {
            throw SchemaViolationError("unexpected key '" + key + "'");
        }
    }
    for (const char* key : {"hive_id", "seq", "ts_ms", "cells_g"}) {
        if (!j.contains(key)) throw SchemaViolationError(std::string("missing key '") + key + "'");
    }

    TelemetryMessage msg;
    if (!j["hive_id"].is_string()) throw SchemaViolationError("hive_id is not a string");
    msg.hive_id = j["hive_id"].get<std::string>();
    if (!valid_hive_id(msg.hive_id)) {
        throw SchemaViolationError("hive_id '" + msg.hive_id + "' violates the character-set rule");
    }

    if (!j["seq"].is_number_unsigned()) throw SchemaViolationError("seq is not an unsigned integer");
    msg.seq = j["seq"].get<uint64_t>();

    if (!j["ts_ms"].is_number_integer()) throw SchemaViolationError("ts_ms is not an integer");
    msg.ts_ms = j["ts_ms"].get<int64_t>();

    const auto& cells = j["cells_g"];
    if (!cells.is_array() || cells.size() != 4) {
        throw SchemaViolationError("cells_g must be an array of 4 numbers");
    }
    for (size_t i = 0; i < 4; ++i) {
        if (!cells[i].is_number()) throw SchemaViolationError("cells_g element is not a number");
        msg.cells_g[i] = cells[i].get<double>();
        if (!std::isfinite(msg.cells_g[i])) {
            throw SchemaViolationError("cells_g element is not finite");
        }
    }
    return msg;
}

std::string telemetry_topic(const std::string& hive_id) {
    if (!valid_hive_id(hive_id)) {
        throw InvalidMessageError("telemetry_topic: bad hive_id '" + hive_id + "'");
    }
    return std::string(kTopicPrefix) + hive_id + std::string(kTopicSuffix);
}

std::string parse_telemetry_topic(const std::string& topic) {
    if (topic.size() <= kTopicPrefix.size() + kTopicSuffix.size() ||
        topic.compare(0, kTopicPrefix.size(), kTopicPrefix) != 0 ||
        topic.compare(topic.size() - kTopicSuffix.size(), kTopicSuffix.size(), kTopicSuffix) != 0) {
        throw SchemaViolationError("topic '" + topic + "' does not match apiary/<hive_id>/telemetry");
    }
    std::string hive_id =
        topic.substr(kTopicPrefix.size(), topic.size() - kTopicPrefix.size() - kTopicSuffix.size());
    if (!valid_hive_id(hive_id)) {
        throw SchemaViolationError("topic '" + topic + "' embeds an invalid hive id");
    }
    return hive_id;
}

bool topic_matches(const std::string& filter, const std::string& topic) {
    // Level-by-level comparison; '+' matches exactly one level.
    size_t fi = 0, ti = 0;
    while (fi < filter.size() && ti < topic.size()) {
        const size_t fe = filter.find('/', fi);
        const size_t te = topic.find('/', ti);
        const std::string flevel = filter.substr(fi, fe == std::string::npos ? fe : fe - fi);
        const std::string tlevel = topic.substr(ti, te == std::string::npos ? te : te - ti);
        if (flevel != "+" && flevel != tlevel) return false;
        if (fe == std::string::npos && te == std::string::npos) return true;
        if (fe == std::string::npos || te == std::string::npos) return false;
        fi = fe + 1;
        ti = te + 1;
    }
    return fi >= filter.size() && ti >= topic.size();
}

}  // namespace hivemon
