#pragma once

#include <stdexcept>
#include <string>

namespace hivemon {

// Base class for every error raised by this library. Each subclass carries a
// stable machine-readable code (used by the CLI for its one-line error output).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define HIVEMON_DEFINE_ERROR(NAME, CODE)                              \
    class NAME : public Error {                                       \
    public:                                                           \
        explicit NAME(const std::string& what) : Error(CODE, what) {} \
    }

// physics
HIVEMON_DEFINE_ERROR(EmptySystemError, "empty_system");
HIVEMON_DEFINE_ERROR(OutOfBoundsError, "out_of_bounds");
HIVEMON_DEFINE_ERROR(DegenerateLoadError, "degenerate_load");

// sensor node
HIVEMON_DEFINE_ERROR(ShortWindowError, "short_window");
HIVEMON_DEFINE_ERROR(UnstableTareError, "unstable_tare");

// transport
HIVEMON_DEFINE_ERROR(InvalidMessageError, "invalid_message");
HIVEMON_DEFINE_ERROR(MalformedPayloadError, "malformed_payload");
HIVEMON_DEFINE_ERROR(SchemaViolationError, "schema_violation");
HIVEMON_DEFINE_ERROR(ChannelClosedError, "channel_closed");

// store
HIVEMON_DEFINE_ERROR(OutOfOrderSeqError, "out_of_order_seq");
HIVEMON_DEFINE_ERROR(UnknownHiveError, "unknown_hive");
HIVEMON_DEFINE_ERROR(IoFailureError, "io_failure");

// scenario
HIVEMON_DEFINE_ERROR(InventoryExhaustedError, "inventory_exhausted");
HIVEMON_DEFINE_ERROR(SphereOutOfBoundsError, "sphere_out_of_bounds");
HIVEMON_DEFINE_ERROR(ScenarioParseError, "parse_error");
HIVEMON_DEFINE_ERROR(ValidationError, "validation_error");

// analysis
HIVEMON_DEFINE_ERROR(EmptyInputError, "empty_input");
HIVEMON_DEFINE_ERROR(InsufficientSpanError, "insufficient_span");

// cli
HIVEMON_DEFINE_ERROR(ConfigError, "config_error");

#undef HIVEMON_DEFINE_ERROR

}  // namespace hivemon
