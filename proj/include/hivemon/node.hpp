#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "hivemon/message.hpp"
#include "hivemon/physics.hpp"

namespace hivemon {

inline constexpr int64_t kAdcCountMin = -(int64_t{1} << 23);
inline constexpr int64_t kAdcCountMax = (int64_t{1} << 23) - 1;
inline constexpr size_t kDefaultWindow = 10;

/// Scale plus per-cell offsets, in ADC counts. Offsets are fractional counts
/// so that taring can zero an averaged reading exactly; the invariant keeps
/// them inside the 24-bit signed range.
struct Calibration {
    double scale_counts_per_g = 100.0;
    std::array<double, 4> offset_counts{};

    bool valid() const;
};

/// One four-cell ADC reading.
struct RawSample {
    std::array<int32_t, 4> counts{};
    int64_t ts_ms = 0;
};

/// Additive per-cell Gaussian noise. Same seed, same stream.
struct NoiseModel {
    double sigma_g = 5.0;
    uint64_t rng_seed = 1;
};

/// Deterministic standard-normal stream: Box-Muller over splitmix64 bits.
/// Self-contained so the stream does not depend on the standard library's
/// distribution implementation.
class GaussianSampler {
public:
    explicit GaussianSampler(uint64_t seed) : state_(seed) {}

    double next();

private:
    uint64_t next_bits();

    uint64_t state_;
    std::optional<double> spare_;
};

/// ADC model: round(force_g * scale) + offset, saturating at the 24-bit
/// signed range. `saturated`, when given, reports whether the clamp fired.
int32_t quantize(double force_g, const Calibration& cal, int cell, bool* saturated = nullptr);

/// Inverse of quantize up to the half-LSB rounding bound.
double counts_to_grams(int32_t counts, const Calibration& cal, int cell);

/// Per-cell mean of the window converted to grams. Throws ShortWindowError
/// when fewer than `window` samples are available.
std::array<double, 4> average_samples(std::span<const RawSample> samples, const Calibration& cal,
                                      size_t window = kDefaultWindow);

/// Recomputes offsets so that the averaged reading of `window` becomes 0.0 g
/// on every cell. Throws UnstableTareError when any cell's sample spread
/// exceeds 10 * sigma_g (load changed while taring).
Calibration tare_from_window(std::span<const RawSample> window, const Calibration& cal,
                             double sigma_g);

struct NodeConfig {
    std::string hive_id = "hive1";
    Calibration adc;          // simulated converter: scale plus hardware bias
    NoiseModel noise;
    size_t window = kDefaultWindow;
    bool quantize_enabled = true;
    int publish_attempts = 3;
};

/// A step's worth of ground truth for the node to sample.
struct StepReading {
    ForceQuad forces;
    int64_t ts_ms = 0;
};

/// Pull-based source of true corner forces; empty means the run is over.
using ForceSource = std::function<std::optional<StepReading>()>;

/// Accepts an encoded payload for a topic; false means this attempt failed
/// and the caller may retry.
using PublishFn = std::function<bool(const std::string& topic, const std::string& payload)>;

/// Emulates the controller firmware: samples the four cells through the ADC
/// model, averages a window per publish period, and emits telemetry with a
/// monotonically increasing sequence number.
class SensorNode {
public:
    explicit SensorNode(NodeConfig config);

    /// Reads one window of the reference state and zeroes the calibration.
    void tare(const ForceQuad& reference_forces, int64_t ts_ms = 0);

    /// Samples one window, averages it, and publishes one message. Retries
    /// failed publishes up to the configured attempt count, then drops the
    /// message; the sequence number advances either way.
    bool publish_step(const StepReading& reading, const PublishFn& publish);

    RawSample sample_raw(const ForceQuad& true_forces, int64_t ts_ms);
    std::array<double, 4> sample_window(const StepReading& reading);

    const Calibration& calibration() const { return cal_; }
    void set_calibration(const Calibration& cal) { cal_ = cal; }
    uint64_t next_seq() const { return next_seq_; }
    uint64_t saturation_count() const { return saturation_count_; }
    uint64_t dropped_publishes() const { return dropped_publishes_; }
    const std::string& topic() const { return topic_; }

private:
    std::array<double, 4> sample_counts(const ForceQuad& true_forces);

    NodeConfig config_;
    Calibration cal_;  // node-side estimate; starts with zero offsets
    GaussianSampler sampler_;
    std::string topic_;
    uint64_t next_seq_ = 0;
    uint64_t saturation_count_ = 0;
    uint64_t dropped_publishes_ = 0;
};

/// Runs a node until the force source is exhausted. Returns the number of
/// successfully published messages.
uint64_t run_node(const NodeConfig& config, const ForceSource& source, const PublishFn& publish);

}  // namespace hivemon
