#include "hivemon/node.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <vector>

#include "hivemon/errors.hpp"

namespace hivemon {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double cell_force(const ForceQuad& q, int cell) {
    switch (cell) {
        case 0: return q.f1;
        case 1: return q.f2;
        case 2: return q.f3;
        default: return q.f4;
    }
}

}  // namespace

bool Calibration::valid() const {
    if (!(scale_counts_per_g > 0.0)) return false;
    for (double off : offset_counts) {
        if (!std::isfinite(off) || off < double(kAdcCountMin) || off > double(kAdcCountMax)) {
            return false;
        }
    }
    return true;
}

uint64_t GaussianSampler::next_bits() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double GaussianSampler::next() {
    if (spare_) {
        double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = double((next_bits() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = double(next_bits() >> 11) * 0x1.0p-53;        // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(kTwoPi * u2);
    return radius * std::cos(kTwoPi * u2);
}

int32_t quantize(double force_g, const Calibration& cal, int cell, bool* saturated) {
    const double counts = std::round(force_g * cal.scale_counts_per_g) + cal.offset_counts[cell];
    const double clamped = std::clamp(counts, double(kAdcCountMin), double(kAdcCountMax));
    if (saturated) *saturated = clamped != counts;
    return int32_t(std::llround(clamped));
}

double counts_to_grams(int32_t counts, const Calibration& cal, int cell) {
    return (double(counts) - cal.offset_counts[cell]) / cal.scale_counts_per_g;
}

std::array<double, 4> average_samples(std::span<const RawSample> samples, const Calibration& cal,
                                      size_t window) {
    if (samples.size() < window) {
        throw ShortWindowError("got " + std::to_string(samples.size()) + " samples, need " +
                               std::to_string(window));
    }
    std::array<double, 4> mean{};
    for (const auto& s : samples) {
        for (int cell = 0; cell < 4; ++cell) {
            mean[cell] += counts_to_grams(s.counts[cell], cal, cell);
        }
    }
    for (auto& v : mean) v /= double(samples.size());
    return mean;
}

Calibration tare_from_window(std::span<const RawSample> window, const Calibration& cal,
                             double sigma_g) {
    if (window.empty()) throw ShortWindowError("tare needs a non-empty window");
    Calibration tared = cal;
    for (int cell = 0; cell < 4; ++cell) {
        double sum = 0.0;
        double lo = double(window.front().counts[cell]);
        double hi = lo;
        for (const auto& s : window) {
            const double c = double(s.counts[cell]);
            sum += c;
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        const double spread_g = (hi - lo) / cal.scale_counts_per_g;
        if (spread_g > 10.0 * sigma_g) {
            throw UnstableTareError("cell " + std::to_string(cell + 1) + " spread " +
                                    std::to_string(spread_g) + " g exceeds 10*sigma during tare");
        }
        tared.offset_counts[cell] = sum / double(window.size());
    }
    return tared;
}

SensorNode::SensorNode(NodeConfig config)
    : config_(std::move(config)),
      sampler_(config_.noise.rng_seed),
      topic_(telemetry_topic(config_.hive_id)) {
    cal_.scale_counts_per_g = config_.adc.scale_counts_per_g;
    cal_.offset_counts = {};
}

std::array<double, 4> SensorNode::sample_counts(const ForceQuad& true_forces) {
    std::array<double, 4> counts{};
    for (int cell = 0; cell < 4; ++cell) {
        double g = cell_force(true_forces, cell);
        if (config_.noise.sigma_g > 0.0) g += config_.noise.sigma_g * sampler_.next();
        if (config_.quantize_enabled) {
            bool saturated = false;
            counts[cell] = double(quantize(g, config_.adc, cell, &saturated));
            if (saturated) ++saturation_count_;
        } else {
            // Pass-through converter: same affine chain, no rounding.
            counts[cell] = g * config_.adc.scale_counts_per_g + config_.adc.offset_counts[cell];
        }
    }
    return counts;
}

RawSample SensorNode::sample_raw(const ForceQuad& true_forces, int64_t ts_ms) {
    RawSample s;
    s.ts_ms = ts_ms;
    for (int cell = 0; cell < 4; ++cell) {
        double g = cell_force(true_forces, cell);
        if (config_.noise.sigma_g > 0.0) g += config_.noise.sigma_g * sampler_.next();
        bool saturated = false;
        s.counts[cell] = quantize(g, config_.adc, cell, &saturated);
        if (saturated) ++saturation_count_;
    }
    return s;
}

void SensorNode::tare(const ForceQuad& reference_forces, int64_t ts_ms) {
    std::vector<RawSample> window(config_.window);
    std::vector<std::array<double, 4>> raw(config_.window);
    for (size_t i = 0; i < config_.window; ++i) {
        raw[i] = sample_counts(reference_forces);
        window[i].ts_ms = ts_ms;
        for (int cell = 0; cell < 4; ++cell) {
            window[i].counts[cell] =
                int32_t(std::llround(std::clamp(raw[i][cell], double(kAdcCountMin), double(kAdcCountMax))));
        }
    }
    if (config_.quantize_enabled) {
        cal_ = tare_from_window(window, cal_, config_.noise.sigma_g);
        return;
    }
    // Pass-through mode keeps the fractional counts so the zero is exact.
    for (int cell = 0; cell < 4; ++cell) {
        double sum = 0.0;
        double lo = raw.front()[cell];
        double hi = lo;
        for (const auto& s : raw) {
            sum += s[cell];
            lo = std::min(lo, s[cell]);
            hi = std::max(hi, s[cell]);
        }
        if ((hi - lo) / cal_.scale_counts_per_g > 10.0 * config_.noise.sigma_g) {
            throw UnstableTareError("cell " + std::to_string(cell + 1) + " unstable during tare");
        }
        cal_.offset_counts[cell] = sum / double(config_.window);
    }
}

std::array<double, 4> SensorNode::sample_window(const StepReading& reading) {
    std::array<double, 4> mean{};
    for (size_t i = 0; i < config_.window; ++i) {
        const auto counts = sample_counts(reading.forces);
        for (int cell = 0; cell < 4; ++cell) {
            mean[cell] += (counts[cell] - cal_.offset_counts[cell]) / cal_.scale_counts_per_g;
        }
    }
    for (auto& v : mean) v /= double(config_.window);
    return mean;
}

bool SensorNode::publish_step(const StepReading& reading, const PublishFn& publish) {
    TelemetryMessage msg;
    msg.hive_id = config_.hive_id;
    msg.seq = next_seq_++;
    msg.ts_ms = reading.ts_ms;
    msg.cells_g = sample_window(reading);

    const std::string payload = encode_message(msg);
    for (int attempt = 0; attempt < config_.publish_attempts; ++attempt) {
        if (publish(topic_, payload)) return true;
    }
    ++dropped_publishes_;
    std::cerr << "node " << config_.hive_id << ": dropped seq " << msg.seq << " after "
              << config_.publish_attempts << " attempts\n";
    return false;
}

uint64_t run_node(const NodeConfig& config, const ForceSource& source, const PublishFn& publish) {
    SensorNode node(config);
    node.tare(ForceQuad{});
    uint64_t published = 0;
    while (auto reading = source()) {
        if (node.publish_step(*reading, publish)) ++published;
    }
    return published;
}

}  // namespace hivemon
