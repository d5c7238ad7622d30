#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hivemon/scenario.hpp"
#include "hivemon/store.hpp"

namespace hivemon {

/// Everything one end-to-end run needs beyond the scenario itself.
struct RunConfig {
    std::string hive_id = "hive1";
    double noise_sigma_g = 0.0;
    bool quantize = true;
    uint64_t seed = 1;
    double duplicate_rate = 0.0;
    double drop_rate = 0.0;
    size_t reorder_window = 5;
    std::filesystem::path store_dir;
    std::filesystem::path out_csv;  // empty = skip
    std::filesystem::path out_svg;  // empty = skip
    size_t smooth_window = 1;
    bool svg_relative = false;

    bool valid_rates() const {
        return duplicate_rate >= 0.0 && duplicate_rate <= 1.0 && drop_rate >= 0.0 &&
               drop_rate <= 1.0;
    }
};

struct RunSummary {
    size_t steps = 0;
    uint64_t records = 0;
    uint64_t duplicates = 0;
    uint64_t gaps = 0;
    uint64_t missing = 0;
    uint64_t degenerate = 0;
    uint64_t dropped_publishes = 0;
    uint64_t dead_lettered = 0;
    double consumed_g = 0.0;
    double final_total_g = 0.0;

    bool complete() const;
    std::string to_line() const;
};

/// Runs the whole desk experiment in process: step the platform model, let
/// the node sample and publish, deliver through the fault-injecting
/// channel, ingest on the hub, persist, then write the trajectory CSV/SVG
/// artifacts. Deterministic for a fixed config and seed.
RunSummary run_experiment(const Scenario& scenario, const RunConfig& config, Store& store);

/// Writes content to path via a temp file in the same directory plus
/// rename, so readers never see a partial artifact.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace hivemon
