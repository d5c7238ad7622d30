#include "hivemon/pipeline.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include "hivemon/analysis.hpp"
#include "hivemon/channel.hpp"
#include "hivemon/errors.hpp"
#include "hivemon/format.hpp"
#include "hivemon/hub.hpp"
#include "hivemon/node.hpp"

namespace hivemon {

bool RunSummary::complete() const {
    return records == steps && dead_lettered == 0 && dropped_publishes == 0;
}

std::string RunSummary::to_line() const {
    std::ostringstream out;
    out << "steps=" << steps << " records=" << records << " duplicates=" << duplicates
        << " gaps=" << gaps << " missing=" << missing << " degenerate=" << degenerate
        << " dropped_publishes=" << dropped_publishes << " deadletter=" << dead_lettered
        << " consumed_g=" << format_fixed(consumed_g)
        << " final_total_g=" << format_fixed(final_total_g);
    return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoFailureError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw IoFailureError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoFailureError("cannot move " + tmp.string() + " into place");
}

RunSummary run_experiment(const Scenario& scenario, const RunConfig& config, Store& store) {
    if (!config.valid_rates()) throw ConfigError("fault rates must lie in [0, 1]");
    scenario.validate();

    FaultConfig faults;
    faults.duplicate_rate = config.duplicate_rate;
    faults.drop_rate = config.drop_rate;
    faults.reorder_window = config.reorder_window;
    faults.rng_seed = config.seed ^ 0x9e3779b97f4a7c15ULL;
    Channel channel(faults);

    HubConfig hub_config;
    hub_config.default_geometry = scenario.geometry;
    hub_config.geometry_by_hive[config.hive_id] = scenario.geometry;
    // The hub's holding area must cover at least the transport's shuffle
    // window or healthy reordering would be misread as loss.
    hub_config.reorder_window = std::max<size_t>(config.reorder_window, 1);
    Hub hub(hub_config, store);

    auto subscription = channel.subscribe("apiary/+/telemetry");
    std::thread ingest_thread([&] {
        while (auto delivery = subscription->wait_pop()) {
            hub.handle(delivery->topic, delivery->payload);
        }
    });

    NodeConfig node_config;
    node_config.hive_id = config.hive_id;
    node_config.noise.sigma_g = config.noise_sigma_g;
    node_config.noise.rng_seed = config.seed;
    node_config.quantize_enabled = config.quantize;
    SensorNode node(node_config);
    node.tare(ForceQuad{});

    const PublishFn publish = [&](const std::string& topic, const std::string& payload) {
        return channel.publish(topic, payload);
    };

    ScenarioState state(scenario);
    RunSummary summary;
    summary.steps = scenario.steps.size();
    for (const auto& step : scenario.steps) {
        state.apply_step(step);
        const auto items = state.items();
        const ForceQuad forces = decompose_forces(items, scenario.geometry);
        const int64_t ts_ms = state.elapsed_days() * kMillisPerDay;
        node.publish_step({forces, ts_ms}, publish);
    }
    channel.close();
    ingest_thread.join();
    hub.flush_all();

    const HiveCounters counters = hub.counters(config.hive_id);
    summary.records = counters.applied;
    summary.duplicates = counters.duplicates_dropped;
    summary.gaps = counters.gaps_detected;
    summary.missing = counters.missing_seqs;
    summary.degenerate = counters.degenerate_readings;
    summary.dead_lettered = counters.dead_lettered;
    summary.dropped_publishes = node.dropped_publishes();
    summary.consumed_g = state.removed_mass_g();
    summary.final_total_g = state.total_mass_g();

    if (!config.out_csv.empty() || !config.out_svg.empty()) {
        const auto records = store.all_records(config.hive_id);
        if (!config.out_csv.empty()) {
            write_file_atomic(config.out_csv, export_csv(records));
        }
        if (!config.out_svg.empty() && !records.empty()) {
            const Trajectory traj = trajectory(records, scenario.geometry, config.smooth_window);
            write_file_atomic(config.out_svg, render_svg(traj, config.svg_relative));
        }
    }
    return summary;
}

}  // namespace hivemon
