#include <csignal>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "hivemon/analysis.hpp"
#include "hivemon/config.hpp"
#include "hivemon/errors.hpp"
#include "hivemon/format.hpp"
#include "hivemon/hub.hpp"
#include "hivemon/node.hpp"
#include "hivemon/pipeline.hpp"
#include "hivemon/scenario.hpp"
#include "hivemon/store.hpp"
#include "hivemon/tcp.hpp"

namespace fs = std::filesystem;
using namespace hivemon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

volatile std::sig_atomic_t g_stop_requested = 0;
volatile std::sig_atomic_t g_status_requested = 0;

void on_stop_signal(int) { g_stop_requested = 1; }
void on_status_signal(int) { g_status_requested = 1; }

Scenario resolve_scenario(const std::string& ref) {
    if (ref.empty() || ref == "builtin-winter") return builtin_winter();
    return load_scenario_file(ref);
}

struct RunFlags {
    std::string scenario = "builtin-winter";
    std::string hive_id = "hive1";
    double noise_sigma = 0.0;
    bool no_quantize = false;
    uint64_t seed = 1;
    double duplicate_rate = 0.0;
    double drop_rate = 0.0;
    size_t reorder_window = 5;
    std::string store_dir = "data";
    std::string out_csv = "trajectory.csv";
    std::string out_svg = "trajectory.svg";
    size_t smooth = 1;
    bool svg_relative = false;
};

int cmd_run(const RunFlags& flags) {
    const Scenario scenario = resolve_scenario(flags.scenario);
    RunConfig config;
    config.hive_id = flags.hive_id;
    config.noise_sigma_g = flags.noise_sigma;
    config.quantize = !flags.no_quantize;
    config.seed = flags.seed;
    config.duplicate_rate = flags.duplicate_rate;
    config.drop_rate = flags.drop_rate;
    config.reorder_window = flags.reorder_window;
    config.store_dir = flags.store_dir;
    config.out_csv = flags.out_csv;
    config.out_svg = flags.out_svg;
    config.smooth_window = flags.smooth;
    config.svg_relative = flags.svg_relative;
    if (!config.valid_rates()) throw ConfigError("fault rates must lie in [0, 1]");
    if (flags.noise_sigma < 0.0) throw ConfigError("--noise-sigma must be >= 0");

    Store store(config.store_dir);
    const RunSummary summary = run_experiment(scenario, config, store);
    std::cout << summary.to_line() << "\n";
    return summary.complete() ? kExitOk : kExitRuntime;
}

int cmd_node(const std::string& config_path, const std::optional<std::string>& connect,
             const std::string& scenario_ref, std::optional<double> sigma,
             std::optional<uint64_t> seed, const std::optional<std::string>& hive_id,
             bool no_quantize) {
    NodeFileConfig file;
    if (!config_path.empty()) file = load_node_config(config_path);
    if (connect) file.connect = *connect;
    if (sigma) file.node.noise.sigma_g = *sigma;
    if (seed) file.node.noise.rng_seed = *seed;
    if (hive_id) file.node.hive_id = *hive_id;
    if (no_quantize) file.node.quantize_enabled = false;
    if (file.connect.empty()) throw ConfigError("node needs --connect or a config file address");

    const auto [host, port] = parse_address(file.connect);
    const Scenario scenario = resolve_scenario(scenario_ref);

    std::signal(SIGINT, on_stop_signal);
    std::signal(SIGTERM, on_stop_signal);

    TcpPublisher publisher(host, port);
    ScenarioState state(scenario);
    size_t step_index = 0;
    const ForceSource source = [&]() -> std::optional<StepReading> {
        if (g_stop_requested || step_index >= scenario.steps.size()) return std::nullopt;
        state.apply_step(scenario.steps[step_index]);
        ++step_index;
        return StepReading{decompose_forces(state.items(), scenario.geometry),
                           state.elapsed_days() * kMillisPerDay};
    };
    const PublishFn publish = [&](const std::string& topic, const std::string& payload) {
        return publisher.publish(topic, payload);
    };
    const uint64_t published = run_node(file.node, source, publish);
    std::cout << "published=" << published << " steps=" << step_index << "\n";
    return published == scenario.steps.size() ? kExitOk : kExitRuntime;
}

int cmd_hub(const std::string& config_path, const std::optional<std::string>& listen,
            const std::optional<std::string>& store_dir, std::optional<size_t> reorder_window) {
    HubFileConfig file;
    if (!config_path.empty()) file = load_hub_config(config_path);
    if (listen) file.listen = *listen;
    if (store_dir) file.store_dir = *store_dir;
    if (reorder_window) file.hub.reorder_window = *reorder_window;
    if (file.store_dir.empty()) throw ConfigError("hub needs --store-dir or a config file path");

    const auto [host, port] = parse_address(file.listen);
    Store store(file.store_dir);
    Hub hub(file.hub, store);

    std::signal(SIGINT, on_stop_signal);
    std::signal(SIGTERM, on_stop_signal);
    std::signal(SIGUSR1, on_status_signal);

    TcpIngestServer server(host, port, [&](const std::string& topic, const std::string& payload) {
        hub.handle(topic, payload);
    });
    std::cerr << "hub listening on " << host << ":" << server.port() << "\n";

    while (!g_stop_requested) {
        if (g_status_requested) {
            g_status_requested = 0;
            std::cerr << hub.status_text();
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    server.stop();
    hub.flush_all();
    std::cerr << hub.status_text();
    return kExitOk;
}

int cmd_export(const std::string& store_dir, const std::string& hive_id, int64_t t0, int64_t t1,
               const std::string& out) {
    Store store(store_dir);
    const auto records = store.query_range(hive_id, t0, t1);
    const std::string csv = export_csv(records);
    if (out.empty() || out == "-") {
        std::cout << csv;
    } else {
        write_file_atomic(out, csv);
        std::cout << "records=" << records.size() << " out=" << out << "\n";
    }
    return kExitOk;
}

int cmd_plot(const std::string& store_dir, const std::string& hive_id, const std::string& out,
             size_t smooth, bool relative, const std::string& scenario_ref) {
    Store store(store_dir);
    const auto records = store.all_records(hive_id);
    const PlatformGeometry geom = resolve_scenario(scenario_ref).geometry;
    const Trajectory traj = trajectory(records, geom, smooth);
    const std::string svg = render_svg(traj, relative);
    if (out == "-") {
        std::cout << svg;
    } else {
        write_file_atomic(out, svg);
        std::cout << "points=" << traj.points.size() << " out=" << out << "\n";
    }
    return kExitOk;
}

int cmd_scenario_validate(const std::string& path) {
    const Scenario sc = load_scenario_file(path);
    size_t removals = 0;
    for (const auto& step : sc.steps) removals += step.strips_removed;
    std::cout << "name=" << sc.name << " steps=" << sc.steps.size() << " days=" << sc.total_days()
              << " strips=" << sc.strips.size() << " removals=" << removals
              << " initial_total_g=" << format_fixed(sc.initial_total_mass_g()) << "\n";
    return kExitOk;
}

int cmd_scenario_write_builtin(const std::string& path) {
    write_file_atomic(path, serialize_scenario(builtin_winter()));
    std::cout << "wrote " << path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale hive monitoring pipeline: platform model, sensor node, telemetry "
                 "channel, hub and analysis"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "Run the full experiment in process");
    run->add_option("--scenario", run_flags.scenario, "Scenario file or 'builtin-winter'");
    run->add_option("--hive-id", run_flags.hive_id, "Hive id for this run");
    run->add_option("--noise-sigma", run_flags.noise_sigma, "Per-cell noise sigma in grams");
    run->add_flag("--no-quantize", run_flags.no_quantize, "Bypass the 24-bit converter model");
    run->add_option("--seed", run_flags.seed, "RNG seed for noise and fault injection");
    run->add_option("--duplicate-rate", run_flags.duplicate_rate, "Channel duplicate probability");
    run->add_option("--drop-rate", run_flags.drop_rate, "Channel drop probability per attempt");
    run->add_option("--reorder-window", run_flags.reorder_window,
                    "Reorder bound; 0 keeps the channel in order");
    run->add_option("--store-dir", run_flags.store_dir, "Record store directory");
    run->add_option("--out-csv", run_flags.out_csv, "Trajectory CSV path ('' to skip)");
    run->add_option("--out-svg", run_flags.out_svg, "Trajectory SVG path ('' to skip)");
    run->add_option("--smooth", run_flags.smooth, "Trajectory moving-average window");
    run->add_flag("--svg-relative", run_flags.svg_relative, "Plot displacement from the start");

    std::string node_config;
    std::optional<std::string> node_connect, node_hive;
    std::optional<double> node_sigma;
    std::optional<uint64_t> node_seed;
    bool node_no_quantize = false;
    std::string node_scenario = "builtin-winter";
    auto* node = app.add_subcommand("node", "Run a sensor node publishing over TCP");
    node->add_option("--config", node_config, "Node config file (JSON)");
    node->add_option("--connect", node_connect, "Hub address host:port");
    node->add_option("--scenario", node_scenario, "Scenario file or 'builtin-winter'");
    node->add_option("--noise-sigma", node_sigma, "Per-cell noise sigma in grams");
    node->add_option("--seed", node_seed, "RNG seed");
    node->add_option("--hive-id", node_hive, "Hive id");
    node->add_flag("--no-quantize", node_no_quantize, "Bypass the converter model");

    std::string hub_config;
    std::optional<std::string> hub_listen, hub_store;
    std::optional<size_t> hub_window;
    auto* hub = app.add_subcommand("hub", "Run the ingest hub listening on TCP");
    hub->add_option("--config", hub_config, "Hub config file (JSON)");
    hub->add_option("--listen", hub_listen, "Listen address host:port");
    hub->add_option("--store-dir", hub_store, "Record store directory");
    hub->add_option("--reorder-window", hub_window, "Dedup holding-area bound");

    std::string export_store = "data", export_hive = "hive1", export_out;
    int64_t export_t0 = 0, export_t1 = std::numeric_limits<int64_t>::max();
    auto* exp = app.add_subcommand("export", "Export stored records as CSV");
    exp->add_option("--store-dir", export_store, "Record store directory");
    exp->add_option("--hive-id", export_hive, "Hive id");
    exp->add_option("--t0", export_t0, "Range start, epoch ms (closed)");
    exp->add_option("--t1", export_t1, "Range end, epoch ms (closed)");
    exp->add_option("--out", export_out, "Output path; '-' or empty for stdout");

    std::string plot_store = "data", plot_hive = "hive1", plot_out = "trajectory.svg";
    std::string plot_scenario = "builtin-winter";
    size_t plot_smooth = 1;
    bool plot_relative = false;
    auto* plot = app.add_subcommand("plot", "Render the stored trajectory as SVG");
    plot->add_option("--store-dir", plot_store, "Record store directory");
    plot->add_option("--hive-id", plot_hive, "Hive id");
    plot->add_option("--out", plot_out, "Output path; '-' for stdout");
    plot->add_option("--smooth", plot_smooth, "Moving-average window");
    plot->add_flag("--relative", plot_relative, "Plot displacement from the start");
    plot->add_option("--scenario", plot_scenario, "Scenario supplying the platform footprint");

    auto* scenario = app.add_subcommand("scenario", "Scenario file utilities");
    scenario->require_subcommand(1);
    std::string validate_path;
    auto* validate = scenario->add_subcommand("validate", "Validate a scenario file");
    validate->add_option("file", validate_path, "Scenario file")->required();
    std::string write_path;
    auto* write_builtin =
        scenario->add_subcommand("write-builtin", "Write the builtin winter scenario");
    write_builtin->add_option("file", write_path, "Output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(run_flags);
        if (node->parsed()) {
            return cmd_node(node_config, node_connect, node_scenario, node_sigma, node_seed,
                            node_hive, node_no_quantize);
        }
        if (hub->parsed()) return cmd_hub(hub_config, hub_listen, hub_store, hub_window);
        if (exp->parsed()) {
            return cmd_export(export_store, export_hive, export_t0, export_t1, export_out);
        }
        if (plot->parsed()) {
            return cmd_plot(plot_store, plot_hive, plot_out, plot_smooth, plot_relative,
                            plot_scenario);
        }
        if (validate->parsed()) return cmd_scenario_validate(validate_path);
        if (write_builtin->parsed()) return cmd_scenario_write_builtin(write_path);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
