#include "hivemon/config.hpp"

#include <fstream>

#include <json.hpp>

#include "hivemon/errors.hpp"

namespace hivemon {

namespace {

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("bad config syntax in " + path + ": " + e.what());
    }
}

PlatformGeometry geometry_from(const nlohmann::json& j) {
    PlatformGeometry geom;
    geom.length_x_mm = j.at("length_x_mm").get<double>();
    geom.length_y_mm = j.at("length_y_mm").get<double>();
    if (!geom.valid()) throw ConfigError("geometry side lengths must be positive");
    return geom;
}

}  // namespace

NodeFileConfig load_node_config(const std::string& path) {
    const auto j = load_json_file(path);
    NodeFileConfig config;
    try {
        if (j.contains("hive_id")) config.node.hive_id = j["hive_id"].get<std::string>();
        if (j.contains("scale_counts_per_g")) {
            config.node.adc.scale_counts_per_g = j["scale_counts_per_g"].get<double>();
        }
        if (j.contains("sigma_g")) config.node.noise.sigma_g = j["sigma_g"].get<double>();
        if (j.contains("seed")) config.node.noise.rng_seed = j["seed"].get<uint64_t>();
        if (j.contains("window")) config.node.window = j["window"].get<size_t>();
        if (j.contains("quantize")) config.node.quantize_enabled = j["quantize"].get<bool>();
        if (j.contains("connect")) config.connect = j["connect"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad node config " + path + ": " + e.what());
    }
    if (!valid_hive_id(config.node.hive_id)) {
        throw ConfigError("bad hive_id in node config " + path);
    }
    if (!(config.node.adc.scale_counts_per_g > 0.0) || config.node.noise.sigma_g < 0.0 ||
        config.node.window == 0) {
        throw ConfigError("node config values out of range in " + path);
    }
    return config;
}

HubFileConfig load_hub_config(const std::string& path) {
    const auto j = load_json_file(path);
    HubFileConfig config;
    try {
        if (j.contains("listen")) config.listen = j["listen"].get<std::string>();
        if (j.contains("store_dir")) config.store_dir = j["store_dir"].get<std::string>();
        if (j.contains("topic_filter")) {
            config.hub.topic_filter = j["topic_filter"].get<std::string>();
        }
        if (j.contains("reorder_window")) {
            config.hub.reorder_window = j["reorder_window"].get<size_t>();
        }
        if (j.contains("epsilon_force_g")) {
            config.hub.epsilon_force_g = j["epsilon_force_g"].get<double>();
        }
        if (j.contains("geometry")) {
            for (const auto& [key, value] : j["geometry"].items()) {
                if (key == "default") {
                    config.hub.default_geometry = geometry_from(value);
                } else if (valid_hive_id(key)) {
                    config.hub.geometry_by_hive[key] = geometry_from(value);
                } else {
                    throw ConfigError("bad hive id '" + key + "' in hub geometry config");
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad hub config " + path + ": " + e.what());
    }
    return config;
}

std::pair<std::string, uint16_t> parse_address(const std::string& address) {
    const size_t colon = address.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
        throw ConfigError("address '" + address + "' must look like host:port");
    }
    const std::string host = address.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(address.substr(colon + 1));
    } catch (const std::exception&) {
        throw ConfigError("bad port in address '" + address + "'");
    }
    if (port < 0 || port > 65535) throw ConfigError("port out of range in '" + address + "'");
    return {host, uint16_t(port)};
}

}  // namespace hivemon
