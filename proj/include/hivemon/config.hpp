#pragma once

#include <cstdint>
#include <string>

#include "hivemon/hub.hpp"
#include "hivemon/node.hpp"

namespace hivemon {

/// Node role configuration as read from a JSON config file. Every key is
/// optional; absent keys keep their defaults.
struct NodeFileConfig {
    NodeConfig node;
    std::string connect;  // host:port publish target
};

/// Hub role configuration as read from a JSON config file.
struct HubFileConfig {
    HubConfig hub;
    std::string listen = "0.0.0.0:7799";
    std::string store_dir;
};

NodeFileConfig load_node_config(const std::string& path);
HubFileConfig load_hub_config(const std::string& path);

/// Splits "host:port"; throws ConfigError when the port is missing or bad.
std::pair<std::string, uint16_t> parse_address(const std::string& address);

}  // namespace hivemon
