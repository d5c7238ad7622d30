#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hivemon/channel.hpp"

namespace hivemon {

/// Wire frame: u32 big-endian body length, u16 big-endian topic length,
/// topic bytes, payload bytes. Body length covers everything after the
/// 4-byte prefix.
std::string encode_frame(const std::string& topic, const std::string& payload);

inline constexpr size_t kMaxFrameBody = 1 << 20;

/// Incremental decoder for a framed byte stream.
class FrameDecoder {
public:
    void feed(const char* data, size_t len);
    /// Next complete frame, if one is buffered. Throws MalformedPayloadError
    /// on an impossible length field.
    std::optional<Delivery> next();

private:
    std::string buffer_;
};

/// Accepts framed telemetry connections and hands each frame to the handler.
/// Handler calls may come from several connection threads at once.
class TcpIngestServer {
public:
    using Handler = std::function<void(const std::string& topic, const std::string& payload)>;

    /// Binds and starts listening immediately; port 0 picks a free port.
    TcpIngestServer(const std::string& bind_host, uint16_t port, Handler handler);
    ~TcpIngestServer();

    TcpIngestServer(const TcpIngestServer&) = delete;
    TcpIngestServer& operator=(const TcpIngestServer&) = delete;

    uint16_t port() const { return port_; }
    void stop();

private:
    void accept_loop();

    int listen_fd_ = -1;
    uint16_t port_ = 0;
    Handler handler_;
    std::atomic<bool> running_{false};
    std::thread accept_thread_;
    std::mutex conn_mutex_;
    std::vector<std::thread> conn_threads_;
    std::vector<int> conn_fds_;
};

/// Length-prefixed publisher over a TCP connection. publish() reports
/// failure instead of throwing so callers can apply their retry policy;
/// the next attempt reconnects.
class TcpPublisher {
public:
    TcpPublisher(std::string host, uint16_t port);
    ~TcpPublisher();

    TcpPublisher(const TcpPublisher&) = delete;
    TcpPublisher& operator=(const TcpPublisher&) = delete;

    bool publish(const std::string& topic, const std::string& payload);
    void close();

private:
    bool ensure_connected();

    std::string host_;
    uint16_t port_;
    int fd_ = -1;
};

}  // namespace hivemon
