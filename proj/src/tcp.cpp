#include "hivemon/tcp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include "hivemon/errors.hpp"

namespace hivemon {

namespace {

void append_u32_be(std::string& out, uint32_t v) {
    out.push_back(char((v >> 24) & 0xff));
    out.push_back(char((v >> 16) & 0xff));
    out.push_back(char((v >> 8) & 0xff));
    out.push_back(char(v & 0xff));
}

uint32_t read_u32_be(const char* p) {
    return (uint32_t(uint8_t(p[0])) << 24) | (uint32_t(uint8_t(p[1])) << 16) |
           (uint32_t(uint8_t(p[2])) << 8) | uint32_t(uint8_t(p[3]));
}

bool write_all(int fd, const char* data, size_t len) {
    size_t sent = 0;
    while (sent < len) {
        const ssize_t n = ::send(fd, data + sent, len - sent, MSG_NOSIGNAL);
        if (n <= 0) return false;
        sent += size_t(n);
    }
    return true;
}

int connect_to(const std::string& host, uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    const std::string service = std::to_string(port);
    if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &result) != 0) return -1;
    int fd = -1;
    for (addrinfo* ai = result; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(result);
    return fd;
}

}  // namespace

std::string encode_frame(const std::string& topic, const std::string& payload) {
    if (topic.size() > 0xffff) throw InvalidMessageError("topic too long for the frame format");
    const size_t body = 2 + topic.size() + payload.size();
    if (body > kMaxFrameBody) throw InvalidMessageError("frame body exceeds the size cap");
    std::string out;
    out.reserve(4 + body);
    append_u32_be(out, uint32_t(body));
    out.push_back(char((topic.size() >> 8) & 0xff));
    out.push_back(char(topic.size() & 0xff));
    out += topic;
    out += payload;
    return out;
}

void FrameDecoder::feed(const char* data, size_t len) { buffer_.append(data, len); }

std::optional<Delivery> FrameDecoder::next() {
    if (buffer_.size() < 4) return std::nullopt;
    const uint32_t body = read_u32_be(buffer_.data());
    if (body < 2 || body > kMaxFrameBody) {
        throw MalformedPayloadError("frame length field out of range: " + std::to_string(body));
    }
    if (buffer_.size() < 4 + size_t(body)) return std::nullopt;
    const size_t topic_len = (size_t(uint8_t(buffer_[4])) << 8) | size_t(uint8_t(buffer_[5]));
    if (2 + topic_len > body) {
        throw MalformedPayloadError("topic length exceeds the frame body");
    }
    Delivery d;
    d.topic = buffer_.substr(6, topic_len);
    d.payload = buffer_.substr(6 + topic_len, body - 2 - topic_len);
    buffer_.erase(0, 4 + size_t(body));
    return d;
}

TcpIngestServer::TcpIngestServer(const std::string& bind_host, uint16_t port, Handler handler)
    : handler_(std::move(handler)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw IoFailureError("socket() failed");
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (bind_host.empty() || bind_host == "0.0.0.0") {
        addr.sin_addr.s_addr = htonl(INADDR_ANY);
    } else if (::inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        throw ConfigError("bad listen address '" + bind_host + "'");
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
        ::listen(listen_fd_, 16) != 0) {
        ::close(listen_fd_);
        throw IoFailureError("cannot listen on " + bind_host + ":" + std::to_string(port));
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);

    running_ = true;
    accept_thread_ = std::thread([this] { accept_loop(); });
}

TcpIngestServer::~TcpIngestServer() { stop(); }

void TcpIngestServer::accept_loop() {
    while (running_) {
        const int conn = ::accept(listen_fd_, nullptr, nullptr);
        if (conn < 0) {
            if (!running_) break;
            continue;
        }
        std::lock_guard lock(conn_mutex_);
        conn_fds_.push_back(conn);
        conn_threads_.emplace_back([this, conn] {
            FrameDecoder decoder;
            char buf[4096];
            for (;;) {
                const ssize_t n = ::recv(conn, buf, sizeof(buf), 0);
                if (n <= 0) break;
                try {
                    decoder.feed(buf, size_t(n));
                    while (auto frame = decoder.next()) {
                        handler_(frame->topic, frame->payload);
                    }
                } catch (const Error&) {
                    break;  // corrupt stream; drop the connection
                }
            }
            ::close(conn);
        });
    }
}

void TcpIngestServer::stop() {
    if (!running_.exchange(false)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (accept_thread_.joinable()) accept_thread_.join();
    std::lock_guard lock(conn_mutex_);
    for (int fd : conn_fds_) ::shutdown(fd, SHUT_RDWR);
    for (auto& t : conn_threads_) {
        if (t.joinable()) t.join();
    }
    conn_threads_.clear();
    conn_fds_.clear();
}

TcpPublisher::TcpPublisher(std::string host, uint16_t port) : host_(std::move(host)), port_(port) {}

TcpPublisher::~TcpPublisher() { close(); }

bool TcpPublisher::ensure_connected() {
    if (fd_ >= 0) return true;
    fd_ = connect_to(host_, port_);
    return fd_ >= 0;
}

bool TcpPublisher::publish(const std::string& topic, const std::string& payload) {
    if (!ensure_connected()) return false;
    const std::string frame = encode_frame(topic, payload);
    if (write_all(fd_, frame.data(), frame.size())) return true;
    close();
    return false;
}

void TcpPublisher::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

}  // namespace hivemon
