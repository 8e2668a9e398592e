#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "cenprobe/net.hpp"

namespace cenprobe::sim {

/// Accept loop on a loopback listener with one worker thread per connection.
/// Workers are joined on stop(); handlers must bound their own reads so a
/// stop cannot hang.
class ThreadedTcpServer {
public:
    virtual ~ThreadedTcpServer();

    bool start();
    void stop();
    std::uint16_t port() const { return port_; }
    std::string address() const { return "127.0.0.1:" + std::to_string(port_); }
    bool stopping() const { return stopping_; }

protected:
    virtual void handle(net::Socket conn) = 0;

private:
    void accept_loop();

    net::Socket listener_;
    std::uint16_t port_ = 0;
    std::thread accept_thread_;
    std::atomic<bool> stopping_{false};
    std::mutex workers_mu_;
    std::vector<std::thread> workers_;
};

}  // namespace cenprobe::sim
