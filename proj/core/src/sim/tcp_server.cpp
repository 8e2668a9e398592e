#include "cenprobe/sim/tcp_server.hpp"

namespace cenprobe::sim {

ThreadedTcpServer::~ThreadedTcpServer() { stop(); }

bool ThreadedTcpServer::start() {
    auto listener = net::listen_loopback();
    if (!listener) return false;
    listener_ = std::move(listener->sock);
    port_ = listener->port;
    stopping_ = false;
    accept_thread_ = std::thread([this] { accept_loop(); });
    return true;
}

void ThreadedTcpServer::stop() {
    stopping_ = true;
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(workers_mu_);
        workers.swap(workers_);
    }
    for (auto& w : workers)
        if (w.joinable()) w.join();
    listener_.close();
}

void ThreadedTcpServer::accept_loop() {
    while (!stopping_) {
        net::Socket conn = net::accept_conn(
            listener_.fd(), net::deadline_in(std::chrono::milliseconds(50)));
        if (!conn.valid()) continue;
        std::lock_guard lock(workers_mu_);
        workers_.emplace_back(
            [this](net::Socket c) { handle(std::move(c)); }, std::move(conn));
    }
}

}  // namespace cenprobe::sim
