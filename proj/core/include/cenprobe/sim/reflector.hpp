#pragma once

#include <string>

#include "cenprobe/sim/tcp_server.hpp"
#include "cenprobe/sim/transcript.hpp"
#include "cenprobe/tls_util.hpp"

namespace cenprobe::sim {

/// TLS 1.3 endpoint that completes a handshake for any offered SNI and then
/// hangs up, standing in for the any-name reflector the SNI probe points at.
class Reflector : public ThreadedTcpServer {
public:
    struct Config {
        std::string id = "reflector";
        Transcript* transcript = nullptr;
    };

    explicit Reflector(Config cfg);
    ~Reflector() override { stop(); }

protected:
    void handle(net::Socket conn) override;

private:
    Config cfg_;
    tls::SelfSignedCert cred_;
    tls::SslCtxPtr ctx_;
};

}  // namespace cenprobe::sim
