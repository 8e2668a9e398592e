#include "cenprobe/sim/reflector.hpp"

namespace cenprobe::sim {

Reflector::Reflector(Config cfg)
    : cfg_(std::move(cfg)),
      cred_(tls::generate_self_signed("reflector.invalid")),
      ctx_(tls::make_server_ctx(cred_)) {}

void Reflector::handle(net::Socket conn) {
    std::string sni;
    tls::HsStatus st = tls::server_handshake(ctx_.get(), conn.fd(),
                                             net::deadline_in(std::chrono::milliseconds(5000)),
                                             &sni);
    if (cfg_.transcript)
        cfg_.transcript->record(cfg_.id, "handshake",
                                sni + " " + std::string(tls::to_string(st)));
}

}  // namespace cenprobe::sim
