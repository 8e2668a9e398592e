#pragma once

#include <memory>
#include <optional>
#include <string>

#include <openssl/ssl.h>
#include <openssl/x509.h>

#include "cenprobe/net.hpp"

namespace cenprobe::tls {

struct SslCtxDeleter {
    void operator()(SSL_CTX* p) const { SSL_CTX_free(p); }
};
struct SslDeleter {
    void operator()(SSL* p) const { SSL_free(p); }
};
struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct X509Deleter {
    void operator()(X509* p) const { X509_free(p); }
};

using SslCtxPtr = std::unique_ptr<SSL_CTX, SslCtxDeleter>;
using SslPtr = std::unique_ptr<SSL, SslDeleter>;
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using X509Ptr = std::unique_ptr<X509, X509Deleter>;

struct SelfSignedCert {
    PkeyPtr key;
    X509Ptr cert;
};

/// Throwaway credential for the in-process reflector.
SelfSignedCert generate_self_signed(const std::string& common_name);

/// TLS 1.3-only client context, certificate verification off: the probe only
/// cares whether the handshake completes, not who answered.
SslCtxPtr make_client_ctx();

/// TLS 1.3-only server context bound to the given credential.
SslCtxPtr make_server_ctx(const SelfSignedCert& cred);

enum class HsStatus { ok, reset, timeout, error };
std::string_view to_string(HsStatus s);

/// Runs the client side of a handshake on a connected socket, offering `sni`
/// in the ClientHello. Returns ok once the server's Finished is processed.
HsStatus client_handshake(SSL_CTX* ctx, int fd, const std::string& sni, net::Deadline deadline);

/// Server side of a handshake on an accepted socket.
HsStatus server_handshake(SSL_CTX* ctx, int fd, net::Deadline deadline,
                          std::string* sni_out = nullptr);

/// Incremental ClientHello inspection over buffered bytes, the way an
/// on-path middlebox sees them.
enum class SniPeek { need_more, absent, found };
SniPeek peek_client_hello_sni(std::string_view bytes, std::string& sni_out);

}  // namespace cenprobe::tls
