#include "cenprobe/tls_util.hpp"

#include <fcntl.h>
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/rsa.h>

#include <algorithm>
#include <cerrno>
#include <stdexcept>

namespace cenprobe::tls {

std::string_view to_string(HsStatus s) {
    switch (s) {
        case HsStatus::ok: return "ok";
        case HsStatus::reset: return "reset";
        case HsStatus::timeout: return "timeout";
        case HsStatus::error: return "error";
    }
    return "error";
}

SelfSignedCert generate_self_signed(const std::string& common_name) {
    PkeyPtr key(EVP_RSA_gen(2048));
    if (!key) throw std::runtime_error("key generation failed");

    X509Ptr cert(X509_new());
    if (!cert) throw std::runtime_error("X509_new failed");
    X509_set_version(cert.get(), 2);
    ASN1_INTEGER_set(X509_get_serialNumber(cert.get()), 1);
    X509_gmtime_adj(X509_getm_notBefore(cert.get()), -3600);
    X509_gmtime_adj(X509_getm_notAfter(cert.get()), 60L * 60 * 24 * 30);
    X509_set_pubkey(cert.get(), key.get());

    X509_NAME* name = X509_get_subject_name(cert.get());
    X509_NAME_add_entry_by_txt(name, "CN", MBSTRING_ASC,
                               reinterpret_cast<const unsigned char*>(common_name.c_str()), -1,
                               -1, 0);
    X509_set_issuer_name(cert.get(), name);
    if (!X509_sign(cert.get(), key.get(), EVP_sha256()))
        throw std::runtime_error("certificate signing failed");

    SelfSignedCert out;
    out.key = std::move(key);
    out.cert = std::move(cert);
    return out;
}

SslCtxPtr make_client_ctx() {
    SslCtxPtr ctx(SSL_CTX_new(TLS_client_method()));
    if (!ctx) throw std::runtime_error("SSL_CTX_new failed");
    SSL_CTX_set_min_proto_version(ctx.get(), TLS1_3_VERSION);
    SSL_CTX_set_max_proto_version(ctx.get(), TLS1_3_VERSION);
    SSL_CTX_set_verify(ctx.get(), SSL_VERIFY_NONE, nullptr);
    return ctx;
}

SslCtxPtr make_server_ctx(const SelfSignedCert& cred) {
    SslCtxPtr ctx(SSL_CTX_new(TLS_server_method()));
    if (!ctx) throw std::runtime_error("SSL_CTX_new failed");
    SSL_CTX_set_min_proto_version(ctx.get(), TLS1_3_VERSION);
    SSL_CTX_set_max_proto_version(ctx.get(), TLS1_3_VERSION);
    if (SSL_CTX_use_certificate(ctx.get(), cred.cert.get()) != 1 ||
        SSL_CTX_use_PrivateKey(ctx.get(), cred.key.get()) != 1)
        throw std::runtime_error("loading server credential failed");
    return ctx;
}

namespace {

HsStatus drive_handshake(SSL* ssl, int fd, net::Deadline deadline) {
    for (;;) {
        ERR_clear_error();
        errno = 0;
        int rc = SSL_do_handshake(ssl);
        if (rc == 1) return HsStatus::ok;
        int err = SSL_get_error(ssl, rc);
        if (err == SSL_ERROR_WANT_READ) {
            int ready = net::wait_readable(fd, deadline);
            if (ready == 0) return HsStatus::timeout;
            if (ready < 0) return HsStatus::error;
            continue;
        }
        if (err == SSL_ERROR_WANT_WRITE) {
            int ready = net::wait_writable(fd, deadline);
            if (ready == 0) return HsStatus::timeout;
            if (ready < 0) return HsStatus::error;
            continue;
        }
        if (err == SSL_ERROR_SYSCALL && errno == ECONNRESET) return HsStatus::reset;
        // An abrupt EOF mid-handshake (errno 0) usually follows a one-way
        // reset injection; report it as reset too.
        if (err == SSL_ERROR_SYSCALL && errno == 0) return HsStatus::reset;
        return HsStatus::error;
    }
}

void set_nonblock(int fd) {
    int flags = fcntl(fd, F_GETFL, 0);
    if (flags >= 0) fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

}  // namespace

HsStatus client_handshake(SSL_CTX* ctx, int fd, const std::string& sni, net::Deadline deadline) {
    SslPtr ssl(SSL_new(ctx));
    if (!ssl) return HsStatus::error;
    set_nonblock(fd);
    if (!SSL_set_fd(ssl.get(), fd)) return HsStatus::error;
    if (!sni.empty() && !SSL_set_tlsext_host_name(ssl.get(), sni.c_str()))
        return HsStatus::error;
    SSL_set_connect_state(ssl.get());
    HsStatus st = drive_handshake(ssl.get(), fd, deadline);
    if (st == HsStatus::ok) SSL_shutdown(ssl.get());
    return st;
}

HsStatus server_handshake(SSL_CTX* ctx, int fd, net::Deadline deadline, std::string* sni_out) {
    SslPtr ssl(SSL_new(ctx));
    if (!ssl) return HsStatus::error;
    set_nonblock(fd);
    if (!SSL_set_fd(ssl.get(), fd)) return HsStatus::error;
    SSL_set_accept_state(ssl.get());
    HsStatus st = drive_handshake(ssl.get(), fd, deadline);
    if (st == HsStatus::ok) {
        if (sni_out) {
            const char* name = SSL_get_servername(ssl.get(), TLSEXT_NAMETYPE_host_name);
            *sni_out = name ? name : "";
        }
        SSL_shutdown(ssl.get());
    }
    return st;
}

SniPeek peek_client_hello_sni(std::string_view bytes, std::string& sni_out) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    size_t n = bytes.size();

    if (n < 5) return SniPeek::need_more;
    if (p[0] != 0x16) return SniPeek::absent;  // not a handshake record
    size_t record_len = (static_cast<size_t>(p[3]) << 8) | p[4];
    if (n < 5 + record_len) return SniPeek::need_more;

    const unsigned char* h = p + 5;
    size_t hn = record_len;
    auto need = [&](size_t off, size_t len) { return off + len <= hn; };

    if (!need(0, 4)) return SniPeek::need_more;
    if (h[0] != 0x01) return SniPeek::absent;  // not a ClientHello
    size_t pos = 4;                             // type(1) + length(3)
    if (!need(pos, 2 + 32)) return SniPeek::absent;
    pos += 2 + 32;  // legacy_version + random
    if (!need(pos, 1)) return SniPeek::absent;
    size_t sid_len = h[pos];
    pos += 1 + sid_len;
    if (!need(pos, 2)) return SniPeek::absent;
    size_t cs_len = (static_cast<size_t>(h[pos]) << 8) | h[pos + 1];
    pos += 2 + cs_len;
    if (!need(pos, 1)) return SniPeek::absent;
    size_t comp_len = h[pos];
    pos += 1 + comp_len;
    if (!need(pos, 2)) return SniPeek::absent;  // no extensions block
    size_t ext_total = (static_cast<size_t>(h[pos]) << 8) | h[pos + 1];
    pos += 2;
    if (!need(pos, ext_total)) return SniPeek::need_more;

    size_t ext_end = pos + ext_total;
    while (pos + 4 <= ext_end) {
        size_t ext_type = (static_cast<size_t>(h[pos]) << 8) | h[pos + 1];
        size_t ext_len = (static_cast<size_t>(h[pos + 2]) << 8) | h[pos + 3];
        pos += 4;
        if (pos + ext_len > ext_end) return SniPeek::absent;
        if (ext_type == 0x0000) {  // server_name
            size_t q = pos;
            if (ext_len < 2) return SniPeek::absent;
            size_t list_len = (static_cast<size_t>(h[q]) << 8) | h[q + 1];
            q += 2;
            size_t list_end = std::min(q + list_len, pos + ext_len);
            while (q + 3 <= list_end) {
                unsigned char name_type = h[q];
                size_t name_len = (static_cast<size_t>(h[q + 1]) << 8) | h[q + 2];
                q += 3;
                if (q + name_len > list_end) return SniPeek::absent;
                if (name_type == 0) {
                    sni_out.assign(reinterpret_cast<const char*>(h + q), name_len);
                    return SniPeek::found;
                }
                q += name_len;
            }
            return SniPeek::absent;
        }
        pos += ext_len;
    }
    return SniPeek::absent;
}

}  // namespace cenprobe::tls
