#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cenprobe/html_tf.hpp"
#include "cenprobe/http_client.hpp"
#include "cenprobe/net.hpp"
#include "cenprobe/public_suffix.hpp"
#include "cenprobe/types.hpp"

namespace cenprobe {

/// Feature record distilled from one fetch; everything the classifier needs,
/// nothing it doesn't (bodies are reduced to length + tag term frequencies).
struct HttpFetchRecord {
    Domain domain;
    std::string vantage;
    bool is_control = false;
    FetchStatus fetch_status = FetchStatus::conn_error;
    int status_code = 0;
    std::vector<std::string> header_keys;  // lowercased, arrival order, deduped
    std::optional<std::string> redirect_location;
    std::uint64_t body_length = 0;
    TagTfVector tag_tf;
    std::string matched_signature;  // corroborating blockpage fingerprint, if any
};

struct CensorSignature {
    std::string id;
    std::string where;   // "body" | "header:<key>" | "status"
    std::string needle;  // substring for body/header, exact code for status
};

std::vector<CensorSignature> load_signatures(const std::string& path);
std::optional<std::string> match_signatures(const std::vector<CensorSignature>& sigs,
                                            const HttpResponse& resp);

struct HttpAnalysisConfig {
    double sigma_mult = 3.0;
    double len_sigma_floor = 1.0;  // bytes
    double cos_sigma_floor = 0.01;
};

struct HttpClassification {
    Verdict verdict = Verdict::untestable;
    std::string evidence;  // http_reset | http_status | http_length | http_body |
                           // http_redirect | http_headers
    std::string note;
    // Populated when the corresponding comparison ran.
    std::optional<int> consensus_status;
    std::optional<double> length_mean, length_stddev, length_delta;
    std::optional<double> cc_mean, cc_stddev, tc_mean;
};

/// Pure classifier: the verdict depends only on the feature records and the
/// thresholds, never on ordering among controls.
HttpClassification classify_http(const HttpFetchRecord& test,
                                 const std::vector<HttpFetchRecord>& controls,
                                 const PublicSuffixList& psl,
                                 const HttpAnalysisConfig& cfg = {});

/// Convenience: fetch-then-featurize from one vantage.
HttpFetchRecord fetch_http_record(const net::Vantage& vantage, const Ipv4& ip,
                                  std::uint16_t port, const Domain& domain, bool is_control,
                                  const HttpFetchConfig& cfg = {},
                                  const std::vector<CensorSignature>* sigs = nullptr);

/// Component checks, exposed for direct verification.
bool length_inconsistent(double test_len, const std::vector<double>& control_lens,
                         const HttpAnalysisConfig& cfg, double* delta_out = nullptr,
                         double* mean_out = nullptr, double* stddev_out = nullptr);
bool body_inconsistent(const TagTfVector& test_tf, const std::vector<TagTfVector>& control_tfs,
                       const HttpAnalysisConfig& cfg, double* cc_mean_out = nullptr,
                       double* cc_stddev_out = nullptr, double* tc_mean_out = nullptr);

/// Host a Location header points at, resolved against the request domain
/// (relative targets stay on the same host).
std::string redirect_host(const std::string& location, const Domain& request_domain);

}  // namespace cenprobe
