#include "cenprobe/http_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cenprobe/stats.hpp"
#include "cenprobe/strings.hpp"

namespace cenprobe {

std::vector<CensorSignature> load_signatures(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open signature file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    std::vector<CensorSignature> out;
    for (const auto& item : j.at("signatures")) {
        CensorSignature sig;
        sig.id = item.at("id").get<std::string>();
        sig.where = item.at("where").get<std::string>();
        sig.needle = item.at("needle").get<std::string>();
        out.push_back(std::move(sig));
    }
    return out;
}

std::optional<std::string> match_signatures(const std::vector<CensorSignature>& sigs,
                                            const HttpResponse& resp) {
    for (const CensorSignature& sig : sigs) {
        if (sig.where == "body") {
            if (resp.body.find(sig.needle) != std::string::npos) return sig.id;
        } else if (sig.where == "status") {
            if (std::to_string(resp.status_code) == sig.needle) return sig.id;
        } else if (strings::starts_with(sig.where, "header:")) {
            auto v = resp.header(sig.where.substr(7));
            if (v && v->find(sig.needle) != std::string::npos) return sig.id;
        }
    }
    return std::nullopt;
}

bool length_inconsistent(double test_len, const std::vector<double>& control_lens,
                         const HttpAnalysisConfig& cfg, double* delta_out, double* mean_out,
                         double* stddev_out) {
    double mu = stats::mean(control_lens);
    double sigma = stats::pop_stddev(control_lens);
    double delta = std::fabs(mu - test_len);
    if (delta_out) *delta_out = delta;
    if (mean_out) *mean_out = mu;
    if (stddev_out) *stddev_out = sigma;
    return delta > cfg.sigma_mult * std::max(sigma, cfg.len_sigma_floor);
}

bool body_inconsistent(const TagTfVector& test_tf, const std::vector<TagTfVector>& control_tfs,
                       const HttpAnalysisConfig& cfg, double* cc_mean_out, double* cc_stddev_out,
                       double* tc_mean_out) {
    if (control_tfs.size() < 2) return false;  // no control-control baseline

    std::vector<double> cc;
    for (size_t i = 0; i < control_tfs.size(); ++i)
        for (size_t j = i + 1; j < control_tfs.size(); ++j)
            cc.push_back(cosine_similarity(control_tfs[i], control_tfs[j]));
    std::vector<double> tc;
    for (const TagTfVector& c : control_tfs) tc.push_back(cosine_similarity(test_tf, c));

    double cc_mean = stats::mean(cc);
    double cc_stddev = stats::pop_stddev(cc);
    double tc_mean = stats::mean(tc);
    if (cc_mean_out) *cc_mean_out = cc_mean;
    if (cc_stddev_out) *cc_stddev_out = cc_stddev;
    if (tc_mean_out) *tc_mean_out = tc_mean;
    return std::fabs(cc_mean - tc_mean) > cfg.sigma_mult * std::max(cc_stddev, cfg.cos_sigma_floor);
}

std::string redirect_host(const std::string& location, const Domain& request_domain) {
    std::string loc = strings::trim(location);
    if (loc.empty()) return request_domain.name();
    std::string rest;
    if (auto scheme_end = loc.find("://"); scheme_end != std::string::npos) {
        rest = loc.substr(scheme_end + 3);
    } else if (strings::starts_with(loc, "//")) {
        rest = loc.substr(2);
    } else {
        return request_domain.name();  // relative: same host
    }
    auto slash = rest.find_first_of("/?#");
    std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
    if (auto at = authority.rfind('@'); at != std::string::npos)
        authority = authority.substr(at + 1);
    if (auto colon = authority.rfind(':'); colon != std::string::npos &&
                                           authority.find(']') == std::string::npos)
        authority = authority.substr(0, colon);
    if (!authority.empty() && authority.back() == '.') authority.pop_back();
    return strings::to_lower(authority);
}

namespace {

std::string registrable_or_host(const std::string& host, const PublicSuffixList& psl) {
    return psl.registrable_domain(host);
}

HttpClassification untestable(std::string note) {
    HttpClassification c;
    c.verdict = Verdict::untestable;
    c.note = std::move(note);
    return c;
}

HttpClassification censored(std::string evidence, std::string note = {}) {
    HttpClassification c;
    c.verdict = Verdict::censored;
    c.evidence = std::move(evidence);
    c.note = std::move(note);
    return c;
}

HttpClassification uncensored(std::string note = {}) {
    HttpClassification c;
    c.verdict = Verdict::uncensored;
    c.note = std::move(note);
    return c;
}

}  // namespace

HttpClassification classify_http(const HttpFetchRecord& test,
                                 const std::vector<HttpFetchRecord>& controls,
                                 const PublicSuffixList& psl, const HttpAnalysisConfig& cfg) {
    std::vector<const HttpFetchRecord*> ok_controls;
    for (const HttpFetchRecord& c : controls)
        if (c.fetch_status == FetchStatus::ok) ok_controls.push_back(&c);
    if (ok_controls.empty()) return untestable("controls_failed");

    std::vector<int> statuses;
    for (const auto* c : ok_controls) statuses.push_back(c->status_code);
    auto consensus = stats::strict_majority_mode(statuses);
    if (!consensus) return untestable("no_status_consensus");

    // Test-side terminal states come first: an injected reset is the verdict
    // regardless of what the consensus would have been.
    switch (test.fetch_status) {
        case FetchStatus::reset:
            return censored("http_reset");
        case FetchStatus::timeout:
            return untestable("test_timeout");
        case FetchStatus::conn_error:
            return untestable("test_conn_error");
        case FetchStatus::ok:
            break;
    }

    HttpClassification out;
    out.consensus_status = *consensus;

    if (test.status_code != *consensus) {
        out.verdict = Verdict::censored;
        out.evidence = "http_status";
        out.note = "consensus=" + std::to_string(*consensus) +
                   " test=" + std::to_string(test.status_code);
        return out;
    }

    int family = *consensus / 100;
    // Only controls agreeing with the consensus status feed the deeper checks.
    std::vector<const HttpFetchRecord*> agreeing;
    for (const auto* c : ok_controls)
        if (c->status_code == *consensus) agreeing.push_back(c);

    if (family == 2) {
        std::vector<double> lens;
        for (const auto* c : agreeing) lens.push_back(static_cast<double>(c->body_length));
        double delta = 0, mu = 0, sigma = 0;
        bool len_bad = length_inconsistent(static_cast<double>(test.body_length), lens, cfg,
                                           &delta, &mu, &sigma);
        out.length_mean = mu;
        out.length_stddev = sigma;
        out.length_delta = delta;
        if (len_bad) {
            out.verdict = Verdict::censored;
            out.evidence = "http_length";
            return out;
        }
        std::vector<TagTfVector> tfs;
        for (const auto* c : agreeing) tfs.push_back(c->tag_tf);
        double cc_mean = 0, cc_stddev = 0, tc_mean = 0;
        bool body_bad = body_inconsistent(test.tag_tf, tfs, cfg, &cc_mean, &cc_stddev, &tc_mean);
        if (tfs.size() >= 2) {
            out.cc_mean = cc_mean;
            out.cc_stddev = cc_stddev;
            out.tc_mean = tc_mean;
        } else {
            out.note = "single_control_body_check_skipped";
        }
        if (body_bad) {
            out.verdict = Verdict::censored;
            out.evidence = "http_body";
            return out;
        }
        out.verdict = Verdict::uncensored;
        return out;
    }

    if (family == 3) {
        std::set<std::string> control_regs;
        bool any_location = false;
        for (const auto* c : agreeing) {
            if (!c->redirect_location) continue;
            any_location = true;
            control_regs.insert(
                registrable_or_host(redirect_host(*c->redirect_location, c->domain), psl));
        }
        if (!any_location) {
            // Nothing to compare against; same status family already matched.
            out.verdict = Verdict::uncensored;
            out.note = "no_control_location";
            return out;
        }
        if (!test.redirect_location) {
            out.verdict = Verdict::censored;
            out.evidence = "http_redirect";
            out.note = "missing_location";
            return out;
        }
        std::string test_reg =
            registrable_or_host(redirect_host(*test.redirect_location, test.domain), psl);
        if (!control_regs.count(test_reg)) {
            out.verdict = Verdict::censored;
            out.evidence = "http_redirect";
            out.note = "test_target=" + test_reg;
            return out;
        }
        out.verdict = Verdict::uncensored;
        return out;
    }

    // 4xx/5xx (and 1xx, which behaves the same): compare header-key shape.
    std::set<std::string> k_common, k_union;
    bool first = true;
    for (const auto* c : agreeing) {
        std::set<std::string> keys(c->header_keys.begin(), c->header_keys.end());
        k_union.insert(keys.begin(), keys.end());
        if (first) {
            k_common = keys;
            first = false;
        } else {
            std::set<std::string> inter;
            std::set_intersection(k_common.begin(), k_common.end(), keys.begin(), keys.end(),
                                  std::inserter(inter, inter.begin()));
            k_common = std::move(inter);
        }
    }
    std::set<std::string> test_keys(test.header_keys.begin(), test.header_keys.end());
    bool common_present = std::includes(test_keys.begin(), test_keys.end(), k_common.begin(),
                                        k_common.end());
    bool within_union = std::includes(k_union.begin(), k_union.end(), test_keys.begin(),
                                      test_keys.end());
    if (!common_present || !within_union) {
        out.verdict = Verdict::censored;
        out.evidence = "http_headers";
        out.note = !common_present ? "missing_common_keys" : "keys_outside_union";
        return out;
    }
    out.verdict = Verdict::uncensored;
    return out;
}

HttpFetchRecord fetch_http_record(const net::Vantage& vantage, const Ipv4& ip,
                                  std::uint16_t port, const Domain& domain, bool is_control,
                                  const HttpFetchConfig& cfg,
                                  const std::vector<CensorSignature>* sigs) {
    HttpFetchRecord rec;
    rec.domain = domain;
    rec.vantage = vantage.id();
    rec.is_control = is_control;

    HttpResponse resp = http_get(vantage, ip, port, domain.name(), "/", cfg);
    rec.fetch_status = resp.status;
    if (resp.status != FetchStatus::ok) return rec;

    rec.status_code = resp.status_code;
    rec.header_keys = resp.header_keys();
    if (resp.status_code / 100 == 3) rec.redirect_location = resp.header("location");
    rec.body_length = resp.body.size();
    rec.tag_tf = html_tag_tf(resp.body);
    if (sigs)
        if (auto m = match_signatures(*sigs, resp)) rec.matched_signature = *m;
    return rec;
}

}  // namespace cenprobe
