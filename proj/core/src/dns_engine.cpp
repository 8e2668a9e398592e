#include "cenprobe/dns_engine.hpp"

#include <algorithm>

#include "cenprobe/stats.hpp"

namespace cenprobe {

std::string_view to_string(DirectClass c) {
    switch (c) {
        case DirectClass::uncensored: return "uncensored";
        case DirectClass::censored_error: return "censored_error";
        case DirectClass::censored_bogon: return "censored_bogon";
        case DirectClass::mismatch: return "mismatch";
        case DirectClass::untestable: return "untestable";
    }
    return "untestable";
}

std::set<Ipv4> control_ip_union(const DomainDnsData& data) {
    std::set<Ipv4> out;
    for (const auto& [id, outcome] : data.controls) {
        if (outcome.kind != OutcomeKind::answers) continue;
        out.insert(outcome.ips.begin(), outcome.ips.end());
    }
    return out;
}

DirectClass classify_direct(const DomainDnsData& data, const BogonList& bogons) {
    std::set<Ipv4> union_set = control_ip_union(data);
    if (union_set.empty()) return DirectClass::untestable;

    switch (data.test.kind) {
        case OutcomeKind::timeout:
            return DirectClass::untestable;
        case OutcomeKind::error:
            return DirectClass::censored_error;
        case OutcomeKind::answers:
            break;
    }
    for (const Ipv4& ip : data.test.ips)
        if (bogons.contains(ip)) return DirectClass::censored_bogon;
    for (const Ipv4& ip : data.test.ips)
        if (!union_set.count(ip)) return DirectClass::mismatch;
    return DirectClass::uncensored;
}

MrfStat compute_mrf(const std::string& channel_id, const std::vector<DnsOutcome>& outcomes) {
    std::map<Ipv4, size_t> counts;
    size_t total = 0;
    for (const DnsOutcome& o : outcomes) {
        if (o.kind != OutcomeKind::answers || o.ips.empty()) continue;
        ++counts[o.ips.front()];
        ++total;
    }
    if (total == 0) throw std::invalid_argument("empty sample");

    auto best = counts.begin();
    for (auto it = std::next(counts.begin()); it != counts.end(); ++it) {
        if (it->second > best->second ||
            (it->second == best->second && lexicographic_less(it->first, best->first)))
            best = it;
    }
    MrfStat stat;
    stat.channel = channel_id;
    stat.most_frequent_ip = best->first;
    stat.mrf = static_cast<double>(best->second) / static_cast<double>(total);
    stat.sample_size = total;
    return stat;
}

TamperingDecision detect_tampering(const MrfStat& test, const std::vector<MrfStat>& controls,
                                   const DnsAnalysisConfig& cfg) {
    if (controls.size() < cfg.min_control_channels)
        throw std::invalid_argument("insufficient controls");
    std::vector<double> mrfs;
    mrfs.reserve(controls.size());
    for (const MrfStat& c : controls) mrfs.push_back(c.mrf);

    TamperingDecision d;
    d.control_mean = stats::mean(mrfs);
    d.control_stddev = stats::pop_stddev(mrfs);
    double sigma = std::max(d.control_stddev, cfg.sigma_floor);
    d.threshold = d.control_mean + cfg.sigma_mult * sigma;
    d.tampering = (test.mrf - d.control_mean) > cfg.sigma_mult * sigma;
    return d;
}

namespace {

ProbeVerdict make_verdict(const Domain& domain, Verdict v, std::string evidence,
                          std::string note = {}, std::optional<Ipv4> ip = std::nullopt) {
    ProbeVerdict pv;
    pv.domain = domain.name();
    pv.technique = technique::kDns;
    pv.verdict = v;
    pv.evidence = std::move(evidence);
    pv.note = std::move(note);
    if (ip) pv.ip = ip->to_string();
    return pv;
}

std::string rcode_note(const DnsOutcome& o) {
    RCode code = o.error_code.value_or(RCode::other);
    return std::string("rcode=") + std::string(to_string(code));
}

}  // namespace

DnsAnalysisResult analyze_dns(const std::vector<DomainDnsData>& data, const BogonList& bogons,
                              const DnsAnalysisConfig& cfg) {
    DnsAnalysisResult result;
    result.verdicts.reserve(data.size());

    std::vector<size_t> mismatch_idx;
    std::vector<DirectClass> classes(data.size());
    for (size_t i = 0; i < data.size(); ++i) {
        classes[i] = classify_direct(data[i], bogons);
        if (classes[i] == DirectClass::mismatch) mismatch_idx.push_back(i);
    }
    result.mrf.dprime_size = mismatch_idx.size();

    // MRF stage over D': the test channel plus each control, restricted to
    // the mismatching domains.
    std::optional<Ipv4> modal_ip;
    if (mismatch_idx.size() >= cfg.min_dprime) {
        std::vector<DnsOutcome> test_sample;
        std::map<std::string, std::vector<DnsOutcome>> control_samples;
        for (size_t i : mismatch_idx) {
            test_sample.push_back(data[i].test);
            for (const auto& [id, outcome] : data[i].controls)
                control_samples[id].push_back(outcome);
        }
        std::vector<MrfStat> control_stats;
        for (const auto& [id, sample] : control_samples) {
            try {
                control_stats.push_back(compute_mrf(id, sample));
            } catch (const std::invalid_argument&) {
                // Control never answered over D'; it contributes nothing.
            }
        }
        MrfStat test_stat = compute_mrf("test", test_sample);
        result.mrf.test_stat = test_stat;
        result.mrf.control_stats = control_stats;
        try {
            TamperingDecision d = detect_tampering(test_stat, control_stats, cfg);
            result.mrf.evaluated = true;
            result.mrf.tampering = d.tampering;
            result.mrf.control_mean = d.control_mean;
            result.mrf.control_stddev = d.control_stddev;
            result.mrf.threshold = d.threshold;
            if (d.tampering) modal_ip = test_stat.most_frequent_ip;
        } catch (const std::invalid_argument&) {
            result.mrf.gate_reason = "insufficient_controls";
        }
    } else if (cfg.min_dprime > 0) {
        result.mrf.gate_reason = "dprime_below_minimum";
    }

    for (size_t i = 0; i < data.size(); ++i) {
        const DomainDnsData& d = data[i];
        switch (classes[i]) {
            case DirectClass::uncensored:
                result.verdicts.push_back(make_verdict(d.domain, Verdict::uncensored, ""));
                break;
            case DirectClass::censored_error:
                result.verdicts.push_back(make_verdict(d.domain, Verdict::censored, "dns_error",
                                                       rcode_note(d.test)));
                break;
            case DirectClass::censored_bogon: {
                std::optional<Ipv4> bogon;
                for (const Ipv4& ip : d.test.ips)
                    if (bogons.contains(ip)) {
                        bogon = ip;
                        break;
                    }
                result.verdicts.push_back(
                    make_verdict(d.domain, Verdict::censored, "dns_bogon", "", bogon));
                break;
            }
            case DirectClass::untestable: {
                std::string note = d.test.kind == OutcomeKind::timeout ? "test_timeout"
                                                                       : "controls_failed";
                result.verdicts.push_back(
                    make_verdict(d.domain, Verdict::untestable, "", note));
                break;
            }
            case DirectClass::mismatch: {
                bool hit = modal_ip && d.test.kind == OutcomeKind::answers &&
                           !d.test.ips.empty() && d.test.ips.front() == *modal_ip;
                if (hit) {
                    result.verdicts.push_back(make_verdict(d.domain, Verdict::censored,
                                                           "dns_tampering", "", modal_ip));
                } else {
                    result.verdicts.push_back(make_verdict(d.domain, Verdict::uncensored, "",
                                                           "unconfirmed_mismatch"));
                }
                break;
            }
        }
    }
    return result;
}

}  // namespace cenprobe
