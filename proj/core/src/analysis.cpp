#include "cenprobe/analysis.hpp"

#include <algorithm>
#include <stdexcept>

#include "cenprobe/strings.hpp"

namespace cenprobe {

TechniqueSets aggregate_verdicts(const std::vector<ProbeVerdict>& verdicts) {
    TechniqueSets out;
    for (const ProbeVerdict& v : verdicts) {
        out.domains.insert(v.domain);
        if (v.verdict == Verdict::censored)
            out.censored[v.technique].insert(v.domain);
        else if (v.verdict == Verdict::untestable)
            out.untestable[v.technique].insert(v.domain);
    }
    return out;
}

JaccardResult jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    JaccardResult r;
    if (a.empty() && b.empty()) {
        r.value = 1.0;
        r.degenerate = true;
        return r;
    }
    std::size_t inter = 0;
    for (const auto& x : a)
        if (b.count(x)) ++inter;
    std::size_t uni = a.size() + b.size() - inter;
    r.value = static_cast<double>(inter) / static_cast<double>(uni);
    return r;
}

OverlapMatrix overlap_matrix(const std::map<std::string, std::set<std::string>>& sets) {
    if (sets.size() < 2) throw std::invalid_argument("overlap_matrix needs at least two sets");
    OverlapMatrix m;
    std::vector<const std::set<std::string>*> members;
    for (const auto& [name, set] : sets) {
        m.names.push_back(name);
        members.push_back(&set);
    }
    std::size_t n = m.names.size();
    m.jaccard.assign(n, std::vector<double>(n, 0.0));
    m.intersection.assign(n, std::vector<std::size_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            std::size_t inter = 0;
            for (const auto& x : *members[i])
                if (members[j]->count(x)) ++inter;
            double jac = cenprobe::jaccard(*members[i], *members[j]).value;
            m.jaccard[i][j] = m.jaccard[j][i] = jac;
            m.intersection[i][j] = m.intersection[j][i] = inter;
        }
    }
    return m;
}

std::map<std::string, std::size_t> technique_venn(
    const std::map<std::string, std::set<std::string>>& sets) {
    std::vector<std::string> names;
    for (const auto& [name, members] : sets) names.push_back(name);

    std::set<std::string> universe;
    for (const auto& [name, members] : sets) universe.insert(members.begin(), members.end());

    std::map<std::string, std::size_t> regions;
    for (const std::string& d : universe) {
        std::vector<std::string> in;
        for (const auto& [name, members] : sets)
            if (members.count(d)) in.push_back(name);
        std::string region;
        if (in.size() == 1)
            region = in.front() + "_only";
        else if (in.size() == names.size() && names.size() == 2)
            region = "both";
        else if (in.size() == names.size())
            region = "all";
        else
            region = strings::join(in, "+");
        ++regions[region];
    }
    return regions;
}

std::vector<IpFrequencyRow> ip_frequency_table(const std::vector<DnsOutcome>& outcomes) {
    std::map<Ipv4, std::size_t> counts;
    std::size_t total = 0;
    for (const DnsOutcome& o : outcomes) {
        if (o.kind != OutcomeKind::answers || o.ips.empty()) continue;
        ++counts[o.ips.front()];
        ++total;
    }
    std::vector<IpFrequencyRow> rows;
    for (const auto& [ip, count] : counts) {
        IpFrequencyRow row;
        row.ip = ip;
        row.count = count;
        row.fraction = total ? static_cast<double>(count) / static_cast<double>(total) : 0.0;
        rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end(), [](const IpFrequencyRow& a, const IpFrequencyRow& b) {
        if (a.count != b.count) return a.count > b.count;
        return lexicographic_less(a.ip, b.ip);
    });
    return rows;
}

std::vector<IpFrequencyRow> ip_frequency_table(
    const std::vector<DnsObservation>& observations) {
    std::vector<DnsOutcome> outcomes;
    outcomes.reserve(observations.size());
    for (const DnsObservation& obs : observations) outcomes.push_back(obs.outcome);
    return ip_frequency_table(outcomes);
}

Blocklist assemble_blocklist(const std::string& isp,
                             const std::vector<ProbeVerdict>& verdicts,
                             const std::map<std::string, std::string>& signatures_matched) {
    // domain → its censoring techniques + the signatures seen on the way.
    std::map<std::string, std::set<std::string>> censored_by;
    std::map<std::string, std::set<std::string>> signatures_by;
    for (const ProbeVerdict& v : verdicts) {
        if (v.verdict != Verdict::censored) continue;
        censored_by[v.domain].insert(v.technique);
        if (v.matched_signature && !v.matched_signature->empty())
            signatures_by[v.domain].insert(*v.matched_signature);
    }
    for (const auto& [domain, sig] : signatures_matched)
        if (!sig.empty()) signatures_by[domain].insert(sig);

    Blocklist out;
    out.isp = isp;
    for (const auto& [domain, techniques] : censored_by) {
        const auto sig_it = signatures_by.find(domain);
        bool own = sig_it == signatures_by.end() || sig_it->second.count(isp);
        if (!own) {
            out.excluded.push_back({domain, *sig_it->second.begin()});
            continue;
        }
        out.domains.insert(domain);
        for (const auto& t : techniques) out.per_technique[t].insert(domain);
    }
    return out;
}

}  // namespace cenprobe
