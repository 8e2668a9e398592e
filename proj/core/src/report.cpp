#include "cenprobe/report.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cenprobe/version.hpp"

namespace cenprobe {

using nlohmann::ordered_json;

namespace {

constexpr const char* kTechniques[] = {technique::kDns, technique::kTcp, technique::kHttp,
                                       technique::kSni};

std::vector<ProbeVerdict> sorted_verdicts(const std::vector<ProbeVerdict>& verdicts) {
    std::vector<ProbeVerdict> out = verdicts;
    std::sort(out.begin(), out.end(), [](const ProbeVerdict& a, const ProbeVerdict& b) {
        if (a.domain != b.domain) return a.domain < b.domain;
        return a.technique < b.technique;
    });
    return out;
}

ordered_json verdict_to_json(const ProbeVerdict& v) {
    ordered_json j;
    j["domain"] = v.domain;
    j["technique"] = v.technique;
    j["verdict"] = std::string(to_string(v.verdict));
    if (!v.evidence.empty()) j["evidence"] = v.evidence;
    if (!v.note.empty()) j["note"] = v.note;
    if (v.matched_signature) j["matched_signature"] = *v.matched_signature;
    if (v.ip) j["ip"] = *v.ip;
    return j;
}

ordered_json mrf_stat_to_json(const MrfStat& s) {
    ordered_json j;
    j["channel"] = s.channel;
    j["most_frequent_ip"] = s.most_frequent_ip.to_string();
    j["mrf"] = s.mrf;
    j["sample_size"] = s.sample_size;
    return j;
}

ordered_json mrf_report_to_json(const MrfReport& r) {
    ordered_json j;
    j["dprime_size"] = r.dprime_size;
    j["evaluated"] = r.evaluated;
    j["tampering"] = r.tampering;
    if (!r.gate_reason.empty()) j["gate_reason"] = r.gate_reason;
    if (r.test_stat) j["test"] = mrf_stat_to_json(*r.test_stat);
    ordered_json controls = ordered_json::array();
    for (const MrfStat& s : r.control_stats) controls.push_back(mrf_stat_to_json(s));
    j["controls"] = std::move(controls);
    if (r.evaluated) {
        j["control_mean"] = r.control_mean;
        j["control_stddev"] = r.control_stddev;
        j["threshold"] = r.threshold;
    }
    return j;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

ReportFormat report_format_from_string(const std::string& s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    throw std::invalid_argument("unknown report format: " + s);
}

void finalize_report(RunReport& report,
                     const std::map<std::string, std::string>& signatures_matched) {
    TechniqueSets sets = aggregate_verdicts(report.verdicts);
    report.venn = technique_venn(sets.censored);
    if (sets.censored.size() >= 2)
        report.technique_overlap = overlap_matrix(sets.censored);
    else
        report.technique_overlap.reset();
    report.blocklist = assemble_blocklist(report.isp, report.verdicts, signatures_matched);
}

std::string emit_report(const RunReport& report, ReportFormat format) {
    if (format == ReportFormat::csv) return summary_csv(report);

    TechniqueSets sets = aggregate_verdicts(report.verdicts);

    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["tool"] = {{"name", "cenprobe"}, {"version", kVersion}};
    j["isp"] = report.isp;

    ordered_json summary = ordered_json::array();
    for (const char* t : kTechniques) {
        ordered_json row;
        row["isp"] = report.isp;
        row["technique"] = t;
        auto c = sets.censored.find(t);
        auto u = sets.untestable.find(t);
        row["censored_count"] = c == sets.censored.end() ? 0 : c->second.size();
        row["untestable_count"] = u == sets.untestable.end() ? 0 : u->second.size();
        summary.push_back(std::move(row));
    }
    j["summary"] = std::move(summary);

    ordered_json verdicts = ordered_json::array();
    for (const ProbeVerdict& v : sorted_verdicts(report.verdicts))
        verdicts.push_back(verdict_to_json(v));
    j["verdicts"] = std::move(verdicts);

    if (report.dns) j["dns"] = mrf_report_to_json(*report.dns);

    ordered_json freq = ordered_json::array();
    for (const IpFrequencyRow& row : report.ip_frequency) {
        ordered_json item;
        item["ip"] = row.ip.to_string();
        item["count"] = row.count;
        item["fraction"] = row.fraction;
        freq.push_back(std::move(item));
    }
    j["ip_frequency"] = std::move(freq);

    ordered_json venn = ordered_json::object();
    for (const auto& [region, count] : report.venn) venn[region] = count;
    j["venn"] = std::move(venn);

    if (report.technique_overlap) {
        const OverlapMatrix& m = *report.technique_overlap;
        ordered_json overlap;
        overlap["names"] = m.names;
        overlap["jaccard"] = m.jaccard;
        overlap["intersection"] = m.intersection;
        j["technique_overlap"] = std::move(overlap);
    }

    if (report.blocklist) {
        const Blocklist& b = *report.blocklist;
        ordered_json bl;
        bl["isp"] = b.isp;
        bl["domains"] = b.domains;
        ordered_json per = ordered_json::object();
        for (const auto& [t, domains] : b.per_technique) per[t] = domains;
        bl["per_technique"] = std::move(per);
        ordered_json excluded = ordered_json::array();
        for (const CollateralExclusion& e : b.excluded)
            excluded.push_back({{"domain", e.domain}, {"signature", e.signature}});
        bl["excluded_collateral"] = std::move(excluded);
        j["blocklist"] = std::move(bl);
    }

    return j.dump(2) + "\n";
}

std::string summary_csv(const RunReport& report) {
    TechniqueSets sets = aggregate_verdicts(report.verdicts);
    std::ostringstream out;
    out << "isp,technique,censored_count,untestable_count\n";
    for (const char* t : kTechniques) {
        auto c = sets.censored.find(t);
        auto u = sets.untestable.find(t);
        out << csv_field(report.isp) << ',' << t << ','
            << (c == sets.censored.end() ? 0 : c->second.size()) << ','
            << (u == sets.untestable.end() ? 0 : u->second.size()) << '\n';
    }
    return out.str();
}

std::string frequency_csv(const std::vector<IpFrequencyRow>& rows) {
    std::ostringstream out;
    out << "ip,count,fraction\n";
    for (const IpFrequencyRow& row : rows)
        out << row.ip.to_string() << ',' << row.count << ',' << row.fraction << '\n';
    return out.str();
}

std::string verdicts_csv(const std::vector<ProbeVerdict>& verdicts) {
    std::ostringstream out;
    out << "domain,technique,verdict,evidence,note,signature,ip\n";
    for (const ProbeVerdict& v : sorted_verdicts(verdicts)) {
        out << csv_field(v.domain) << ',' << v.technique << ',' << to_string(v.verdict) << ','
            << csv_field(v.evidence) << ',' << csv_field(v.note) << ','
            << csv_field(v.matched_signature.value_or("")) << ','
            << csv_field(v.ip.value_or("")) << '\n';
    }
    return out.str();
}

}  // namespace cenprobe
