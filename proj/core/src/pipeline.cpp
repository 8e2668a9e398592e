#include "cenprobe/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "cenprobe/bogon.hpp"
#include "cenprobe/dns_channel.hpp"
#include "cenprobe/public_suffix.hpp"

namespace cenprobe::pipeline {

namespace fs = std::filesystem;

OutputPaths make_output_paths(const std::string& dir) {
    OutputPaths p;
    p.dir = dir;
    auto join = [&dir](const char* name) { return (fs::path(dir) / name).string(); };
    p.dns_records = join("dns.jsonl");
    p.tcp_records = join("tcp.jsonl");
    p.http_records = join("http.jsonl");
    p.sni_records = join("sni.jsonl");
    p.verdicts = join("verdicts.jsonl");
    p.report_json = join("report.json");
    p.summary_csv = join("summary.csv");
    p.frequency_csv = join("ip_frequency.csv");
    p.verdicts_csv = join("verdicts.csv");
    p.domains_txt = join("domains.txt");
    p.sources_json = join("sources.json");
    return p;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("short write to " + path);
}

void write_jsonl(const std::string& path, const std::vector<std::string>& lines) {
    std::string blob;
    for (const std::string& line : lines) {
        blob += line;
        blob += '\n';
    }
    write_text_file(path, blob);
}

void append_jsonl(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const std::string& line : lines) out << line << '\n';
    if (!out) throw std::runtime_error("short write to " + path);
}

std::vector<Domain> scenario_probe_set(const sim::Scenario& scenario) {
    std::set<std::string> names;
    for (const auto& [d, spec] : scenario.origins) names.insert(d);
    for (const auto& [d, rule] : scenario.dns_rules) names.insert(d);
    for (const auto& [d, rule] : scenario.http_rules) names.insert(d);
    for (const auto& [d, rule] : scenario.tcp_rules) names.insert(d);
    for (const auto& d : scenario.sni_blocklist) names.insert(d);

    std::vector<Domain> out;
    for (const std::string& name : names) {
        auto domain = Domain::parse(name);
        if (!domain) throw std::runtime_error("scenario domain fails to parse: " + name);
        out.push_back(*domain);
    }
    return out;
}

namespace {

BogonList bogons_for(const RunConfig& cfg) {
    return cfg.bogons_path.empty() ? BogonList::builtin() : BogonList::from_file(cfg.bogons_path);
}

/// Shared analysis tail for live and replayed DNS records. Records must be
/// grouped the way the prober writes them; for each (domain, channel) pair
/// the last record wins, so appended re-runs supersede older lines.
DnsStageResult finish_dns(std::vector<jsonl::DnsLineRecord> records, const RunConfig& cfg) {
    DnsStageResult result;
    result.records = std::move(records);

    std::vector<std::string> order;
    std::map<std::string, DomainDnsData> by_domain;
    for (const jsonl::DnsLineRecord& rec : result.records) {
        auto it = by_domain.find(rec.domain);
        if (it == by_domain.end()) {
            auto domain = Domain::parse(rec.domain);
            if (!domain) continue;
            order.push_back(rec.domain);
            it = by_domain.emplace(rec.domain, DomainDnsData{*domain, {}, {}}).first;
        }
        if (rec.is_control)
            it->second.controls[rec.channel] = rec.outcome;
        else
            it->second.test = rec.outcome;
    }

    std::vector<DomainDnsData> data;
    std::vector<DnsOutcome> test_outcomes;
    for (const std::string& name : order) {
        DomainDnsData& d = by_domain.at(name);
        test_outcomes.push_back(d.test);

        std::set<Ipv4> ips;
        for (const auto& [channel, outcome] : d.controls)
            for (const Ipv4& ip : outcome.ips) ips.insert(ip);
        result.control_ips[name].assign(ips.begin(), ips.end());

        data.push_back(std::move(d));
    }

    result.analysis = analyze_dns(data, bogons_for(cfg), dns_analysis_config(cfg));
    result.test_frequency = ip_frequency_table(test_outcomes);
    return result;
}

}  // namespace

DnsStageResult run_dns_stage(sim::SimNetwork& net, const std::vector<Domain>& domains,
                             const RunConfig& cfg) {
    const ChannelSpec test = net.test_channel();
    const std::vector<ChannelSpec> controls = net.control_channels();

    std::vector<jsonl::DnsLineRecord> records;
    records.reserve(domains.size() * (1 + controls.size()));
    for (const Domain& domain : domains) {
        records.push_back({domain.name(), test.id, false,
                           resolve_via_channel(test, domain, cfg.dns_timeout)});
        for (const ChannelSpec& channel : controls)
            records.push_back({domain.name(), channel.id, true,
                               resolve_via_channel(channel, domain, cfg.dns_timeout)});
    }
    return finish_dns(std::move(records), cfg);
}

DnsStageResult analyze_dns_records(const std::vector<jsonl::DnsLineRecord>& records,
                                   const RunConfig& cfg) {
    return finish_dns(records, cfg);
}

std::map<std::string, std::vector<Ipv4>> control_targets(sim::SimNetwork& net,
                                                          const std::vector<Domain>& domains,
                                                          const RunConfig& cfg) {
    std::map<std::string, std::vector<Ipv4>> out;
    const std::vector<ChannelSpec> controls = net.control_channels();
    for (const Domain& domain : domains) {
        std::set<Ipv4> ips;
        for (const ChannelSpec& channel : controls) {
            DnsOutcome outcome = resolve_via_channel(channel, domain, cfg.dns_timeout);
            for (const Ipv4& ip : outcome.ips) ips.insert(ip);
        }
        out[domain.name()].assign(ips.begin(), ips.end());
    }
    return out;
}

namespace {

std::vector<Ipv4> capped_targets(const std::map<std::string, std::vector<Ipv4>>& targets,
                                 const std::string& domain, std::size_t cap) {
    auto it = targets.find(domain);
    if (it == targets.end()) return {};
    std::vector<Ipv4> out = it->second;
    if (out.size() > cap) out.resize(cap);
    return out;
}

ProbeVerdict tcp_domain_verdict(const std::string& domain,
                                const std::vector<const TcpProbeRecord*>& records) {
    ProbeVerdict v;
    v.domain = domain;
    v.technique = technique::kTcp;
    if (records.empty()) {
        v.verdict = Verdict::untestable;
        v.note = "no_address";
        return v;
    }
    const TcpProbeRecord* censored = nullptr;
    const TcpProbeRecord* uncensored = nullptr;
    for (const TcpProbeRecord* rec : records) {
        if (rec->verdict == Verdict::censored && !censored) censored = rec;
        if (rec->verdict == Verdict::uncensored && !uncensored) uncensored = rec;
    }
    const TcpProbeRecord* chosen = censored ? censored : (uncensored ? uncensored : records.front());
    v.verdict = chosen->verdict;
    v.evidence = chosen->evidence;
    v.note = chosen->note;
    v.ip = chosen->ip.to_string();
    return v;
}

std::vector<ProbeVerdict> tcp_verdicts(const std::vector<TcpProbeRecord>& records) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const TcpProbeRecord*>> by_domain;
    for (const TcpProbeRecord& rec : records) {
        auto [it, inserted] = by_domain.try_emplace(rec.domain.name());
        if (inserted) order.push_back(rec.domain.name());
        it->second.push_back(&rec);
    }
    std::vector<ProbeVerdict> out;
    for (const std::string& name : order) out.push_back(tcp_domain_verdict(name, by_domain.at(name)));
    return out;
}

}  // namespace

TcpStageResult run_tcp_stage(sim::SimNetwork& net, const std::vector<Domain>& domains,
                             const std::map<std::string, std::vector<Ipv4>>& targets,
                             const RunConfig& cfg, const SleepFn& sleep) {
    const net::Vantage test(net.test_vantage());
    const std::vector<net::VantageSpec> control_specs = net.control_vantages();
    if (control_specs.empty()) throw std::runtime_error("tcp stage needs a control vantage");
    const net::Vantage control(control_specs.front());

    TcpStageResult result;
    const TcpProbeConfig probe_cfg = tcp_probe_config(cfg);
    for (const Domain& domain : domains) {
        std::vector<Ipv4> ips = capped_targets(targets, domain.name(), cfg.ip_cap);
        for (const Ipv4& ip : ips)
            for (std::uint16_t port : cfg.tcp_ports)
                result.records.push_back(probe_tcp(test, control, domain, ip, port, probe_cfg, sleep));
    }
    result.verdicts = tcp_verdicts(result.records);
    std::set<std::string> seen;
    for (const ProbeVerdict& v : result.verdicts) seen.insert(v.domain);
    for (const Domain& domain : domains)
        if (!seen.count(domain.name()))
            result.verdicts.push_back(tcp_domain_verdict(domain.name(), {}));
    return result;
}

TcpStageResult analyze_tcp_records(std::vector<TcpProbeRecord> records) {
    for (TcpProbeRecord& rec : records) finish_tcp_record(rec);
    TcpStageResult result;
    result.records = std::move(records);
    result.verdicts = tcp_verdicts(result.records);
    return result;
}

namespace {

ProbeVerdict http_verdict_for(const std::string& domain, const HttpFetchRecord* test,
                              const std::vector<HttpFetchRecord>& controls,
                              const PublicSuffixList& psl, const RunConfig& cfg) {
    ProbeVerdict v;
    v.domain = domain;
    v.technique = technique::kHttp;
    if (!test) {
        v.verdict = Verdict::untestable;
        v.note = "no_test_fetch";
        return v;
    }
    HttpClassification c = classify_http(*test, controls, psl, http_analysis_config(cfg));
    v.verdict = c.verdict;
    v.evidence = c.evidence;
    v.note = c.note;
    if (!test->matched_signature.empty()) v.matched_signature = test->matched_signature;
    return v;
}

HttpStageResult http_stage_from_records(std::vector<HttpFetchRecord> records,
                                        const RunConfig& cfg) {
    HttpStageResult result;
    result.records = std::move(records);

    const PublicSuffixList psl = PublicSuffixList::builtin();
    std::vector<std::string> order;
    struct Group {
        const HttpFetchRecord* test = nullptr;
        std::vector<HttpFetchRecord> controls;
    };
    std::map<std::string, Group> by_domain;
    for (const HttpFetchRecord& rec : result.records) {
        auto [it, inserted] = by_domain.try_emplace(rec.domain.name());
        if (inserted) order.push_back(rec.domain.name());
        if (rec.is_control)
            it->second.controls.push_back(rec);
        else
            it->second.test = &rec;
    }
    for (const std::string& name : order) {
        const Group& g = by_domain.at(name);
        result.verdicts.push_back(http_verdict_for(name, g.test, g.controls, psl, cfg));
        if (g.test && !g.test->matched_signature.empty())
            result.signatures_matched[name] = g.test->matched_signature;
    }
    return result;
}

}  // namespace

HttpStageResult run_http_stage(sim::SimNetwork& net, const std::vector<Domain>& domains,
                               const std::map<std::string, std::vector<Ipv4>>& targets,
                               const RunConfig& cfg) {
    const net::Vantage test(net.test_vantage());
    std::vector<net::Vantage> controls;
    for (const net::VantageSpec& spec : net.control_vantages()) controls.emplace_back(spec);

    std::vector<CensorSignature> sigs;
    if (!cfg.signatures_path.empty()) sigs = load_signatures(cfg.signatures_path);
    const std::vector<CensorSignature>* sigs_ptr = sigs.empty() ? nullptr : &sigs;

    const HttpFetchConfig fetch_cfg = http_fetch_config(cfg);
    std::vector<HttpFetchRecord> records;
    for (const Domain& domain : domains) {
        std::vector<Ipv4> ips = capped_targets(targets, domain.name(), 1);
        if (ips.empty()) {
            HttpFetchRecord miss;
            miss.domain = domain;
            miss.vantage = test.id();
            miss.is_control = false;
            miss.fetch_status = FetchStatus::conn_error;
            records.push_back(std::move(miss));
            continue;
        }
        const Ipv4 target = ips.front();
        records.push_back(fetch_http_record(test, target, 80, domain, false, fetch_cfg, sigs_ptr));
        for (const net::Vantage& control : controls)
            records.push_back(fetch_http_record(control, target, 80, domain, true, fetch_cfg, sigs_ptr));
    }
    return http_stage_from_records(std::move(records), cfg);
}

HttpStageResult analyze_http_records(const std::vector<HttpFetchRecord>& records,
                                     const RunConfig& cfg) {
    return http_stage_from_records(records, cfg);
}

namespace {

std::vector<ProbeVerdict> sni_verdicts(const std::vector<SniProbeRecord>& records) {
    std::vector<ProbeVerdict> out;
    for (const SniProbeRecord& rec : records) {
        ProbeVerdict v;
        v.domain = rec.domain.name();
        v.technique = technique::kSni;
        v.verdict = rec.verdict;
        v.evidence = rec.evidence;
        v.note = rec.note;
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace

SniStageResult run_sni_stage(sim::SimNetwork& net, const std::vector<Domain>& domains,
                             const RunConfig& cfg) {
    const net::Vantage test(net.test_vantage());
    const std::vector<net::VantageSpec> control_specs = net.control_vantages();
    if (control_specs.empty()) throw std::runtime_error("sni stage needs a control vantage");
    const net::Vantage control(control_specs.front());

    SniStageResult result;
    const SniProbeConfig probe_cfg = sni_probe_config(cfg);
    for (const Domain& domain : domains)
        result.records.push_back(probe_sni(test, control, domain, net.reflector_ip(), probe_cfg));
    result.verdicts = sni_verdicts(result.records);
    return result;
}

SniStageResult analyze_sni_records(std::vector<SniProbeRecord> records) {
    for (SniProbeRecord& rec : records) finish_sni_record(rec);
    SniStageResult result;
    result.records = std::move(records);
    result.verdicts = sni_verdicts(result.records);
    return result;
}

namespace {

void write_derived_outputs(const OutputPaths& paths, const RunReport& report,
                           const std::vector<ProbeVerdict>& verdicts) {
    std::vector<std::string> verdict_lines;
    for (const ProbeVerdict& v : verdicts) verdict_lines.push_back(jsonl::to_line(v));
    write_jsonl(paths.verdicts, verdict_lines);
    write_text_file(paths.verdicts_csv, verdicts_csv(verdicts));
    write_text_file(paths.report_json, emit_report(report, ReportFormat::json));
    write_text_file(paths.summary_csv, summary_csv(report));
    write_text_file(paths.frequency_csv, frequency_csv(report.ip_frequency));
}

FullRunResult assemble_full(const RunConfig& cfg, const OutputPaths& paths,
                            const DnsStageResult* dns, const TcpStageResult* tcp,
                            const HttpStageResult* http, const SniStageResult* sni) {
    FullRunResult result;
    result.report.isp = cfg.isp;
    if (dns) {
        result.report.dns = dns->analysis.mrf;
        result.report.ip_frequency = dns->test_frequency;
        result.report.verdicts.insert(result.report.verdicts.end(),
                                      dns->analysis.verdicts.begin(),
                                      dns->analysis.verdicts.end());
    }
    if (tcp)
        result.report.verdicts.insert(result.report.verdicts.end(), tcp->verdicts.begin(),
                                      tcp->verdicts.end());
    if (http)
        result.report.verdicts.insert(result.report.verdicts.end(), http->verdicts.begin(),
                                      http->verdicts.end());
    if (sni)
        result.report.verdicts.insert(result.report.verdicts.end(), sni->verdicts.begin(),
                                      sni->verdicts.end());

    finalize_report(result.report, http ? http->signatures_matched
                                        : std::map<std::string, std::string>{});
    write_derived_outputs(paths, result.report, result.report.verdicts);

    for (const ProbeVerdict& v : result.report.verdicts)
        if (v.verdict == Verdict::untestable) result.any_untestable = true;
    return result;
}

}  // namespace

FullRunResult run_full(const sim::Scenario& scenario, const RunConfig& cfg) {
    sim::SimNetwork net(scenario, sim_network_config(cfg));
    if (!net.start()) throw std::runtime_error("simulated network failed to start");

    const std::vector<Domain> domains = scenario_probe_set(scenario);
    const OutputPaths paths = make_output_paths(cfg.output_dir);
    ensure_dir(cfg.output_dir);

    DnsStageResult dns = run_dns_stage(net, domains, cfg);
    {
        std::vector<std::string> lines;
        for (const jsonl::DnsLineRecord& rec : dns.records) lines.push_back(jsonl::to_line(rec));
        write_jsonl(paths.dns_records, lines);
    }

    TcpStageResult tcp = run_tcp_stage(net, domains, dns.control_ips, cfg);
    {
        std::vector<std::string> lines;
        for (const TcpProbeRecord& rec : tcp.records) lines.push_back(jsonl::to_line(rec));
        write_jsonl(paths.tcp_records, lines);
    }

    HttpStageResult http = run_http_stage(net, domains, dns.control_ips, cfg);
    {
        std::vector<std::string> lines;
        for (const HttpFetchRecord& rec : http.records) lines.push_back(jsonl::to_line(rec));
        write_jsonl(paths.http_records, lines);
    }

    SniStageResult sni = run_sni_stage(net, domains, cfg);
    {
        std::vector<std::string> lines;
        for (const SniProbeRecord& rec : sni.records) lines.push_back(jsonl::to_line(rec));
        write_jsonl(paths.sni_records, lines);
    }

    net.stop();
    return assemble_full(cfg, paths, &dns, &tcp, &http, &sni);
}

FullRunResult analyze_stored(const RunConfig& cfg) {
    const OutputPaths paths = make_output_paths(cfg.output_dir);

    std::optional<DnsStageResult> dns;
    std::optional<TcpStageResult> tcp;
    std::optional<HttpStageResult> http;
    std::optional<SniStageResult> sni;

    if (fs::exists(paths.dns_records)) {
        std::vector<jsonl::DnsLineRecord> records;
        for (const std::string& line : jsonl::read_lines(paths.dns_records))
            if (auto rec = jsonl::dns_from_line(line)) records.push_back(std::move(*rec));
        dns = analyze_dns_records(records, cfg);
    }
    if (fs::exists(paths.tcp_records)) {
        std::vector<TcpProbeRecord> records;
        for (const std::string& line : jsonl::read_lines(paths.tcp_records))
            if (auto rec = jsonl::tcp_from_line(line)) records.push_back(std::move(*rec));
        tcp = analyze_tcp_records(std::move(records));
    }
    if (fs::exists(paths.http_records)) {
        std::vector<HttpFetchRecord> records;
        for (const std::string& line : jsonl::read_lines(paths.http_records))
            if (auto rec = jsonl::http_from_line(line)) records.push_back(std::move(*rec));
        http = analyze_http_records(records, cfg);
    }
    if (fs::exists(paths.sni_records)) {
        std::vector<SniProbeRecord> records;
        for (const std::string& line : jsonl::read_lines(paths.sni_records))
            if (auto rec = jsonl::sni_from_line(line)) records.push_back(std::move(*rec));
        sni = analyze_sni_records(std::move(records));
    }

    if (!dns && !tcp && !http && !sni)
        throw std::runtime_error("no probe records found under " + cfg.output_dir);

    return assemble_full(cfg, paths, dns ? &*dns : nullptr, tcp ? &*tcp : nullptr,
                         http ? &*http : nullptr, sni ? &*sni : nullptr);
}

}  // namespace cenprobe::pipeline
