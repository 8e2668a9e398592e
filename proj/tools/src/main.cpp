#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cenprobe/analysis.hpp"
#include "cenprobe/corpus.hpp"
#include "cenprobe/pipeline.hpp"
#include "cenprobe/report.hpp"
#include "cenprobe/runconfig.hpp"
#include "cenprobe/version.hpp"

namespace {
volatile std::sig_atomic_t g_stop = 0;
}

extern "C" void cenprobe_stop_signal(int) { g_stop = 1; }

namespace {

using namespace cenprobe;

int exit_for(const std::vector<ProbeVerdict>& verdicts) {
    for (const ProbeVerdict& v : verdicts)
        if (v.verdict == Verdict::untestable) return 3;
    return 0;
}

void print_counts(const std::vector<ProbeVerdict>& verdicts) {
    TechniqueSets sets = aggregate_verdicts(verdicts);
    for (const char* t : {technique::kDns, technique::kTcp, technique::kHttp, technique::kSni}) {
        auto c = sets.censored.find(t);
        auto u = sets.untestable.find(t);
        std::size_t censored = c == sets.censored.end() ? 0 : c->second.size();
        std::size_t untestable = u == sets.untestable.end() ? 0 : u->second.size();
        if (censored || untestable || !verdicts.empty())
            std::cout << t << ": " << censored << " censored, " << untestable
                      << " untestable\n";
    }
    std::cout << verdicts.size() << " verdicts over " << sets.domains.size() << " domains\n";
}

const char* skip_reason_name(corpus::SkipReason r) {
    switch (r) {
        case corpus::SkipReason::unparseable: return "unparseable";
        case corpus::SkipReason::bare_ip: return "bare_ip";
        case corpus::SkipReason::invalid_idna: return "invalid_idna";
    }
    return "unknown";
}

int cmd_ingest(const RunConfig& cfg) {
    std::ifstream in(cfg.corpus_path);
    if (!in) throw std::runtime_error("cannot open corpus: " + cfg.corpus_path);
    const auto format = cfg.corpus_format == "csv" ? corpus::ListFormat::csv
                                                   : corpus::ListFormat::plain;
    corpus::ParseResult parsed = corpus::parse_source_list(in, format);
    for (const corpus::RowError& err : parsed.errors)
        std::cerr << cfg.corpus_path << ":" << err.line << ": " << err.message << "\n";

    corpus::ExtractResult extracted = corpus::extract_domains(parsed.entries);
    for (const corpus::SkippedEntry& skip : extracted.skipped)
        std::cerr << "skipped (" << skip_reason_name(skip.reason) << "): " << skip.raw_url
                  << "\n";

    pipeline::ensure_dir(cfg.output_dir);
    const pipeline::OutputPaths paths = pipeline::make_output_paths(cfg.output_dir);

    std::string domains_txt;
    nlohmann::ordered_json sidecar = nlohmann::ordered_json::array();
    for (const Domain& domain : extracted.domains) {
        domains_txt += domain.name();
        domains_txt += '\n';
        nlohmann::ordered_json item;
        item["domain"] = domain.name();
        auto src = extracted.sources.find(domain);
        item["sources"] = src == extracted.sources.end()
                              ? std::set<std::string>{}
                              : src->second;
        sidecar.push_back(std::move(item));
    }
    pipeline::write_text_file(paths.domains_txt, domains_txt);
    pipeline::write_text_file(paths.sources_json, sidecar.dump(2) + "\n");

    std::cout << extracted.domains.size() << " domains (" << extracted.skipped.size()
              << " skipped, " << parsed.errors.size() << " bad rows)\n";
    std::cout << "wrote " << paths.domains_txt << "\n";
    std::cout << "wrote " << paths.sources_json << "\n";
    return 0;
}

sim::Scenario load_scenario_or_throw(const RunConfig& cfg) {
    return sim::load_scenario(cfg.scenario_path);
}

template <typename Records>
void append_records(const std::string& path, const Records& records) {
    std::vector<std::string> lines;
    for (const auto& rec : records) lines.push_back(jsonl::to_line(rec));
    pipeline::append_jsonl(path, lines);
    std::cout << "appended " << lines.size() << " records to " << path << "\n";
}

int cmd_probe_dns(const RunConfig& cfg) {
    sim::Scenario scenario = load_scenario_or_throw(cfg);
    sim::SimNetwork net(std::move(scenario), sim_network_config(cfg));
    if (!net.start()) throw std::runtime_error("simulated network failed to start");
    const std::vector<Domain> domains = pipeline::scenario_probe_set(net.scenario());

    pipeline::DnsStageResult stage = pipeline::run_dns_stage(net, domains, cfg);
    net.stop();

    pipeline::ensure_dir(cfg.output_dir);
    append_records(pipeline::make_output_paths(cfg.output_dir).dns_records, stage.records);
    print_counts(stage.analysis.verdicts);
    return exit_for(stage.analysis.verdicts);
}

int cmd_probe_tcp(const RunConfig& cfg) {
    sim::Scenario scenario = load_scenario_or_throw(cfg);
    sim::SimNetwork net(std::move(scenario), sim_network_config(cfg));
    if (!net.start()) throw std::runtime_error("simulated network failed to start");
    const std::vector<Domain> domains = pipeline::scenario_probe_set(net.scenario());

    auto targets = pipeline::control_targets(net, domains, cfg);
    pipeline::TcpStageResult stage = pipeline::run_tcp_stage(net, domains, targets, cfg);
    net.stop();

    pipeline::ensure_dir(cfg.output_dir);
    append_records(pipeline::make_output_paths(cfg.output_dir).tcp_records, stage.records);
    print_counts(stage.verdicts);
    return exit_for(stage.verdicts);
}

int cmd_probe_http(const RunConfig& cfg) {
    sim::Scenario scenario = load_scenario_or_throw(cfg);
    sim::SimNetwork net(std::move(scenario), sim_network_config(cfg));
    if (!net.start()) throw std::runtime_error("simulated network failed to start");
    const std::vector<Domain> domains = pipeline::scenario_probe_set(net.scenario());

    auto targets = pipeline::control_targets(net, domains, cfg);
    pipeline::HttpStageResult stage = pipeline::run_http_stage(net, domains, targets, cfg);
    net.stop();

    pipeline::ensure_dir(cfg.output_dir);
    append_records(pipeline::make_output_paths(cfg.output_dir).http_records, stage.records);
    print_counts(stage.verdicts);
    return exit_for(stage.verdicts);
}

int cmd_probe_sni(const RunConfig& cfg) {
    sim::Scenario scenario = load_scenario_or_throw(cfg);
    sim::SimNetwork net(std::move(scenario), sim_network_config(cfg));
    if (!net.start()) throw std::runtime_error("simulated network failed to start");
    const std::vector<Domain> domains = pipeline::scenario_probe_set(net.scenario());

    pipeline::SniStageResult stage = pipeline::run_sni_stage(net, domains, cfg);
    net.stop();

    pipeline::ensure_dir(cfg.output_dir);
    append_records(pipeline::make_output_paths(cfg.output_dir).sni_records, stage.records);
    print_counts(stage.verdicts);
    return exit_for(stage.verdicts);
}

int cmd_analyze(const RunConfig& cfg) {
    pipeline::FullRunResult result = pipeline::analyze_stored(cfg);
    const pipeline::OutputPaths paths = pipeline::make_output_paths(cfg.output_dir);
    print_counts(result.report.verdicts);
    std::cout << "wrote " << paths.report_json << "\n";
    return result.any_untestable ? 3 : 0;
}

int cmd_simulate(const RunConfig& cfg, long duration_ms) {
    sim::Scenario scenario = load_scenario_or_throw(cfg);
    sim::SimNetwork net(std::move(scenario), sim_network_config(cfg));
    if (!net.start()) throw std::runtime_error("simulated network failed to start");

    std::cout << "dns " << net.test_channel().id << " " << net.test_channel().address << "\n";
    for (const ChannelSpec& channel : net.control_channels())
        std::cout << "dns " << channel.id << " " << channel.address << "\n";
    std::cout << "relay " << net.test_vantage().id << " " << net.test_vantage().address << "\n";
    for (const net::VantageSpec& v : net.control_vantages())
        std::cout << "relay " << v.id << " " << v.address << "\n";
    std::cout << "reflector " << net.reflector_ip().to_string() << ":443 (via relays)\n";
    std::cout << net.origin_ips().size() << " origin addresses\n";
    std::cout.flush();

    std::signal(SIGINT, cenprobe_stop_signal);
    std::signal(SIGTERM, cenprobe_stop_signal);
    const auto started = std::chrono::steady_clock::now();
    while (!g_stop) {
        if (duration_ms > 0 && std::chrono::steady_clock::now() - started >=
                                   std::chrono::milliseconds(duration_ms))
            break;
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    net.stop();
    return 0;
}

int cmd_full(const RunConfig& cfg) {
    sim::Scenario scenario = load_scenario_or_throw(cfg);
    pipeline::FullRunResult result = pipeline::run_full(scenario, cfg);
    const pipeline::OutputPaths paths = pipeline::make_output_paths(cfg.output_dir);
    print_counts(result.report.verdicts);
    std::cout << "wrote " << paths.report_json << "\n";
    return result.any_untestable ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"probe-and-classify measurement of DNS, TCP, HTTP, and SNI interference"};
    app.set_version_flag("--version", cenprobe::kVersion);
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    long duration_ms = 0;
    long tcp_retry_delay_ms = cfg.tcp_retry_delay.count();
    long connect_timeout_ms = cfg.connect_timeout.count();
    long dns_timeout_ms = cfg.dns_timeout.count();
    long http_timeout_ms = cfg.http_timeout.count();

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "JSON config file; file values override flags");
        sub->add_option("-o,--out", cfg.output_dir, "output directory")
            ->capture_default_str();
        sub->add_option("--scenario", cfg.scenario_path, "scenario JSON file");
        sub->add_option("--corpus", cfg.corpus_path, "source list file");
        sub->add_option("--corpus-format", cfg.corpus_format, "plain|csv")
            ->capture_default_str();
        sub->add_option("--isp", cfg.isp, "identifier of the network under test")
            ->capture_default_str();
        sub->add_option("--signatures", cfg.signatures_path, "blockpage signature JSON file");
        sub->add_option("--bogons", cfg.bogons_path, "bogon prefix list file");
        sub->add_option("--sigma-mult", cfg.sigma_mult, "deviation multiplier")
            ->capture_default_str();
        sub->add_option("--sigma-floor-dns", cfg.sigma_floor_dns)->capture_default_str();
        sub->add_option("--sigma-floor-len", cfg.sigma_floor_len)->capture_default_str();
        sub->add_option("--sigma-floor-cos", cfg.sigma_floor_cos)->capture_default_str();
        sub->add_option("--min-dprime", cfg.min_dprime,
                        "minimum mismatching-domain sample for the MRF test")
            ->capture_default_str();
        sub->add_option("--tcp-retries", cfg.tcp_retries)->capture_default_str();
        sub->add_option("--tcp-retry-delay-ms", tcp_retry_delay_ms)->capture_default_str();
        sub->add_option("--connect-timeout-ms", connect_timeout_ms)->capture_default_str();
        sub->add_option("--dns-timeout-ms", dns_timeout_ms)->capture_default_str();
        sub->add_option("--http-timeout-ms", http_timeout_ms)->capture_default_str();
        sub->add_option("--sni-attempts", cfg.sni_attempts)->capture_default_str();
        sub->add_option("--control-resolvers", cfg.control_resolvers)->capture_default_str();
        sub->add_option("--control-vantages", cfg.control_vantages)->capture_default_str();
        sub->add_option("--max-jitter", cfg.max_jitter, "origin whitespace jitter bound")
            ->capture_default_str();
        sub->add_option("--ip-cap", cfg.ip_cap, "addresses probed per domain")
            ->capture_default_str();
        sub->add_option("--tcp-ports", cfg.tcp_ports, "ports the tcp stage probes")
            ->capture_default_str();
    };

    CLI::App* ingest = app.add_subcommand("ingest", "parse a source list into a domain corpus");
    CLI::App* probe_dns = app.add_subcommand("probe-dns", "DNS resolution probe");
    CLI::App* probe_tcp = app.add_subcommand("probe-tcp", "TCP reachability probe");
    CLI::App* probe_http = app.add_subcommand("probe-http", "HTTP fetch probe");
    CLI::App* probe_sni = app.add_subcommand("probe-sni", "TLS SNI probe");
    CLI::App* analyze = app.add_subcommand("analyze", "re-run analysis over stored records");
    CLI::App* simulate = app.add_subcommand("simulate", "run the scenario network standalone");
    CLI::App* full = app.add_subcommand("full", "probe everything and analyze");
    for (CLI::App* sub :
         {ingest, probe_dns, probe_tcp, probe_http, probe_sni, analyze, simulate, full})
        add_common(sub);
    simulate->add_option("--duration-ms", duration_ms,
                         "stop after this long (0 = run until interrupted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    cfg.tcp_retry_delay = std::chrono::milliseconds(tcp_retry_delay_ms);
    cfg.connect_timeout = std::chrono::milliseconds(connect_timeout_ms);
    cfg.dns_timeout = std::chrono::milliseconds(dns_timeout_ms);
    cfg.http_timeout = std::chrono::milliseconds(http_timeout_ms);

    const std::string sub = app.get_subcommands().front()->get_name();

    if (!config_path.empty()) {
        try {
            apply_config_file(cfg, config_path);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    apply_env(cfg);

    const std::vector<std::string> problems = validate_config(cfg, sub);
    if (!problems.empty()) {
        for (const std::string& p : problems) std::cerr << "error: " << p << "\n";
        return 1;
    }

    try {
        if (sub == "ingest") return cmd_ingest(cfg);
        if (sub == "probe-dns") return cmd_probe_dns(cfg);
        if (sub == "probe-tcp") return cmd_probe_tcp(cfg);
        if (sub == "probe-http") return cmd_probe_http(cfg);
        if (sub == "probe-sni") return cmd_probe_sni(cfg);
        if (sub == "analyze") return cmd_analyze(cfg);
        if (sub == "simulate") return cmd_simulate(cfg, duration_ms);
        if (sub == "full") return cmd_full(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: unknown subcommand " << sub << "\n";
    return 1;
}
