#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "cenprobe/analysis.hpp"
#include "cenprobe/dns_engine.hpp"
#include "cenprobe/dns_wire.hpp"
#include "cenprobe/html_tf.hpp"
#include "cenprobe/sim/http_origin.hpp"

namespace {

using namespace cenprobe;

std::string sample_page(std::size_t paragraphs) {
    std::string html = "<!DOCTYPE html><html><head><title>t</title></head><body><h1>h</h1>";
    for (std::size_t i = 0; i < paragraphs; ++i)
        html += "<p>alpha beta gamma <a href=\"/x\">link</a> delta</p>";
    html += "<ul><li>one</li><li>two</li></ul></body></html>";
    return html;
}

void bm_html_tag_tf(benchmark::State& state) {
    const std::string page = sample_page(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(html_tag_tf(page));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * page.size()));
}
BENCHMARK(bm_html_tag_tf)->Arg(4)->Arg(64)->Arg(512);

void bm_cosine_similarity(benchmark::State& state) {
    TagTfVector a = html_tag_tf(sample_page(64));
    TagTfVector b = html_tag_tf(sample_page(65));
    for (auto _ : state) benchmark::DoNotOptimize(cosine_similarity(a, b));
}
BENCHMARK(bm_cosine_similarity);

std::vector<DnsOutcome> synthetic_outcomes(std::size_t n) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::uint32_t> dist(0x0B000001, 0x0B0003FF);
    std::vector<DnsOutcome> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(DnsOutcome::answers({Ipv4(dist(rng))}));
    return out;
}

void bm_compute_mrf(benchmark::State& state) {
    const auto outcomes = synthetic_outcomes(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(compute_mrf("bench", outcomes));
}
BENCHMARK(bm_compute_mrf)->Arg(100)->Arg(1000)->Arg(10000);

void bm_jaccard(benchmark::State& state) {
    std::set<std::string> a, b;
    for (int i = 0; i < state.range(0); ++i) {
        a.insert("domain" + std::to_string(i) + ".example");
        b.insert("domain" + std::to_string(i + state.range(0) / 2) + ".example");
    }
    for (auto _ : state) benchmark::DoNotOptimize(jaccard(a, b));
}
BENCHMARK(bm_jaccard)->Arg(100)->Arg(1000);

void bm_dns_encode_query(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(dns::wire::encode_query(0x1234, "www.example.org"));
}
BENCHMARK(bm_dns_encode_query);

void bm_dns_parse_response(benchmark::State& state) {
    dns::wire::Question q;
    q.id = 0x1234;
    q.qname = "www.example.org";
    q.qtype = 1;
    q.qclass = 1;
    std::vector<dns::wire::AnswerRecord> answers;
    for (int i = 0; i < 4; ++i)
        answers.push_back({q.qname, Ipv4(0x0B000001u + static_cast<std::uint32_t>(i)), 60});
    const std::string wire = dns::wire::encode_response(q, answers, 0);
    for (auto _ : state) benchmark::DoNotOptimize(dns::wire::parse_response(wire));
}
BENCHMARK(bm_dns_parse_response);

void bm_origin_body(benchmark::State& state) {
    std::uint64_t i = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            sim::generate_origin_body("site" + std::to_string(i++ % 512) + ".example", 42));
}
BENCHMARK(bm_origin_body);

}  // namespace

BENCHMARK_MAIN();
