#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

std::string g_binary;
fs::path g_work;

int run_cli(const std::string& args, const std::string& env_prefix = "") {
    std::string cmd;
    if (!env_prefix.empty()) cmd += env_prefix + " ";
    cmd += "\"" + g_binary + "\" " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

fs::path case_dir(const std::string& name) {
    fs::path dir = g_work / name;
    fs::create_directories(dir);
    return dir;
}

const char* kScenario = R"({
  "seed": 7,
  "origins": {
    "alpha.example": {},
    "beta.example": {},
    "gamma.example": {},
    "blocked.example": {}
  },
  "dns_rules": {"blocked.example": {"action": "nxdomain"}},
  "http_rules": {"beta.example": {"action": "blockpage"}},
  "sni_blocklist": ["gamma.example"],
  "tcp_rules": {}
})";

const char* kFastFlags =
    " --tcp-retry-delay-ms 50 --connect-timeout-ms 3000"
    " --dns-timeout-ms 3000 --http-timeout-ms 3000";

std::string scenario_path(const fs::path& dir) {
    fs::path p = dir / "scenario.json";
    write_file(p, kScenario);
    return p.string();
}

}  // namespace

TEST_CASE("--version exits zero") { CHECK(run_cli("--version") == 0); }

TEST_CASE("bad invocations exit with the config-error code") {
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("probe-dns") == 1);  // no scenario
    CHECK(run_cli("full --scenario nowhere.json --control-resolvers 1") == 1);
    CHECK(run_cli("ingest") == 1);  // no corpus
}

TEST_CASE("analyze with no stored records is a runtime error") {
    fs::path dir = case_dir("analyze_empty");
    CHECK(run_cli("analyze -o \"" + (dir / "out").string() + "\"") == 2);
}

TEST_CASE("full run writes the whole artifact set") {
    fs::path dir = case_dir("full");
    fs::path out = dir / "out";
    int rc = run_cli("full --scenario \"" + scenario_path(dir) + "\" -o \"" + out.string() +
                     "\"" + kFastFlags);
    CHECK(rc == 0);

    for (const char* name : {"dns.jsonl", "tcp.jsonl", "http.jsonl", "sni.jsonl",
                             "verdicts.jsonl", "verdicts.csv", "report.json", "summary.csv",
                             "ip_frequency.csv"}) {
        INFO(name);
        CHECK(fs::exists(out / name));
    }

    CHECK(slurp(out / "summary.csv") ==
          "isp,technique,censored_count,untestable_count\n"
          "test,dns,1,0\n"
          "test,tcp,0,0\n"
          "test,http,1,0\n"
          "test,sni,1,0\n");

    std::string report = slurp(out / "report.json");
    CHECK(report.find("\"schema_version\"") != std::string::npos);
    CHECK(report.find("blocked.example") != std::string::npos);
    CHECK(slurp(out / "verdicts.jsonl").find("\"sni_handshake\"") != std::string::npos);
}

TEST_CASE("rerun and replay render byte-identical reports") {
    fs::path dir = case_dir("determinism");
    std::string scen = scenario_path(dir);
    fs::path a = dir / "a";
    fs::path b = dir / "b";
    REQUIRE(run_cli("full --scenario \"" + scen + "\" -o \"" + a.string() + "\"" + kFastFlags) ==
            0);
    REQUIRE(run_cli("full --scenario \"" + scen + "\" -o \"" + b.string() + "\"" + kFastFlags) ==
            0);
    const std::string first = slurp(a / "report.json");
    CHECK(first == slurp(b / "report.json"));
    CHECK(slurp(a / "verdicts.jsonl") == slurp(b / "verdicts.jsonl"));

    // analyze re-derives the report from the stored records, byte for byte
    REQUIRE(run_cli("analyze -o \"" + a.string() + "\"") == 0);
    CHECK(slurp(a / "report.json") == first);
}

TEST_CASE("CENPROBE_OUT overrides the output flag") {
    fs::path dir = case_dir("env_out");
    fs::path flag_dir = dir / "by_flag";
    fs::path env_dir = dir / "by_env";
    int rc = run_cli("full --scenario \"" + scenario_path(dir) + "\" -o \"" +
                         flag_dir.string() + "\"" + kFastFlags,
                     "CENPROBE_OUT=\"" + env_dir.string() + "\"");
    CHECK(rc == 0);
    CHECK(fs::exists(env_dir / "report.json"));
    CHECK(!fs::exists(flag_dir / "report.json"));
}

TEST_CASE("config file values override flags") {
    fs::path dir = case_dir("config_file");
    std::string scen = scenario_path(dir);
    fs::path cfg = dir / "fix.json";
    write_file(cfg, "{\"control_resolvers\": 2}\n");

    std::string base = "probe-dns --scenario \"" + scen + "\" --control-resolvers 1 -o \"" +
                       (dir / "out").string() + "\"" + kFastFlags;
    CHECK(run_cli(base) == 1);  // rejected by validation
    CHECK(run_cli(base + " --config \"" + cfg.string() + "\"") == 0);
}

TEST_CASE("ingest writes the corpus artifacts") {
    fs::path dir = case_dir("ingest");
    fs::path corpus = dir / "list.txt";
    write_file(corpus,
               "# seed list\n"
               "https://x.example.com/a\n"
               "http://x.example.com/b\n"
               "https://y.example.org/\n"
               "192.0.2.9\n");
    fs::path out = dir / "out";
    CHECK(run_cli("ingest --corpus \"" + corpus.string() + "\" -o \"" + out.string() + "\"") ==
          0);
    CHECK(slurp(out / "domains.txt") == "x.example.com\ny.example.org\n");
    CHECK(slurp(out / "sources.json").find("\"x.example.com\"") != std::string::npos);
}

int main(int argc, char** argv) {
    if (argc < 2 || argv[1][0] == '-') {
        std::fprintf(stderr, "usage: cli_test <path-to-cenprobe> [doctest options]\n");
        return 64;
    }
    g_binary = fs::absolute(argv[1]).string();
    if (!fs::exists(g_binary)) {
        std::fprintf(stderr, "cli_test: no binary at %s\n", g_binary.c_str());
        return 64;
    }
    g_work = fs::temp_directory_path() / "cenprobe_cli_test";
    std::error_code ec;
    fs::remove_all(g_work, ec);
    fs::create_directories(g_work);

    doctest::Context ctx;
    std::vector<char*> args;
    args.push_back(argv[0]);
    for (int i = 2; i < argc; ++i) args.push_back(argv[i]);
    ctx.applyCommandLine(static_cast<int>(args.size()), args.data());
    return ctx.run();
}
