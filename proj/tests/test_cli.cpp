#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "modshadow/cli.hpp"
#include "modshadow/config.hpp"
#include "modshadow/errors.hpp"

using namespace modshadow;

namespace {

struct CaptureOut {
    std::ostringstream captured;
    std::streambuf* old;
    CaptureOut() : old(std::cout.rdbuf(captured.rdbuf())) {}
    ~CaptureOut() { std::cout.rdbuf(old); }
    std::string str() const { return captured.str(); }
};

std::string temp_path(const std::string& name) { return "/tmp/modshadow_test_" + name; }

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("load_config: defaults, values, comments, errors") {
    std::string p = temp_path("empty.cfg");
    write_file(p, "");
    RunConfig cfg = load_config(p);
    CHECK(cfg.epsilon == 0.2);  // all defaults
    CHECK_FALSE(cfg.seed.has_value());

    write_file(p, "# comment line\nepsilon = 0.1\nseed = 42  # trailing comment\n\n");
    cfg = load_config(p);
    CHECK(cfg.epsilon == 0.1);
    REQUIRE(cfg.seed.has_value());
    CHECK(*cfg.seed == 42);

    write_file(p, "epsilon = 0.1\nnot_a_key = 3\n");
    CHECK_THROWS_WITH_AS(load_config(p), "unknown config key 'not_a_key' at line 2",
                         ConfigError);

    write_file(p, "epsilon 0.1\n");
    CHECK_THROWS_AS(load_config(p), ConfigError);

    write_file(p, "epsilon = abc\n");
    try {
        load_config(p);
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("cli: usage errors exit 1") {
    CaptureOut cap;
    CHECK(cli_main({"spectrum", "--no-such-flag"}) == 1);
    CHECK(cli_main({"nonsense-subcommand"}) == 1);
    // Invalid config value surfaces as a usage error.
    std::string p = temp_path("bad.cfg");
    write_file(p, "epsilon = -1\n");
    CHECK(cli_main({"--config", p, "spectrum", "--trace-max", "4"}) == 1);
}

TEST_CASE("cli: spectrum prints the length spectrum CSV") {
    CaptureOut cap;
    int rc = cli_main({"spectrum", "--trace-max", "6"});
    CHECK(rc == 0);
    std::string out = cap.str();
    CHECK(out.find("trace,word,length\n3,RL,1.92484730023841") != std::string::npos);
}

TEST_CASE("cli: verify-lemma reports the bound and exits 0") {
    CaptureOut cap;
    std::string jsonl = temp_path("lemma.jsonl");
    std::string csv = temp_path("lemma.csv");
    int rc = cli_main({"verify-lemma", "--trials", "1000", "--t0", "2", "--lambda-exp", "1",
                       "--out", jsonl, "--csv", csv});
    CHECK(rc == 0);
    CHECK(cap.str().find("K = 2.58197670686932") != std::string::npos);
    std::string rec = read_file(jsonl);
    CHECK(rec.find("\"schema_version\":1") != std::string::npos);
    CHECK(rec.find("\"config_digest\":") != std::string::npos);
    CHECK(read_file(csv).find("verify-lemma,max_p,") != std::string::npos);
}

TEST_CASE("cli: config file values are overridden by flags") {
    std::string p = temp_path("prec.cfg");
    write_file(p, "trace_max = 4\n");
    {
        CaptureOut cap;
        CHECK(cli_main({"--config", p, "spectrum"}) == 0);
        CHECK(cap.str().find("4,RRL") != std::string::npos);
        CHECK(cap.str().find("5,") == std::string::npos);
    }
    {
        CaptureOut cap;
        CHECK(cli_main({"--config", p, "spectrum", "--trace-max", "5"}) == 0);
        CHECK(cap.str().find("5,RRRL") != std::string::npos);
    }
}

TEST_CASE("cli: periodic then replay roundtrip; tampering exits 2") {
    std::string jsonl = temp_path("periodic.jsonl");
    std::string csv = temp_path("periodic.csv");
    {
        CaptureOut cap;
        int rc = cli_main({"periodic", "--out", jsonl, "--csv", csv});
        CHECK(rc == 0);
        CHECK(cap.str().find("T = 1.92484730023841") != std::string::npos);
    }
    {
        CaptureOut cap;
        CHECK(cli_main({"--replay", jsonl}) == 0);
        CHECK(cap.str().find("1 records re-verified") != std::string::npos);
    }
    // Corrupt the period.
    std::string body = read_file(jsonl);
    auto pos = body.find("\"T\":");
    REQUIRE(pos != std::string::npos);
    body.replace(pos, 8, "\"T\":2.01");
    std::string bad = temp_path("periodic_bad.jsonl");
    write_file(bad, body);
    {
        CaptureOut cap;
        CHECK(cli_main({"--replay", bad}) == 2);
    }
}

TEST_CASE("cli: small density run writes records and a summary") {
    std::string jsonl = temp_path("density.jsonl");
    std::string csv = temp_path("density.csv");
    CaptureOut cap;
    int rc = cli_main({"density", "--epsilon", "0.2", "--im-hi", "2", "--samples", "6",
                       "--seed", "7", "--out", jsonl, "--csv", csv});
    CHECK(rc == 0);
    std::string recs = read_file(jsonl);
    CHECK(recs.find("\"subcommand\":\"density\"") != std::string::npos);
    CHECK(recs.find("\"gamma\":[") != std::string::npos);
    CHECK(recs.find("\"seed\":7") != std::string::npos);
    std::string s = read_file(csv);
    CHECK(s.find("subcommand,seed,epsilon,samples,successes,coverage") != std::string::npos);
    CHECK(s.find("density,7,") != std::string::npos);
    // Density requires a seed.
    CHECK(cli_main({"density", "--samples", "2"}) == 1);
    // Replay the emitted orbits.
    CHECK(cli_main({"--replay", jsonl}) == 0);
}

TEST_CASE("cli: MODSHADOW_THREADS must be a positive integer") {
    setenv("MODSHADOW_THREADS", "0", 1);
    RunConfig cfg;
    CHECK_THROWS_AS(effective_threads(cfg), ConfigError);
    setenv("MODSHADOW_THREADS", "2", 1);
    cfg.threads = 8;
    CHECK(effective_threads(cfg) == 2);
    unsetenv("MODSHADOW_THREADS");
    CHECK(effective_threads(cfg) == 8);
}

TEST_CASE("cli: verify-anosov exits by the certified ratio") {
    CaptureOut cap;
    int rc = cli_main({"verify-anosov", "--samples", "200", "--im-hi", "3", "--seed", "3",
                       "--out", temp_path("anosov.jsonl"), "--csv", temp_path("anosov.csv")});
    CHECK(rc == 0);
    CHECK(cap.str().find("max normalized ratio") != std::string::npos);
}
