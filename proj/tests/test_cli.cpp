// Copyright 2026 The carmkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the installed command-line binary (path in argv[1]) end to end:
// exit-code contract, output formats, cache behavior, configuration
// layering and byte-level determinism.

#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "carmkit/construct.hpp"
#include "carmkit/json_io.hpp"

using namespace carmkit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_dir;

struct RunResult {
    int code = -1;
    std::string out;
};

// Runs the binary with the given arguments, optionally under environment
// assignments ("VAR=value ..."). stderr is discarded; tests that care about
// diagnostics assert on the exit code instead.
RunResult run_cli(const std::string& args, const std::string& env = "") {
    std::string cmd = env.empty() ? "" : env + " ";
    cmd += "'" + g_cli + "' " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
    REQUIRE(out.good());
}

}  // namespace

TEST_CASE("exit codes separate success, domain, usage and budget") {
    CHECK(run_cli("verify 561").code == 0);
    RunResult domain = run_cli("verify 9");
    CHECK(domain.code == 1);
    CHECK(parse_json(domain.out)["reason"] == "NotSquarefree");
    CHECK(run_cli("verify abc").code == 2);
    CHECK(run_cli("frobnicate 5").code == 2);
    CHECK(run_cli("verify").code == 2);
    RunResult budget = run_cli("construct --pool erdos:2520 --size 3 --budget 3");
    CHECK(budget.code == 3);
    CHECK(parse_json(budget.out)["error"] == "budget");
    // An oversized group is a refusal to spend, not a wrong answer.
    CHECK(run_cli("davenport --group 1000,1000").code == 3);
}

TEST_CASE("verify emits a certificate the library accepts verbatim") {
    RunResult r = run_cli("verify 561");
    REQUIRE(r.code == 0);
    KorseltCertificate cert = certificate_from_json(parse_json(r.out));
    CHECK(cert == korselt_check(561).certificate.value());
}

TEST_CASE("verify table output is stable") {
    const std::string golden =
        "561 = 3 * 11 * 17 is a Carmichael number\n"
        "prime  quotient\n"
        "3      280\n"
        "11     56\n"
        "17     35\n";
    CHECK(run_cli("--format table verify 561").out == golden);
    // Global flags also bind after the subcommand name.
    CHECK(run_cli("verify 561 --format table").out == golden);
}

TEST_CASE("enumerate yields the three classical examples below 2000") {
    RunResult r = run_cli("enumerate --limit 2000");
    REQUIRE(r.code == 0);
    json j = parse_json(r.out);
    CHECK(j["count"] == 3);
    REQUIRE(j["certificates"].size() == 3);
    CHECK(j["certificates"][0]["n"] == "561");
    CHECK(j["certificates"][1]["n"] == "1105");
    CHECK(j["certificates"][2]["n"] == "1729");

    const std::string csv =
        "n,omega,factors\n"
        "561,3,3 * 11 * 17\n"
        "1105,3,5 * 13 * 17\n"
        "1729,3,7 * 13 * 19\n";
    CHECK(run_cli("--format csv enumerate --limit 2000").out == csv);
}

TEST_CASE("davenport reports exact values for tiny groups") {
    RunResult r = run_cli("davenport --group 2,2");
    REQUIRE(r.code == 0);
    CHECK(parse_json(r.out)["exact"] == 3);
}

TEST_CASE("construct certifies its solutions and reports dry holes") {
    RunResult hit = run_cli("construct --pool erdos:120 --size 4");
    REQUIRE(hit.code == 0);
    json j = parse_json(hit.out);
    CHECK(j["certificate"]["n"] == "41041");
    CHECK_NOTHROW(certificate_from_json(j["certificate"]));

    RunResult miss = run_cli("construct --pool erdos:120 --size 3");
    CHECK(miss.code == 1);
    json m = parse_json(miss.out);
    CHECK(m["solution"].is_null());
    CHECK(m["reason"] == "NoSolution");
}

TEST_CASE("pool output round-trips through the library") {
    RunResult r = run_cli("pool --M 120 --no-cache");
    REQUIRE(r.code == 0);
    CHECK(pool_from_json(parse_json(r.out)) == build_pool_erdos(120));

    RunResult agp = run_cli("pool --mode agp --L 21 --kmax 2 --no-cache");
    REQUIRE(agp.code == 0);
    CHECK(pool_from_json(parse_json(agp.out)) == build_pool(factorize(21), 2));
}

TEST_CASE("pool cache hits, survives corruption and garbage") {
    fs::path cache = g_dir / "cache";
    fs::remove_all(cache);
    std::string flags = "--cache-dir '" + cache.string() + "' pool --M 120";
    RunResult first = run_cli(flags);
    REQUIRE(first.code == 0);
    std::size_t files = 0;
    fs::path cache_file;
    for (const auto& entry : fs::directory_iterator(cache)) {
        ++files;
        cache_file = entry.path();
    }
    CHECK(files == 1);

    RunResult second = run_cli(flags);
    CHECK(second.out == first.out);  // cache hit, byte-identical

    write_file(cache_file, "garbage");
    RunResult rebuilt = run_cli(flags);
    CHECK(rebuilt.code == 0);
    CHECK(rebuilt.out == first.out);  // silent rebuild

    write_file(cache_file, "{\"schema_version\": 999}");
    CHECK(run_cli(flags).out == first.out);

    // The environment variable names the same cache directory.
    RunResult via_env = run_cli("pool --M 120", "CARMKIT_CACHE_DIR='" + cache.string() + "'");
    CHECK(via_env.out == first.out);
}

TEST_CASE("configuration layers: file beats defaults, flags beat environment") {
    fs::path a = g_dir / "limit2000.conf";
    fs::path b = g_dir / "limit600.conf";
    write_file(a, "# comment\noracle_limit = 2000\n");
    write_file(b, "oracle_limit = 600\n");

    RunResult via_flag = run_cli("--config '" + a.string() + "' enumerate");
    REQUIRE(via_flag.code == 0);
    CHECK(parse_json(via_flag.out)["count"] == 3);

    RunResult via_env = run_cli("enumerate", "CARMKIT_CONFIG='" + a.string() + "'");
    CHECK(parse_json(via_env.out)["count"] == 3);

    RunResult flag_wins =
        run_cli("--config '" + b.string() + "' enumerate", "CARMKIT_CONFIG='" + a.string() + "'");
    CHECK(parse_json(flag_wins.out)["count"] == 1);  // only 561 <= 600

    fs::path bad = g_dir / "bad.conf";
    write_file(bad, "orcale_limit = 2000\n");  // misspelled key
    CHECK(run_cli("--config '" + bad.string() + "' enumerate").code == 2);
    CHECK(run_cli("--config '" + (g_dir / "missing.conf").string() + "' enumerate").code == 2);
}

TEST_CASE("ladder files: plain moduli and structured rungs") {
    fs::path plain = g_dir / "ladder.txt";
    write_file(plain, "80\n");
    RunResult pinned = run_cli("target-omega --R 3 --require-pinned --ladder '" +
                               plain.string() + "'");
    REQUIRE(pinned.code == 0);
    json pj = parse_json(pinned.out);
    CHECK(pj["certificate"]["n"] == "561");
    CHECK(pj["used_pinned_path"] == true);

    fs::path multi = g_dir / "ladder3.txt";
    write_file(multi, "80 120 240\n");
    RunResult r4 = run_cli("target-omega --R 4 --ladder '" + multi.string() + "'");
    CHECK(parse_json(r4.out)["certificate"]["n"] == "41041");

    // JSON arrays may mix bare numbers, decimal strings and full rung
    // objects as serialized by the library.
    LadderRung rung;
    rung.M = 240;
    json arr = json::array({80, "120", to_json(rung)});
    fs::path structured = g_dir / "ladder.json";
    write_file(structured, dump_json(arr));
    RunResult r5 = run_cli("target-omega --R 5 --ladder '" + structured.string() + "'");
    CHECK(parse_json(r5.out)["certificate"]["n"] == "9890881");

    fs::path empty = g_dir / "empty.txt";
    write_file(empty, "\n");
    CHECK(run_cli("target-omega --R 3 --ladder '" + empty.string() + "'").code == 2);
}

TEST_CASE("an exhausted ladder is a domain failure naming the rungs") {
    fs::path plain = g_dir / "ladder80.txt";
    write_file(plain, "80\n");
    RunResult r = run_cli("target-omega --R 7 --ladder '" + plain.string() + "'");
    CHECK(r.code == 1);
    json j = parse_json(r.out);
    CHECK(j["error"] == "domain");
    CHECK(j["detail"].get<std::string>().find("M=80") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical") {
    std::string to = "target-omega --R 4";
    CHECK(run_cli(to).out == run_cli(to).out);
    std::string eq = "--seed 42 equidist --report products --pool erdos:2520 --kp 11 "
                     "--t 10 --samples 2000";
    std::string once = run_cli(eq).out;
    CHECK(once == run_cli(eq).out);
    std::string other = run_cli("--seed 43 equidist --report products --pool erdos:2520 "
                                "--kp 11 --t 10 --samples 2000").out;
    CHECK(once != other);  // the seed is honored
    CHECK(uniformity_from_json(parse_json(once)) ==
          product_residue_sampling(build_pool_erdos(2520), 10, 2000, 11, 42));
}

TEST_CASE("equidist reports flow through the command line") {
    RunResult uni = run_cli("equidist --report uniformity --L 10010 --m 3");
    REQUIRE(uni.code == 0);
    CHECK(uniformity_from_json(parse_json(uni.out)) ==
          divisor_uniformity(factorize(10010), {}, 3));

    RunResult chars = run_cli("equidist --report chars --pool erdos:120 --kp 5");
    REQUIRE(chars.code == 0);
    CHECK(characters_from_json(parse_json(chars.out)) ==
          char_nonconstancy(build_pool_erdos(120), factorize(5)));

    RunResult cosets = run_cli("equidist --report cosets --pool erdos:2520 --kp 91");
    REQUIRE(cosets.code == 0);
    CHECK(cosets_from_json(parse_json(cosets.out)) ==
          coset_avoidance(build_pool_erdos(2520), factorize(91)));

    CHECK(run_cli("equidist --report bogus --L 10").code == 2);
}

int run_all(int argc, char** argv) {
    doctest::Context ctx;
    ctx.applyCommandLine(argc, argv);
    return ctx.run();
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <cli-binary> [doctest options]\n", argv[0]);
        return 2;
    }
    g_cli = fs::absolute(argv[1]).string();
    g_dir = fs::temp_directory_path() /
            ("carmkit-cli-test-" + std::to_string(static_cast<unsigned>(getpid())));
    fs::create_directories(g_dir);
    // argv[1] is consumed here; doctest sees the remaining flags.
    int rc = run_all(argc - 1, argv + 1);
    fs::remove_all(g_dir);
    return rc;
}
