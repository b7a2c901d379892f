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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "carmkit/errors.hpp"
#include "carmkit/json_io.hpp"

using namespace carmkit;
using nlohmann::json;

TEST_CASE("decimal strings are strict") {
    CHECK(natural_from_decimal("561") == 561);
    CHECK(natural_from_decimal("0") == 0);
    CHECK(to_decimal(Natural("123456789012345678901234567890")) ==
          "123456789012345678901234567890");
    CHECK(natural_from_decimal(to_decimal(Natural(2) << 200)) == Natural(2) << 200);
    CHECK_THROWS_AS(natural_from_decimal(""), Error);
    CHECK_THROWS_AS(natural_from_decimal("12a"), Error);
    CHECK_THROWS_AS(natural_from_decimal("-5"), Error);
    CHECK_THROWS_AS(natural_from_decimal(" 5"), Error);
}

TEST_CASE("parse_json rejects malformed input") {
    CHECK_THROWS_AS(parse_json("{not json"), Error);
    CHECK_THROWS_AS(parse_json(""), Error);
    CHECK(parse_json("{\"a\": 1}")["a"] == 1);
}

TEST_CASE("factorization round trip and tamper rejection") {
    Factorization f = factorize(41041);
    json j = to_json(f);
    CHECK(factorization_from_json(j) == f);
    json bad = j;
    bad["value"] = "41042";
    CHECK_THROWS_AS(factorization_from_json(bad), Error);
    bad = j;
    bad["factors"][0]["prime"] = "4";  // not a prime
    CHECK_THROWS_AS(factorization_from_json(bad), Error);
    CHECK(factorization_from_json(to_json(Factorization())) == Factorization());
}

TEST_CASE("certificate round trip and tamper rejection") {
    KorseltCertificate c = korselt_check(561).certificate.value();
    json j = to_json(c);
    CHECK(certificate_from_json(j) == c);
    json bad = j;
    bad["witnesses"][0]["quotient"] = "7";
    CHECK_THROWS_AS(certificate_from_json(bad), Error);
    bad = j;
    bad["n"] = "563";
    CHECK_THROWS_AS(certificate_from_json(bad), Error);
}

TEST_CASE("pool round trips in both modes") {
    PrimePool erdos = build_pool_erdos(120);
    json j = to_json(erdos);
    CHECK(j["mode"] == "erdos");
    CHECK(pool_from_json(j) == erdos);
    json bad = j;
    bad["entries"][0]["p"] = "9";
    CHECK_THROWS_AS(pool_from_json(bad), Error);
    bad = j;
    bad["working_modulus"] = "121";
    CHECK_THROWS_AS(pool_from_json(bad), Error);

    PrimePool agp = build_pool(build_modulus(2, 3, 12), 2);
    json ja = to_json(agp);
    CHECK(ja["mode"] == "agp");
    CHECK(pool_from_json(ja) == agp);
}

TEST_CASE("construction results round trip with full re-verification") {
    TargetOmegaResult r = target_omega(4);
    json j = to_json(r);
    CHECK(target_result_from_json(j) == r);
    std::string once = dump_json(j);
    std::string twice = dump_json(parse_json(once));
    CHECK(once == twice);  // sorted keys make the dump canonical
    json bad = j;
    bad["solution"]["product"] = "41042";
    CHECK_THROWS_AS(target_result_from_json(bad), Error);
    bad = j;
    bad["solution"]["indices"][0] = 99;  // out of the pool's range
    CHECK_THROWS_AS(target_result_from_json(bad), Error);
    bad = j;
    bad["certificate"]["n"] = "561";  // certificate no longer matches the solution
    CHECK_THROWS_AS(target_result_from_json(bad), Error);
}

TEST_CASE("ladder rungs round trip") {
    for (const LadderRung& rung : default_ladder()) {
        CHECK(rung_from_json(to_json(rung)) == rung);
    }
}

TEST_CASE("uniformity reports round trip") {
    UniformityReport r = divisor_uniformity(factorize(2 * 5 * 7 * 11 * 13), {}, 3);
    json j = to_json(r);
    CHECK(uniformity_from_json(j) == r);
    json bad = j;
    bad["counts"][0] = 17;
    CHECK_THROWS_AS(uniformity_from_json(bad), Error);

    PrimePool pool = build_pool_erdos(2520);
    UniformityReport s = product_residue_sampling(pool, 10, 2000, 11, 42);
    CHECK(uniformity_from_json(to_json(s)) == s);
    // Shortest-round-trip doubles keep repeated dumps identical.
    CHECK(dump_json(to_json(s)) ==
          dump_json(to_json(product_residue_sampling(pool, 10, 2000, 11, 42))));
}

TEST_CASE("character reports round trip") {
    PrimePool pool = build_pool_erdos(120);
    CharacterReport r = char_nonconstancy(pool, factorize(5));
    json j = to_json(r);
    CHECK(characters_from_json(j) == r);
    json bad = j;
    bad["rows"][0]["order"] = 3;  // disagrees with the recorded character
    CHECK_THROWS_AS(characters_from_json(bad), Error);
}

TEST_CASE("coset reports round trip") {
    PrimePool pool = build_pool_erdos(2520);
    CosetReport r = coset_avoidance(pool, factorize(91));
    json j = to_json(r);
    CHECK(cosets_from_json(j) == r);
    json bad = j;
    bad["rows"][0]["max_fraction"] = 0.9;
    CHECK_THROWS_AS(cosets_from_json(bad), Error);
    bad = j;
    bad["rows"][0]["counts"][0] = bad["rows"][0]["counts"][0].get<std::uint64_t>() + 1;
    CHECK_THROWS_AS(cosets_from_json(bad), Error);
}

TEST_CASE("cache envelopes bind key, schema and payload") {
    json key = {{"mode", "erdos"}, {"modulus", "120"}};
    json envelope = cache_envelope(key, to_json(build_pool_erdos(120)));
    auto payload = cache_payload(envelope, key);
    REQUIRE(payload.has_value());
    CHECK(pool_from_json(*payload) == build_pool_erdos(120));

    json other_key = {{"mode", "erdos"}, {"modulus", "240"}};
    CHECK(!cache_payload(envelope, other_key).has_value());
    json stale = envelope;
    stale["schema_version"] = kSchemaVersion + 1;
    CHECK(!cache_payload(stale, key).has_value());
    // Nothing in an envelope is trusted: damage never throws, only misses.
    CHECK(!cache_payload(json::array(), key).has_value());
    CHECK(!cache_payload(json("garbage"), key).has_value());
    json hollow = envelope;
    hollow.erase("payload");
    CHECK(!cache_payload(hollow, key).has_value());
}
