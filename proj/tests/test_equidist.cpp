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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "carmkit/construct.hpp"
#include "carmkit/equidist.hpp"
#include "carmkit/errors.hpp"

using namespace carmkit;

TEST_CASE("divisor residue counts match a direct subset enumeration") {
    // All 2^8 divisors of a square-free L, classified mod 3 by hand.
    std::vector<std::uint64_t> primes = {2, 3, 5, 7, 11, 13, 17, 19};
    std::uint64_t L = 1;
    for (std::uint64_t p : primes) L *= p;
    std::map<std::uint64_t, std::uint64_t> expect;
    std::uint64_t units = 0;
    for (std::uint64_t mask = 0; mask < 256; ++mask) {
        std::uint64_t d = 1;
        for (std::size_t i = 0; i < primes.size(); ++i) {
            if (mask & (std::uint64_t{1} << i)) d = d * primes[i] % 3;
        }
        if (d != 0) {
            ++expect[d];
            ++units;
        }
    }
    UniformityReport r = divisor_uniformity(factorize(L), {}, 3);
    r.validate();
    REQUIRE(r.classes == std::vector<Natural>{1, 2});
    CHECK(r.sample_size == units);
    CHECK(r.counts[0] == expect[1]);
    CHECK(r.counts[1] == expect[2]);
    CHECK(r.note.find("divisors outside unit classes: 128") != std::string::npos);
}

TEST_CASE("divisor uniformity over small moduli") {
    // Odd L: every divisor is odd, a single class mod 2.
    UniformityReport odd = divisor_uniformity(factorize(3 * 5 * 7 * 11 * 13), {}, 2);
    odd.validate();
    REQUIRE(odd.classes.size() == 1);
    CHECK(odd.classes[0] == 1);
    CHECK(odd.sample_size == 32);
    CHECK(odd.counts[0] == 32);
    CHECK(odd.max_rel_deviation == 0.0);
    CHECK(odd.chi_square == 0.0);

    // 2, 5, 11 are 2 mod 3; 7, 13 are 1 mod 3: the 32 divisors split evenly.
    UniformityReport even = divisor_uniformity(factorize(2 * 5 * 7 * 11 * 13), {}, 3);
    even.validate();
    REQUIRE(even.classes.size() == 2);
    CHECK(even.counts[0] == 16);
    CHECK(even.counts[1] == 16);
    CHECK(even.chi_square == 0.0);

    // m | L: multiples of 3 fall outside the unit classes and are noted.
    UniformityReport skip = divisor_uniformity(factorize(3 * 5 * 7), {}, 3);
    skip.validate();
    CHECK(skip.sample_size == 4);  // 1, 5, 7, 35
    CHECK(skip.note.find("divisors outside unit classes: 4") != std::string::npos);

    // L = 1 has the single divisor 1.
    UniformityReport one = divisor_uniformity(Factorization(), {}, 7);
    one.validate();
    CHECK(one.sample_size == 1);
    CHECK(one.counts[0] == 1);

    // Restricting to divisors with exactly 2 prime factors: 15, 21, 35.
    UniformityReport pairs = divisor_uniformity(factorize(105), 2, 2);
    pairs.validate();
    CHECK(pairs.sample_size == 3);
}

TEST_CASE("uniformity reports reject stale or inconsistent fields") {
    UniformityReport r = divisor_uniformity(factorize(2 * 5 * 7 * 11 * 13), {}, 3);
    CHECK_NOTHROW(r.validate());
    UniformityReport bad = r;
    bad.counts[0] += 1;
    CHECK_THROWS_AS(bad.validate(), Error);  // counts no longer sum to sample size
    bad = r;
    bad.chi_square += 0.5;
    CHECK_THROWS_AS(bad.validate(), Error);  // stale statistics
    bad = r;
    bad.classes = {Natural(2), Natural(1)};
    CHECK_THROWS_AS(bad.validate(), Error);  // classes must ascend
    bad = r;
    bad.classes[0] = 0;
    CHECK_THROWS_AS(bad.validate(), Error);  // classes must be units
}

TEST_CASE("character nonconstancy across a pool") {
    PrimePool pool = build_pool_erdos(120);
    CharacterReport cr = char_nonconstancy(pool, factorize(5));
    CHECK(cr.units == 6);   // all six pool primes are units mod 5
    CHECK(cr.skipped == 0);
    REQUIRE(cr.rows.size() == 3);  // the non-principal characters of U(5)
    // U(5) is cyclic of order 4: two order-4 characters and one order-2.
    CHECK(cr.rows[0].order + cr.rows[1].order + cr.rows[2].order == 10);
    for (const auto& row : cr.rows) {
        CHECK(row.min_disagreement == 2);
        // Threshold units/log(largest prime) = 6/log(61).
        CHECK(row.threshold == doctest::Approx(6.0 / std::log(61.0)));
        CHECK(static_cast<double>(row.min_disagreement) > row.threshold);
    }

    // A one-prime pool cannot witness nonconstancy.
    PrimePool lone(Natural(4), {{Natural(2), Natural(3)}}, {}, {});
    CharacterReport single = char_nonconstancy(lone, factorize(5));
    CHECK(single.units == 1);
    for (const auto& row : single.rows) CHECK(row.min_disagreement == 0);

    // Pool primes dividing L are skipped: erdos(2520) contains 11.
    CharacterReport skip = char_nonconstancy(build_pool_erdos(2520), factorize(11));
    CHECK(skip.skipped == 1);
    CHECK(skip.units == 17);
}

TEST_CASE("product residue sampling is seeded and deterministic") {
    PrimePool pool = build_pool_erdos(2520);
    UniformityReport a = product_residue_sampling(pool, 10, 10000, 11, 42);
    UniformityReport b = product_residue_sampling(pool, 10, 10000, 11, 42);
    a.validate();
    CHECK(a.seed == 42);
    CHECK(a.sample_size == 10000);
    CHECK(a.classes.size() == 10);
    CHECK(a.expected == 1000.0);
    CHECK(a.counts == b.counts);
    CHECK(a.chi_square == b.chi_square);
    CHECK(a.chi_square == doctest::Approx(3.402).epsilon(0.01));
    CHECK(a.max_rel_deviation == doctest::Approx(0.034).epsilon(0.05));
    // 11 itself is an entry of erdos(2520) and must have been set aside.
    CHECK(a.note.find("excluded entries: 1") != std::string::npos);

    UniformityReport c = product_residue_sampling(pool, 10, 10000, 11, 43);
    CHECK(c.counts != a.counts);  // a different seed gives a different stream
}

TEST_CASE("degenerate sampling pools") {
    PrimePool pool = build_pool_erdos(120);
    // Exactly t usable entries: every draw is the same product.
    UniformityReport r = product_residue_sampling(pool, 6, 500, 23, 9);
    r.validate();
    CHECK(r.sample_size == 500);
    std::uint64_t nonzero = 0;
    for (std::uint64_t c : r.counts) nonzero += (c > 0);
    CHECK(nonzero == 1);
    // One entry short of t.
    CHECK_THROWS_AS(product_residue_sampling(pool, 7, 10, 23, 0), PoolTooSmall);
}

TEST_CASE("coset avoidance by odd character orders") {
    // U(15) has exponent 4: no odd-order characters, nothing to report.
    PrimePool pool120 = build_pool_erdos(120);
    CHECK(coset_avoidance(pool120, factorize(15)).rows.empty());

    // U(91) has order-3 characters; the pool prime 13 divides 91.
    PrimePool pool = build_pool_erdos(2520);
    CosetReport r = coset_avoidance(pool, factorize(91));
    CHECK(r.units == 17);
    CHECK(r.skipped == 1);
    REQUIRE(r.rows.size() == 8);
    std::map<std::uint64_t, int> fraction_numerators;
    for (const auto& row : r.rows) {
        CHECK(row.ell == 3);
        REQUIRE(row.counts.size() == 3);
        std::uint64_t sum = 0, top = 0;
        for (std::uint64_t c : row.counts) {
            sum += c;
            top = std::max(top, c);
        }
        CHECK(sum == r.units);
        CHECK(row.max_fraction == static_cast<double>(top) / static_cast<double>(r.units));
        CHECK(row.majority == (row.max_fraction > r.majority_threshold));
        ++fraction_numerators[top];
    }
    // Frozen distribution of the dominating coset sizes over the 8 rows.
    CHECK(fraction_numerators[6] == 2);
    CHECK(fraction_numerators[11] == 2);  // the two majority rows
    CHECK(fraction_numerators[8] == 2);
    CHECK(fraction_numerators[7] == 2);
    int majorities = 0;
    for (const auto& row : r.rows) majorities += row.majority;
    CHECK(majorities == 2);

    // A single-prime pool concentrates in one coset trivially.
    PrimePool lone(Natural(4), {{Natural(2), Natural(3)}}, {}, {});
    CosetReport single = coset_avoidance(lone, factorize(7));
    REQUIRE(!single.rows.empty());
    for (const auto& row : single.rows) {
        CHECK(row.majority);
        CHECK(row.max_fraction == 1.0);
    }
}
