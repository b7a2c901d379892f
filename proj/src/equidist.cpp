// Copyright 2026 The carmkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "carmkit/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <utility>

#include "carmkit/errors.hpp"

namespace carmkit {

namespace {

Natural gcd_nat(const Natural& a, const Natural& b) {
    return boost::multiprecision::gcd(a, b);
}

/// Unit class representatives 1 <= a < m, gcd(a, m) = 1, ascending.
std::vector<Natural> unit_classes(const Natural& m) {
    if (m < 2) throw Error("unit_classes: modulus must be >= 2");
    if (m > 1'000'000) throw LimitExceeded("unit_classes: class table too large");
    std::vector<Natural> classes;
    for (Natural a = 1; a < m; ++a) {
        if (gcd_nat(a, m) == 1) classes.push_back(a);
    }
    return classes;
}

/// Derived statistics shared by every report: expected count per class,
/// max relative deviation, Pearson chi-square.
struct Stats {
    double expected = 0.0;
    double max_rel_deviation = 0.0;
    double chi_square = 0.0;
};

Stats stats_from_counts(const std::vector<std::uint64_t>& counts, std::uint64_t sample_size) {
    Stats s;
    if (counts.empty() || sample_size == 0) return s;
    s.expected = static_cast<double>(sample_size) / static_cast<double>(counts.size());
    for (std::uint64_t c : counts) {
        const double diff = static_cast<double>(c) - s.expected;
        s.max_rel_deviation = std::max(s.max_rel_deviation, std::abs(diff) / s.expected);
        s.chi_square += diff * diff / s.expected;
    }
    return s;
}

UniformityReport finish_report(Natural modulus, std::vector<Natural> classes,
                               std::vector<std::uint64_t> counts, std::uint64_t seed,
                               std::string note) {
    UniformityReport r;
    r.modulus = std::move(modulus);
    r.classes = std::move(classes);
    r.counts = std::move(counts);
    for (std::uint64_t c : r.counts) r.sample_size += c;
    const Stats s = stats_from_counts(r.counts, r.sample_size);
    r.expected = s.expected;
    r.max_rel_deviation = s.max_rel_deviation;
    r.chi_square = s.chi_square;
    r.seed = seed;
    r.note = std::move(note);
    return r;
}

}  // namespace

void UniformityReport::validate() const {
    if (classes.size() != counts.size()) {
        throw Error("UniformityReport: class/count length mismatch");
    }
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    if (total != sample_size) throw Error("UniformityReport: counts do not sum to sample size");
    const Stats s = stats_from_counts(counts, sample_size);
    if (expected != s.expected || max_rel_deviation != s.max_rel_deviation ||
        chi_square != s.chi_square) {
        throw Error("UniformityReport: stale derived statistics");
    }
    Natural prev = 0;
    for (const Natural& a : classes) {
        if (a <= prev || a >= modulus || gcd_nat(a, modulus) != 1) {
            throw Error("UniformityReport: classes must be ascending units");
        }
        prev = a;
    }
}

UniformityReport divisor_uniformity(const Factorization& L, std::optional<unsigned> w,
                                    const Natural& m, std::uint64_t divisor_budget) {
    std::vector<Natural> ds;
    try {
        ds = divisors(L, w, divisor_budget);
    } catch (const LimitExceeded& e) {
        throw BudgetExceeded(std::string("divisor_uniformity: ") + e.what());
    }
    std::vector<Natural> classes = unit_classes(m);
    std::vector<std::uint64_t> counts(classes.size(), 0);
    std::uint64_t skipped = 0;
    for (const Natural& d : ds) {
        const Natural a = d % m;
        const auto it = std::lower_bound(classes.begin(), classes.end(), a);
        if (it == classes.end() || *it != a) {
            ++skipped;  // non-unit class: d shares a factor with m
            continue;
        }
        ++counts[static_cast<std::size_t>(it - classes.begin())];
    }
    std::ostringstream note;
    note << "exact divisor enumeration; w="
         << (w ? std::to_string(*w) : std::string("all")) << "; divisors outside unit classes: "
         << skipped;
    return finish_report(m, std::move(classes), std::move(counts), 0, note.str());
}

CharacterReport char_nonconstancy(const PrimePool& pool, const Factorization& kp,
                                  const FactorConfig& cfg) {
    const UnitGroupStructure U = unit_group_structure(kp, 1'000'000, cfg);
    const AbelianGroupSpec& G = U.spec();

    CharacterReport report;
    report.modulus = kp.value();
    report.group = G;

    std::vector<GroupElement> points;
    double largest = 0.0;
    for (const PoolEntry& e : pool.entries()) {
        if (gcd_nat(e.p, kp.value()) != 1) {
            ++report.skipped;
            continue;
        }
        points.push_back(U.embed(e.p));
        largest = std::max(largest, e.p.convert_to<double>());
    }
    report.units = points.size();
    const double threshold =
        report.units == 0 ? 0.0 : static_cast<double>(report.units) / std::log(largest);

    for (const CharacterSpec& chi : characters(G)) {
        const std::uint64_t ord = character_order(G, chi);
        if (ord == 1) continue;  // principal character excluded by definition
        // chi maps onto the ord-th roots of unity; bucket j holds the count
        // of pool primes with chi(p) = exp(2*pi*i*j/ord).
        std::vector<std::uint64_t> buckets(ord, 0);
        for (const GroupElement& g : points) {
            const RationalPhase v = evaluate_character(G, chi, g);
            ++buckets[v.num * (ord / v.den)];
        }
        CharacterNonconstancy row;
        row.chi = chi;
        row.order = ord;
        const std::uint64_t most = *std::max_element(buckets.begin(), buckets.end());
        row.min_disagreement = report.units - most;
        row.threshold = threshold;
        report.rows.push_back(std::move(row));
    }
    return report;
}

UniformityReport product_residue_sampling(const PrimePool& pool, unsigned t,
                                          std::uint64_t samples, const Natural& kp,
                                          std::uint64_t seed) {
    if (t == 0) throw Error("product_residue_sampling: t must be >= 1");
    std::vector<Natural> residues;
    std::uint64_t excluded = 0;
    for (const PoolEntry& e : pool.entries()) {
        if (gcd_nat(e.p, kp) == 1) {
            residues.push_back(e.p % kp);
        } else {
            ++excluded;
        }
    }
    if (residues.size() < t) {
        throw PoolTooSmall("product_residue_sampling: fewer than t usable entries");
    }

    std::vector<Natural> classes = unit_classes(kp);
    std::vector<std::uint64_t> counts(classes.size(), 0);

    // Fixed 16-shard split: shard s draws its own generator from the seed,
    // so the sample stream does not depend on execution interleaving.
    constexpr std::uint64_t kShards = 16;
    const std::size_t u = residues.size();
    for (std::uint64_t s = 0; s < kShards; ++s) {
        const std::uint64_t quota = samples / kShards + (s < samples % kShards ? 1 : 0);
        std::uint64_t state = seed + s;
        std::mt19937_64 rng(splitmix64(state));
        std::vector<std::size_t> idx(u);
        for (std::size_t i = 0; i < u; ++i) idx[i] = i;
        for (std::uint64_t n = 0; n < quota; ++n) {
            // Partial Fisher-Yates; rng() % range keeps the stream portable
            // (uniform_int_distribution is implementation-defined).
            Natural prod = 1;
            for (unsigned i = 0; i < t; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng() % (u - i));
                std::swap(idx[i], idx[j]);
                prod = prod * residues[idx[i]] % kp;
            }
            const auto it = std::lower_bound(classes.begin(), classes.end(), prod);
            ++counts[static_cast<std::size_t>(it - classes.begin())];
        }
    }

    std::ostringstream note;
    note << "seeded sampled analog of a universally quantified statement (scheme v1: "
         << kShards << " shards, partial Fisher-Yates, mt19937_64 over splitmix64); t=" << t
         << "; excluded entries: " << excluded;
    return finish_report(kp, std::move(classes), std::move(counts), seed, note.str());
}

CosetReport coset_avoidance(const PrimePool& pool, const Factorization& L,
                            double majority_threshold, const FactorConfig& cfg) {
    const UnitGroupStructure U = unit_group_structure(L, 1'000'000, cfg);
    const AbelianGroupSpec& G = U.spec();

    CosetReport report;
    report.modulus = L.value();
    report.group = G;
    report.majority_threshold = majority_threshold;

    std::vector<GroupElement> points;
    for (const PoolEntry& e : pool.entries()) {
        if (gcd_nat(e.p, L.value()) != 1) {
            ++report.skipped;
            continue;
        }
        points.push_back(U.embed(e.p));
    }
    report.units = points.size();

    std::vector<std::uint64_t> odd_ells;
    for (const PrimeFactor& f : factorize(Natural(G.exponent()), cfg).factors()) {
        if (f.prime > 2) odd_ells.push_back(to_u64(f.prime));
    }
    if (odd_ells.empty()) return report;  // exponent is a power of 2

    for (const CharacterSpec& chi : characters(G)) {
        const std::uint64_t ord = character_order(G, chi);
        if (std::find(odd_ells.begin(), odd_ells.end(), ord) == odd_ells.end()) continue;
        CosetRow row;
        row.ell = ord;
        row.chi = chi;
        row.counts.assign(ord, 0);
        for (const GroupElement& g : points) {
            const RationalPhase v = evaluate_character(G, chi, g);
            ++row.counts[v.num * (ord / v.den)];
        }
        if (report.units > 0) {
            const std::uint64_t most = *std::max_element(row.counts.begin(), row.counts.end());
            row.max_fraction =
                static_cast<double>(most) / static_cast<double>(report.units);
        }
        row.majority = row.max_fraction > majority_threshold;
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace carmkit
