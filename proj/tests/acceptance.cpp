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

// Acceptance gate. Runs the ten release criteria and prints one PASS/FAIL
// line per criterion with its runtime against the pinned budget. Exits 0
// only when every criterion passes. argv[1] names the command-line binary
// (used by the determinism criterion).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "carmkit/carmichael.hpp"
#include "carmkit/construct.hpp"
#include "carmkit/equidist.hpp"
#include "carmkit/errors.hpp"
#include "carmkit/groups.hpp"
#include "carmkit/json_io.hpp"
#include "carmkit/numtheory.hpp"

using namespace carmkit;

namespace {

std::string g_cli;

struct CriterionFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw CriterionFailed(what);
}

Natural binom(unsigned a, unsigned b) {
    Natural out = 1;
    for (unsigned i = 0; i < b; ++i) out = out * (a - i) / (i + 1);
    return out;
}

RationalPhase conj(const RationalPhase& p) {
    return p.num == 0 ? p : RationalPhase::of(p.den - p.num, p.den);
}

std::string run_cli(const std::string& args) {
    std::string cmd = "'" + g_cli + "' " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    expect(pipe != nullptr, "failed to launch the command-line binary");
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    int status = pclose(pipe);
    expect(WIFEXITED(status) && WEXITSTATUS(status) == 0,
           "command failed: " + args);
    return out;
}

// All multisets of cyclic orders >= 2 with the given product, parts
// non-decreasing: one representative per presentation, covering every
// abelian group of that order.
void groups_of_order(std::uint64_t n, std::uint64_t min_part, std::vector<std::uint64_t>& parts,
                     std::vector<AbelianGroupSpec>& out) {
    if (n == 1) {
        out.emplace_back(parts);
        return;
    }
    for (std::uint64_t d = min_part; d <= n; ++d) {
        if (n % d == 0) {
            parts.push_back(d);
            groups_of_order(n / d, d, parts, out);
            parts.pop_back();
        }
    }
}

std::vector<AbelianGroupSpec> all_groups_up_to(std::uint64_t max_order) {
    std::vector<AbelianGroupSpec> out;
    std::vector<std::uint64_t> parts;
    for (std::uint64_t n = 1; n <= max_order; ++n) groups_of_order(n, 2, parts, out);
    return out;
}

// --------------------------------------------------------------------------
// Criteria
// --------------------------------------------------------------------------

std::string criterion_1_korselt_soundness() {
    for (std::uint64_t n : {561ull, 1105ull, 1729ull, 41041ull}) {
        KorseltResult r = korselt_check(n);
        expect(r.ok(), "korselt_check rejected " + std::to_string(n));
        r.certificate->validate();
    }
    auto rejects = [](std::uint64_t n, KorseltFailure why) {
        KorseltResult r = korselt_check(n);
        expect(!r.ok() && r.failure == why,
               "korselt_check misclassified " + std::to_string(n));
    };
    rejects(7, KorseltFailure::prime);
    rejects(9, KorseltFailure::not_squarefree);
    rejects(15, KorseltFailure::divisibility_fails);
    rejects(100, KorseltFailure::not_squarefree);
    return "accepts 561/1105/1729/41041, rejects 7/9/15/100";
}

std::string criterion_2_oracle_cross_validation() {
    const std::uint64_t limit = 1'000'000;
    std::vector<KorseltCertificate> scan =
        enumerate_carmichael(limit, EnumStrategy::korselt_scan);
    std::vector<KorseltCertificate> fermat =
        enumerate_carmichael(limit, EnumStrategy::fermat_filter);
    expect(scan == fermat, "strategies disagree");
    expect(scan.size() >= 3, "list too short");
    expect(scan[0].n == 561 && scan[1].n == 1105 && scan[2].n == 1729,
           "list does not begin 561, 1105, 1729");
    std::uint64_t state = 20260814;  // fixed probe seed
    for (const KorseltCertificate& cert : scan) {
        cert.validate();
        expect(korselt_check(cert.n).ok(), "korselt re-check failed");
        expect(lambda_check(cert.n), "lambda_check failed for " + to_decimal(cert.n));
        const std::uint64_t n = to_u64(cert.n);
        for (int probe = 0; probe < 20; ++probe) {
            Natural base = 2 + splitmix64(state) % (n - 3);  // in [2, n - 2]
            expect(fermat_probe(cert.n, base),
                   "Fermat probe failed for " + to_decimal(cert.n));
        }
    }
    return "both strategies: " + std::to_string(scan.size()) +
           " numbers below 10^6, all triple-checked";
}

std::string criterion_3_equivalence_sweep() {
    for (std::uint64_t n = 1; n <= 100'000; ++n) {
        if (korselt_check(n).ok() != lambda_check(n)) {
            throw CriterionFailed("korselt/lambda disagree at " + std::to_string(n));
        }
    }
    return "korselt_check == lambda_check for all n <= 10^5";
}

std::string criterion_4_exact_omega() {
    for (unsigned R = 3; R <= 20; ++R) {
        TargetOmegaResult r = target_omega(R);
        r.certificate.validate();
        expect(r.certificate.factors.omega() == R,
               "omega mismatch at R = " + std::to_string(R));
        expect(korselt_check(r.certificate.n).ok(),
               "independent re-check failed at R = " + std::to_string(R));
    }
    // The forced-odd-prime decomposition of section-6 style: on the default
    // ladder the direct search always wins first at this scale, so the trick
    // is exercised explicitly and must deliver the same certificate.
    TargetOmegaOptions forced;
    LadderRung rung;
    rung.mode = PoolMode::erdos;
    rung.M = 80;
    forced.ladder = {rung};
    forced.require_pinned = true;
    TargetOmegaResult pinned = target_omega(3, forced);
    expect(pinned.used_pinned_path, "pinned path not taken when forced");
    expect(pinned.certificate.n == 561, "pinned path built the wrong number");
    expect(pinned.certificate.n % 3 == 0 &&
               (pinned.certificate.n / 3) % 80 == mod_inverse(3, 80),
           "pinned decomposition is not 3 * (inverse-of-3 rest)");
    return "R = 3..20 certified; forced odd-prime path rebuilds 561";
}

std::string criterion_5_search_oracle_agreement() {
    PrimePool pool = build_pool_erdos(120);
    TargetSpec target;
    target.modulus = 120;
    target.size = SizeConstraint::exactly(4);

    // Independent brute force over the 2^6 subsets.
    const auto& entries = pool.entries();
    expect(entries.size() == 6, "unexpected pool size for M = 120");
    std::vector<std::size_t> expected;
    for (std::uint64_t mask = 1; mask < 64; ++mask) {
        std::vector<std::size_t> idx;
        Natural product = 1;
        for (std::size_t i = 0; i < 6; ++i) {
            if (mask & (1u << i)) {
                idx.push_back(i);
                product *= entries[i].p;
            }
        }
        if (idx.size() == 4 && product % 120 == 1 && (expected.empty() || idx < expected)) {
            expected = idx;
        }
    }

    SearchConfig ex;
    ex.strategy = SearchStrategy::exhaustive;
    auto a = subset_search(pool, target, ex);
    expect(a.has_value(), "exhaustive search found nothing");
    expect(a->indices == expected, "exhaustive differs from brute force");
    expect(a->product == 41041, "product is not 41041");
    std::vector<Natural> primes;
    for (std::size_t i : a->indices) primes.push_back(entries[i].p);
    expect(primes == std::vector<Natural>{7, 11, 13, 41}, "primes are not {7, 11, 13, 41}");

    SearchConfig mitm;
    mitm.strategy = SearchStrategy::meet_in_middle;
    expect(subset_search(pool, target, mitm) == a, "meet-in-the-middle differs");
    return "both strategies return {7, 11, 13, 41} = 41041";
}

std::string criterion_6_davenport_suite() {
    for (std::uint64_t n = 1; n <= 12; ++n) {
        AbelianGroupSpec G = n == 1 ? AbelianGroupSpec() : AbelianGroupSpec({n});
        expect(davenport_exact(G) == n, "cyclic value wrong at n = " + std::to_string(n));
    }
    expect(davenport_exact(AbelianGroupSpec({2, 2})) == 3, "D(Z2 + Z2) != 3");
    expect(davenport_exact(AbelianGroupSpec({3, 3})) == 5, "D(Z3 + Z3) != 5");

    // Bound dominates the exact value wherever the search can finish. The
    // budget keeps the whole sweep inside the runtime pin; groups that give
    // up are counted, not silently dropped.
    // 10M search steps settle every group this sweep can settle at all
    // (raising the budget 5x changes no outcome, only the runtime).
    DavenportConfig quick;
    quick.max_work = 10'000'000;
    unsigned computed = 0, skipped = 0;
    for (std::uint64_t L = 1; L <= 1000; ++L) {
        Factorization f = factorize(L);
        bool squarefree = true;
        for (const auto& pf : f.factors()) squarefree = squarefree && pf.multiplicity == 1;
        if (!squarefree) continue;
        if (euler_phi(f) > 512) continue;
        UnitGroupStructure U = unit_group_structure(f);
        Natural bound = davenport_bound(f);
        try {
            unsigned exact = davenport_exact(U.spec(), quick);
            expect(bound >= exact, "bound below exact at L = " + std::to_string(L));
            ++computed;
        } catch (const GroupTooLarge&) {
            ++skipped;
        }
    }
    expect(computed >= 100, "too few exact values computed");
    return "closed forms ok; sweep L <= 1000: " + std::to_string(computed) +
           " exact values dominated, " + std::to_string(skipped) + " over budget";
}

std::string criterion_7_subsequence_bound() {
    // Candidate groups small enough to admit r > t > D(G) with r <= 16.
    std::vector<std::pair<AbelianGroupSpec, unsigned>> groups;
    for (const AbelianGroupSpec& G : all_groups_up_to(16)) {
        if (G.order() < 2) continue;
        unsigned n = davenport_exact(G);
        if (n + 2 <= 16) groups.emplace_back(G, n);
    }
    expect(!groups.empty(), "no candidate groups");
    std::uint64_t state = 4;  // fixed instance seed
    for (int instance = 0; instance < 50; ++instance) {
        const auto& [G, n] = groups[splitmix64(state) % groups.size()];
        unsigned r = n + 2 + static_cast<unsigned>(splitmix64(state) % (16 - n - 1));
        unsigned t = n + 1 + static_cast<unsigned>(splitmix64(state) % (r - n - 1));
        expect(r > t && t > n && r <= 16, "instance shape violated");
        std::vector<GroupElement> S;
        GroupElement g = G.identity();
        for (unsigned i = 0; i < r; ++i) {
            GroupElement e = G.element_at(splitmix64(state) % G.order());
            S.push_back(e);
            g = G.add(g, e);
        }
        std::uint64_t count = count_subsequences_with_product(G, S, g, t);
        expect(Natural(count) * binom(r, n) >= binom(r, t),
               "bound violated on instance " + std::to_string(instance));
    }
    return "50 seeded instances satisfy count * C(r,n) >= C(r,t)";
}

std::string criterion_8_chain_property() {
    struct Plan {
        std::uint64_t M;
        unsigned h;  // 0 = auto-detect
        unsigned max_blocks;
    };
    unsigned chains = 0, blocks = 0;
    for (Plan plan : {Plan{2520, 3, 3}, Plan{5040, 0, 3}, Plan{27720, 3, 3}, Plan{55440, 3, 2}}) {
        PrimePool pool = build_pool_erdos(plan.M);
        TargetSpec t;
        t.modulus = plan.M;
        t.size = SizeConstraint::exactly(3);
        auto base = subset_search(pool, t);
        expect(base.has_value(), "no base on M = " + std::to_string(plan.M));
        ChainResult chain = extend_chain(*base, pool, plan.M, plan.h, plan.max_blocks);
        expect(chain.chain.size() >= 2, "no block found on M = " + std::to_string(plan.M));
        for (std::size_t i = 0; i < chain.chain.size(); ++i) {
            const SubsetSolution& s = chain.chain[i];
            expect(s.size == base->size + i * chain.h,
                   "omega does not grow by h per block");
            if (s.size >= 3) {
                KorseltResult r = korselt_check(s.product);
                expect(r.ok(), "cumulative product is not Carmichael");
                expect(r.certificate->factors.omega() == s.size, "omega != block count");
            }
        }
        ++chains;
        blocks += static_cast<unsigned>(chain.chain.size()) - 1;
    }
    return std::to_string(chains) + " chains, " + std::to_string(blocks) +
           " blocks, every cumulative product certified";
}

std::string criterion_9_character_exactness() {
    unsigned checked = 0;
    for (const AbelianGroupSpec& G : all_groups_up_to(64)) {
        const std::uint64_t order = G.order();
        const std::uint64_t level = G.exponent();
        std::vector<CharacterSpec> chars = characters(G);
        expect(chars.size() == order, "character count != order");
        // Value table: chars x elements, evaluated once.
        std::vector<std::vector<RationalPhase>> value(
            chars.size(), std::vector<RationalPhase>(order));
        for (std::size_t c = 0; c < chars.size(); ++c) {
            for (std::uint64_t i = 0; i < order; ++i) {
                value[c][i] = evaluate_character(G, chars[c], G.element_at(i));
            }
        }
        // Row orthogonality: sum over the group of chi_a * conj(chi_b).
        for (std::size_t a = 0; a < chars.size(); ++a) {
            for (std::size_t b = 0; b < chars.size(); ++b) {
                CyclotomicSum sum(level);
                for (std::uint64_t i = 0; i < order; ++i) {
                    sum.add_root(value[a][i].times(conj(value[b][i])));
                }
                expect(a == b ? sum.is_integer(static_cast<std::int64_t>(order))
                              : sum.is_zero(),
                       "row orthogonality failed");
            }
        }
        // Column orthogonality: sum over characters of chi(g) * conj(chi(h)).
        for (std::uint64_t g = 0; g < order; ++g) {
            for (std::uint64_t h = 0; h < order; ++h) {
                CyclotomicSum sum(level);
                for (std::size_t c = 0; c < chars.size(); ++c) {
                    sum.add_root(value[c][g].times(conj(value[c][h])));
                }
                expect(g == h ? sum.is_integer(static_cast<std::int64_t>(order))
                              : sum.is_zero(),
                       "column orthogonality failed");
            }
        }
        ++checked;
    }
    return "both relations exact for " + std::to_string(checked) +
           " presentations of order <= 64";
}

std::string criterion_10_determinism() {
    const std::string target = "target-omega --R 4";
    expect(run_cli(target) == run_cli(target), "target-omega output differs between runs");
    const std::vector<std::string> sampled = {
        "--seed 42 equidist --report products --pool erdos:2520 --kp 11 --t 10 --samples 5000",
        "--seed 7 equidist --report products --pool erdos:720 --kp 13 --t 6 --samples 2000",
    };
    for (const std::string& args : sampled) {
        expect(run_cli(args) == run_cli(args), "sampled report differs between runs");
    }
    return "target-omega and seeded sampling byte-identical across runs";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <cli-binary>\n", argv[0]);
        return 2;
    }
    g_cli = std::filesystem::absolute(argv[1]).string();

    struct Criterion {
        int number;
        const char* name;
        double budget_seconds;  // 0 = untimed
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "Korselt soundness", 1.0, criterion_1_korselt_soundness},
        {2, "oracle cross-validation", 60.0, criterion_2_oracle_cross_validation},
        {3, "Korselt/lambda equivalence", 60.0, criterion_3_equivalence_sweep},
        {4, "exact factor-count construction", 600.0, criterion_4_exact_omega},
        {5, "search oracle agreement", 0.0, criterion_5_search_oracle_agreement},
        {6, "Davenport suite", 120.0, criterion_6_davenport_suite},
        {7, "subsequence-count lower bound", 60.0, criterion_7_subsequence_bound},
        {8, "chain property", 0.0, criterion_8_chain_property},
        {9, "character exactness", 0.0, criterion_9_character_exactness},
        {10, "determinism", 0.0, criterion_10_determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        bool ok = true;
        std::string note;
        try {
            note = c.run();
        } catch (const std::exception& e) {
            ok = false;
            note = e.what();
        }
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (ok && c.budget_seconds > 0 && seconds > c.budget_seconds) {
            ok = false;
            note += " (over the pinned runtime budget)";
        }
        std::string timing = " [" + std::to_string(seconds).substr(0, 6) + "s";
        if (c.budget_seconds > 0) {
            timing += " < " + std::to_string(static_cast<int>(c.budget_seconds)) + "s";
        }
        timing += "]";
        std::printf("%s  %2d  %s: %s%s\n", ok ? "PASS" : "FAIL", c.number, c.name,
                    note.c_str(), timing.c_str());
        std::fflush(stdout);
        failures += !ok;
    }
    if (failures == 0) {
        std::printf("acceptance: all %zu criteria passed\n", criteria.size());
        return 0;
    }
    std::printf("acceptance: %d of %zu criteria FAILED\n", failures, criteria.size());
    return 1;
}
