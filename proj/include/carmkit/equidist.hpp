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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carmkit/construct.hpp"
#include "carmkit/groups.hpp"
#include "carmkit/numtheory.hpp"

namespace carmkit {

// Empirical distribution diagnostics for divisor sets and prime pools.
// These are reports, not proofs: no hard pass/fail thresholds are baked in;
// flag thresholds are parameters with documented defaults.

/// Distribution of a finite multiset over the unit classes of a modulus.
/// Exact enumerations set seed = 0; sampled reports record their seed and
/// describe the sampling scheme in `note`.
struct UniformityReport {
    Natural modulus;
    /// Unit class representatives modulo `modulus`, ascending.
    std::vector<Natural> classes;
    /// Count per class, parallel to `classes`; sums to sample_size.
    std::vector<std::uint64_t> counts;
    std::uint64_t sample_size = 0;
    /// sample_size / number of classes.
    double expected = 0.0;
    /// max over classes of |count - expected| / expected.
    double max_rel_deviation = 0.0;
    /// Pearson statistic: sum (count - expected)^2 / expected.
    double chi_square = 0.0;
    std::uint64_t seed = 0;
    std::string note;

    /// Recomputes every derived field from the counts; throws Error on any
    /// mismatch (wrong sum, stale statistics, class/count length skew).
    void validate() const;

    bool operator==(const UniformityReport&) const = default;
};

/// Counts divisors of L (restricted to exactly w prime factors when w is
/// given) in each unit class modulo m >= 2. Divisors sharing a factor with
/// m fall in non-unit classes and are not counted. Throws BudgetExceeded
/// when the divisor enumeration exceeds `divisor_budget`.
UniformityReport divisor_uniformity(const Factorization& L, std::optional<unsigned> w,
                                    const Natural& m, std::uint64_t divisor_budget = 1'000'000);

/// One row of the character nonconstancy report.
struct CharacterNonconstancy {
    CharacterSpec chi;
    std::uint64_t order = 1;
    /// min over values z in chi's image of #{pool primes p : chi(p) != z};
    /// a large value means chi is far from constant on the pool.
    std::uint64_t min_disagreement = 0;
    /// Pool-size-over-log comparison level: units / log(largest pool prime).
    double threshold = 0.0;

    bool operator==(const CharacterNonconstancy&) const = default;
};

struct CharacterReport {
    Natural modulus;
    AbelianGroupSpec group;
    /// Pool entries coprime to the modulus (the ones evaluated).
    std::uint64_t units = 0;
    /// Pool entries skipped because they share a factor with the modulus.
    std::uint64_t skipped = 0;
    /// One row per non-principal character, in dual-group enumeration order.
    std::vector<CharacterNonconstancy> rows;

    bool operator==(const CharacterReport&) const = default;
};

/// Evaluates every non-principal character of the unit group modulo the
/// square-free modulus kp on the pool entries. Throws NotSquarefree or
/// GroupTooLarge from the unit-group decomposition.
CharacterReport char_nonconstancy(const PrimePool& pool, const Factorization& kp,
                                  const FactorConfig& cfg = {});

/// Residues modulo kp of `samples` seeded pseudo-random t-element products
/// of distinct pool entries. This is the sampled analog of a universally
/// quantified statement: it surveys random products, it does not check all
/// of them. Entries sharing a factor with kp are excluded from sampling;
/// throws PoolTooSmall when fewer than t usable entries remain. The sample
/// stream is split over 16 fixed shards so the output is independent of
/// any future parallel execution.
UniformityReport product_residue_sampling(const PrimePool& pool, unsigned t,
                                          std::uint64_t samples, const Natural& kp,
                                          std::uint64_t seed);

/// One row of the coset avoidance report: an order-ell character, whose
/// kernel is an index-ell subgroup; cosets are indexed by the character
/// value exp(2*pi*i*j/ell), j = 0..ell-1.
struct CosetRow {
    std::uint64_t ell = 0;
    CharacterSpec chi;
    /// Pool count per coset, indexed by j.
    std::vector<std::uint64_t> counts;
    /// Largest coset share among evaluated units.
    double max_fraction = 0.0;
    bool majority = false;

    bool operator==(const CosetRow&) const = default;
};

struct CosetReport {
    Natural modulus;
    AbelianGroupSpec group;
    std::uint64_t units = 0;
    std::uint64_t skipped = 0;
    double majority_threshold = 0.5;
    /// Empty when the unit-group exponent has no odd prime factor.
    std::vector<CosetRow> rows;

    bool operator==(const CosetReport&) const = default;
};

/// For each odd prime ell dividing the exponent of the unit group modulo
/// the square-free L and each character of order exactly ell, reports how
/// the pool distributes over the ell cosets of the character's kernel,
/// flagging any coset holding more than majority_threshold of the pool.
/// Throws NotSquarefree or GroupTooLarge from the decomposition.
CosetReport coset_avoidance(const PrimePool& pool, const Factorization& L,
                            double majority_threshold = 0.5, const FactorConfig& cfg = {});

}  // namespace carmkit
