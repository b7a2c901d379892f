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
#include <utility>
#include <vector>

#include "carmkit/carmichael.hpp"
#include "carmkit/errors.hpp"
#include "carmkit/numtheory.hpp"

namespace carmkit {

// ---------------------------------------------------------------------------
// Prime pools
// ---------------------------------------------------------------------------

enum class PoolMode {
    agp,    // entries p = d*k + 1 with d | L, d > 1, gcd(k, L) = 1
    erdos,  // entries p with p - 1 | M, p does not divide M
};

struct PoolEntry {
    Natural d;  // agp: the divisor of L with p = d*k + 1; erdos: p - 1
    Natural p;  // the prime itself

    bool operator==(const PoolEntry&) const = default;
};

/// Construction-time filters for build_pool / build_pool_erdos.
struct PoolOptions {
    /// Keep only divisors d with exactly w prime factors (agp mode).
    std::optional<unsigned> w;
    /// Cap on ord_2(p - 1) for agp entries; 0 disables the filter.
    unsigned ord2_cap = 2;
    /// Primes offered as fixed factors when eligible (prime, p - 1 divides
    /// the working modulus, p coprime to it, not already an entry).
    std::vector<Natural> pinned_candidates = {Natural(3)};
    /// Ceiling on the number of divisors enumerated.
    std::uint64_t divisor_budget = 1'000'000;
    FactorConfig factor;
};

/// An immutable pool of candidate primes sharing a working modulus: in agp
/// mode every entry satisfies p - 1 = d*k | L*k, in erdos mode p - 1 | M.
/// Any subset product that is congruent to 1 modulo the working modulus is
/// therefore one Korselt divisibility witness away from being Carmichael.
class PrimePool {
  public:
    PrimePool() = default;

    /// agp-mode pool; validates every invariant.
    PrimePool(Factorization L, Natural k, std::vector<PoolEntry> entries,
              std::vector<Natural> pinned, const FactorConfig& cfg = {});

    /// erdos-mode pool; validates every invariant.
    PrimePool(Natural M, std::vector<PoolEntry> entries, std::vector<Natural> pinned,
              const FactorConfig& cfg = {});

    PoolMode mode() const { return mode_; }
    /// agp mode only.
    const Factorization& L() const;
    /// agp mode only.
    const Natural& k() const;
    /// erdos mode only.
    const Natural& M() const;

    /// L*k in agp mode, M in erdos mode.
    Natural working_modulus() const;

    const std::vector<PoolEntry>& entries() const { return entries_; }
    const std::vector<Natural>& pinned() const { return pinned_; }

    /// Re-verifies every invariant (mode-specific divisibility, primality,
    /// ordering, pinned eligibility). Used on deserialized pools, which are
    /// never trusted.
    void validate(const FactorConfig& cfg = {}) const;

    bool operator==(const PrimePool&) const = default;

  private:
    PoolMode mode_ = PoolMode::erdos;
    Factorization L_;  // agp
    Natural k_ = 1;    // agp
    Natural M_ = 0;    // erdos
    std::vector<PoolEntry> entries_;
    std::vector<Natural> pinned_;
};

// ---------------------------------------------------------------------------
// Subset-product search
// ---------------------------------------------------------------------------

/// Size requirement on the number of primes in a solution.
struct SizeConstraint {
    enum class Kind { exact, congruence };
    Kind kind = Kind::exact;
    unsigned exact = 0;    // Kind::exact
    unsigned residue = 0;  // Kind::congruence: size % modulus == residue
    unsigned modulus = 1;

    static SizeConstraint exactly(unsigned r) { return {Kind::exact, r, 0, 1}; }
    static SizeConstraint congruent(unsigned a, unsigned h) {
        return {Kind::congruence, 0, a, h};
    }
    bool admits(std::size_t size) const;
    void validate() const;

    bool operator==(const SizeConstraint&) const = default;
};

enum class ParityRequirement { none, even, odd };

/// What a subset product must satisfy: product ≡ residue (mod modulus), size
/// within the constraint and parity, avoiding excluded primes.
struct TargetSpec {
    Natural modulus;
    Natural residue = 1;
    SizeConstraint size = SizeConstraint::exactly(3);
    ParityRequirement parity = ParityRequirement::none;
    std::vector<Natural> exclude;

    /// Throws unless modulus >= 2, gcd(residue, modulus) = 1, and the size
    /// constraint is well formed.
    void validate() const;

    bool admits_size(std::size_t size) const;
};

enum class SearchStrategy {
    automatic,       // exhaustive for <= 28 usable entries, else meet-in-the-middle
    exhaustive,      // depth-first over all subsets
    meet_in_middle,  // split pool, index half-products by (residue, size)
};

struct SearchConfig {
    SearchStrategy strategy = SearchStrategy::automatic;
    /// Refuse pools with more usable entries than this.
    std::size_t max_pool = 64;
    /// Deterministic work budget (search nodes); BudgetExceeded past it.
    std::uint64_t budget = 200'000'000;
    /// Reserved for sampled strategies; the deterministic searches ignore it.
    std::uint64_t seed = 0;
    /// Allow solutions to include the pool's pinned primes.
    bool use_pinned = true;
    // Tie-break is fixed, not configurable: lexicographically smallest entry
    // index sequence, then smallest product.
};

/// A verified selection: distinct pool entries plus a subset of the pinned
/// primes. Construction recomputes the product and checks it against the
/// originating target, so a SubsetSolution in hand is always consistent.
struct SubsetSolution {
    std::vector<std::size_t> indices;     // sorted positions into pool.entries()
    std::vector<Natural> includes_pinned; // sorted subset of pool.pinned()
    Natural product = 1;
    std::size_t size = 0;                 // indices.size() + includes_pinned.size()

    /// Builds and fully re-checks a solution against pool and target.
    static SubsetSolution checked(const PrimePool& pool, const TargetSpec& target,
                                  std::vector<std::size_t> indices,
                                  std::vector<Natural> includes_pinned);

    /// Recomputes everything from the pool and re-checks the target;
    /// throws Error on any mismatch. Deserialized solutions are never trusted.
    void revalidate(const PrimePool& pool, const TargetSpec& target) const;

    bool operator==(const SubsetSolution&) const = default;
};

/// Searches for the tie-break-minimal subset of pool entries (plus pinned
/// primes if allowed) whose product is congruent to target.residue modulo
/// target.modulus with the required size and parity. Returns nullopt when
/// the search space is exhausted without a solution; throws BudgetExceeded
/// when the work budget stops the search before exhaustion.
std::optional<SubsetSolution> subset_search(const PrimePool& pool, const TargetSpec& target,
                                            const SearchConfig& config = {});

// ---------------------------------------------------------------------------
// Chains
// ---------------------------------------------------------------------------

struct ChainResult {
    /// Cumulative solutions: chain[0] is the base, chain[i] adds i blocks.
    std::vector<SubsetSolution> chain;
    /// Block size used (auto-detected when the request passed h = 0).
    unsigned h = 0;
};

/// Greedily extends base (product ≡ 1 mod M) by disjoint blocks of exactly h
/// unused pool entries, each block product ≡ 1 (mod M), so every cumulative
/// product stays ≡ 1 (mod M). h = 0 auto-detects the smallest h >= 2
/// admitting a first block (scanning up to the Davenport bound of M's unit
/// group). Stops at max_blocks or when no block exists.
ChainResult extend_chain(const SubsetSolution& base, const PrimePool& pool, const Natural& M,
                         unsigned h, unsigned max_blocks, const SearchConfig& config = {});

// ---------------------------------------------------------------------------
// Exact omega targets
// ---------------------------------------------------------------------------

/// One rung of the modulus ladder tried by target_omega.
struct LadderRung {
    PoolMode mode = PoolMode::erdos;
    /// erdos: the working modulus M.
    Natural M = 0;
    /// agp: build_modulus(prime_budget, [q_lo, q_hi], require_qr3) then
    /// find_k(L, k_max).
    unsigned prime_budget = 0;
    std::uint64_t q_lo = 3;
    std::uint64_t q_hi = 0;
    bool require_qr3 = false;
    Natural k_max = 0;

    bool operator==(const LadderRung&) const = default;
};

struct TargetOmegaOptions {
    /// Moduli tried in order; empty means the built-in default ladder.
    std::vector<LadderRung> ladder;
    SearchConfig search;
    PoolOptions pool;
    /// The odd prime forced into solutions on the odd-R fallback path.
    Natural pinned_prime = 3;
    /// Skip the direct attempt for odd R, so the forced-odd-prime path must
    /// carry the construction (decomposition n = pinned * even-size rest).
    bool require_pinned = false;
    FactorConfig factor;
};

struct TargetOmegaResult {
    KorseltCertificate certificate;
    /// Which rung produced it.
    LadderRung rung;
    PrimePool pool;
    SubsetSolution solution;
    /// True when the forced-odd-prime fallback produced the solution.
    bool used_pinned_path = false;

    bool operator==(const TargetOmegaResult&) const = default;
};

/// The built-in default ladder: erdos moduli in increasing order, then agp
/// rungs as a tail for targets the erdos moduli miss.
std::vector<LadderRung> default_ladder();

/// Finds a certified Carmichael number with exactly R prime factors by
/// walking the modulus ladder: direct exact-R search first, then for odd R
/// the forced-odd-prime path (exact R-1 on the rest, times the pinned
/// prime). korselt_check is the sole authority on every return path.
/// Throws Infeasible for R < 3 and Exhausted when every rung fails.
TargetOmegaResult target_omega(unsigned R, const TargetOmegaOptions& options = {});

// ---------------------------------------------------------------------------
// Modulus and pool construction
// ---------------------------------------------------------------------------

/// Greedy smallest-first product of up to prime_budget primes q in
/// [q_lo, q_hi] with q - 1 square-free, and jacobi(3, q) = 1 if require_qr3
/// (making 3 a quadratic residue modulo the product). prime_budget = 0
/// yields L = 1; throws Infeasible when prime_budget > 0 and no prime
/// qualifies.
Factorization build_modulus(unsigned prime_budget, std::uint64_t q_lo, std::uint64_t q_hi,
                            bool require_qr3 = false, const FactorConfig& cfg = {});

/// The k <= k_max with gcd(k, L) = 1 maximizing the number of divisors
/// d | L, d > 1 (matching the w filter if given) with d*k + 1 prime; ties
/// prefer the smallest k. Returns (k, hit count). Throws Infeasible when
/// L = 1 (no divisor d > 1) or no coprime k <= k_max exists.
std::pair<Natural, unsigned> find_k(const Factorization& L, const Natural& k_max,
                                    std::optional<unsigned> w = {},
                                    const FactorConfig& cfg = {});

/// All agp entries (d, d*k + 1) for divisors d | L, d > 1, filtered by
/// options (w, ord2_cap), plus eligible pinned primes. Throws Infeasible on
/// an empty pool.
PrimePool build_pool(const Factorization& L, const Natural& k, const PoolOptions& options = {});

/// All erdos entries: primes p with p - 1 | M and p not dividing M.
/// Throws Infeasible on an empty pool; M must be even.
PrimePool build_pool_erdos(const Natural& M, const PoolOptions& options = {});

}  // namespace carmkit
