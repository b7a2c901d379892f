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
#include <vector>

#include "carmkit/numtheory.hpp"

namespace carmkit {

/// Element of a finite abelian group in component coordinates.
struct GroupElement {
    std::vector<std::uint64_t> coords;

    bool operator==(const GroupElement&) const = default;
};

/// Finite abelian group presented as a direct sum of cyclic components
/// Z/n1 + ... + Z/nr (each ni >= 2). The trivial group has no components.
class AbelianGroupSpec {
  public:
    AbelianGroupSpec() = default;  // trivial group
    explicit AbelianGroupSpec(std::vector<std::uint64_t> orders);

    const std::vector<std::uint64_t>& cyclic_orders() const { return orders_; }
    std::size_t rank() const { return orders_.size(); }

    /// Group order; throws GroupTooLarge if it does not fit in 64 bits.
    std::uint64_t order() const;
    std::uint64_t exponent() const;

    /// Invariant factors d1 | d2 | ... | dk with product equal to the order.
    std::vector<std::uint64_t> invariant_factors() const;

    GroupElement identity() const;
    GroupElement add(const GroupElement& a, const GroupElement& b) const;
    GroupElement negate(const GroupElement& a) const;

    /// Mixed-radix enumeration: element_at(index_of(g)) == g, first
    /// coordinate most significant.
    std::uint64_t index_of(const GroupElement& g) const;
    GroupElement element_at(std::uint64_t index) const;

    bool operator==(const AbelianGroupSpec&) const = default;

  private:
    std::vector<std::uint64_t> orders_;
};

/// Value on the unit circle written exactly as exp(2*pi*i * num / den)
/// with 0 <= num < den and gcd(num, den) = 1.
struct RationalPhase {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    static RationalPhase of(std::uint64_t num, std::uint64_t den);
    RationalPhase times(const RationalPhase& other) const;
    bool is_one() const { return num == 0; }
    /// Multiplicative order: least k with phase^k = 1.
    std::uint64_t order() const { return den; }

    bool operator==(const RationalPhase&) const = default;
};

/// Character of an abelian group, written as exponents against the cyclic
/// components: chi(g) = exp(2*pi*i * sum_i exponents[i]*coords[i]/n_i).
struct CharacterSpec {
    std::vector<std::uint64_t> exponents;

    bool operator==(const CharacterSpec&) const = default;
};

/// Exact character evaluation as a rational phase.
RationalPhase evaluate_character(const AbelianGroupSpec& G, const CharacterSpec& chi,
                                 const GroupElement& g);

/// Multiplicative order of the character in the dual group.
std::uint64_t character_order(const AbelianGroupSpec& G, const CharacterSpec& chi);

/// All |G| characters in mixed-radix order of their exponent vectors.
/// Throws GroupTooLarge when |G| > budget.
std::vector<CharacterSpec> characters(const AbelianGroupSpec& G,
                                      std::uint64_t budget = std::uint64_t{1} << 20);

/// Element of Z[zeta_N]: an integer combination of N-th roots of unity,
/// stored as coefficients against zeta_N^0 .. zeta_N^(N-1). Supports the
/// exact zero test needed for orthogonality sums (reduction modulo the
/// N-th cyclotomic polynomial).
class CyclotomicSum {
  public:
    explicit CyclotomicSum(std::uint64_t level);

    std::uint64_t level() const { return level_; }

    void add_root(const RationalPhase& phase);  // phase.den must divide level
    void add(const CyclotomicSum& other);

    bool is_zero() const;
    /// True when the value equals the rational integer v.
    bool is_integer(std::int64_t v) const;

  private:
    std::uint64_t level_;
    std::vector<boost::multiprecision::cpp_int> coeff_;
};

/// Structure of the unit group modulo a square-free L, split into cyclic
/// components of prime-power order (the per-prime unit groups (Z/qZ)^* are
/// decomposed along the prime factorization of q - 1). Components are
/// grouped by ascending q, each q's components in ascending order.
class UnitGroupStructure {
  public:
    const AbelianGroupSpec& spec() const { return spec_; }
    const Natural& modulus() const { return modulus_; }

    /// Coordinates of a unit u modulo L. Throws NotAUnit if gcd(u, L) != 1.
    GroupElement embed(const Natural& u) const;

  private:
    friend UnitGroupStructure unit_group_structure(const Factorization&, std::uint64_t,
                                                   const FactorConfig&);

    struct Component {
        std::uint64_t q;          // prime factor of L
        std::uint64_t order;      // prime power c with c | q - 1
        std::uint64_t generator;  // generator of the order-c subgroup of (Z/q)^*
        std::uint64_t cofactor;   // (q - 1) / c
        mutable std::vector<std::uint64_t> dlog_table;  // built lazily
    };

    AbelianGroupSpec spec_;
    Natural modulus_;
    std::vector<Component> components_;
};

/// Computes the decomposition for square-free L (throws NotSquarefree
/// otherwise). Throws DiscreteLogBudget when some cyclic component exceeds
/// the exhaustive discrete-log bound, and GroupTooLarge when a prime factor
/// of L does not fit the small-modulus fast path.
UnitGroupStructure unit_group_structure(const Factorization& L,
                                        std::uint64_t dlog_budget = 1'000'000,
                                        const FactorConfig& cfg = {});

struct DavenportConfig {
    /// Ceiling on |G| for the exact computation.
    std::uint64_t max_order = 512;
    /// Ceiling on the search frontier (number of distinct reachable
    /// subset-sum sets per level) before giving up. Candidate sets may grow
    /// to four times this before the level is filtered.
    std::size_t max_frontier = 1'000'000;
    /// Ceiling on total search work (candidate constructions plus dominance
    /// filter operations) before giving up. Deterministic, unlike a
    /// wall-clock limit.
    std::uint64_t max_work = 2'000'000'000;
    /// Skip the closed-form shortcuts and force the search. The shortcuts
    /// and the search agree wherever both apply; tests rely on this flag to
    /// cross-check them.
    bool force_search = false;
};

/// Exact Davenport constant D(G): the least d such that every sequence of d
/// elements has a non-empty zero-sum subsequence. Closed forms cover cyclic
/// groups, p-groups and rank-2 groups; everything else runs a breadth-first
/// search over achievable subset-sum sets with inclusion-minimal pruning.
unsigned davenport_exact(const AbelianGroupSpec& G, const DavenportConfig& cfg = {});

enum class BoundReading {
    phi,       // lambda(L) * (1 + ln(phi(L) / lambda(L))) + 1
    modulus,   // lambda(L) * (1 + ln(L / lambda(L))) + 1
};

/// Ceiling of the Davenport upper bound for the unit group modulo L.
Natural davenport_bound(const Factorization& L, BoundReading reading = BoundReading::phi);

/// Number of non-empty subsequences (by index) of S of length <= t whose
/// product is g in G. Exhaustive over all subsets; |S| > 24 throws TooLong.
std::uint64_t count_subsequences_with_product(const AbelianGroupSpec& G,
                                              const std::vector<GroupElement>& S,
                                              const GroupElement& g, unsigned t);

}  // namespace carmkit
