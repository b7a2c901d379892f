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

#include <boost/multiprecision/cpp_int.hpp>

#include "carmkit/errors.hpp"

namespace carmkit {

/// Arbitrary-precision non-negative integer. All public entry points that
/// accept a Natural treat negative values as a precondition violation.
using Natural = boost::multiprecision::cpp_int;

/// Tuning knobs for primality testing and factoring.
struct FactorConfig {
    /// Trial division covers all primes up to this bound.
    std::uint64_t trial_bound = 1'000'000;
    /// Retries of the randomized splitting step (deterministic schedule of
    /// polynomial offsets) before giving up with FactorizationTimeout.
    unsigned rho_retries = 64;
    /// Per-retry iteration cap for the splitting step.
    std::uint64_t rho_iteration_cap = std::uint64_t{1} << 26;
    /// Rounds of the probabilistic primality test above the deterministic
    /// 64-bit range. 64 rounds put the error probability below 2^-128.
    unsigned probable_rounds = 64;
    /// Largest trial divisor attempted when a proof of primality is
    /// requested for inputs outside the deterministic 64-bit range.
    std::uint64_t proven_trial_cap = 100'000'000;
};

/// One prime with its multiplicity inside a Factorization.
struct PrimeFactor {
    Natural prime;
    unsigned multiplicity = 1;

    bool operator==(const PrimeFactor&) const = default;
};

/// Complete factorization of a positive integer. Invariants: primes are
/// strictly increasing, every listed prime passes is_prime, multiplicities
/// are >= 1, and the product of prime powers equals value(). The empty
/// factor list represents 1.
class Factorization {
  public:
    Factorization();  // represents 1

    /// Builds from an explicit factor list; recomputes the value and checks
    /// every invariant (throws Error on violation).
    static Factorization from_parts(std::vector<PrimeFactor> factors,
                                    const FactorConfig& cfg = {});

    const Natural& value() const { return value_; }
    const std::vector<PrimeFactor>& factors() const { return factors_; }

    /// Number of distinct prime factors.
    unsigned omega() const { return static_cast<unsigned>(factors_.size()); }
    bool squarefree() const;
    bool contains(const Natural& prime) const;

    bool operator==(const Factorization&) const = default;

  private:
    friend Factorization factorize(const Natural&, const FactorConfig&);

    Natural value_;
    std::vector<PrimeFactor> factors_;
};

enum class PrimalityMode {
    /// Deterministic below 2^64; above, 2^-128 error bound.
    probable,
    /// Only answers when primality can be proven (deterministic witnesses
    /// below 2^64, bounded trial division above; throws BudgetExceeded when
    /// the proof budget runs out).
    proven,
};

bool is_prime(const Natural& n, PrimalityMode mode = PrimalityMode::probable,
              const FactorConfig& cfg = {});

/// Complete factorization of n >= 1. Trial division first, then recursive
/// randomized splitting with a deterministic retry schedule; throws
/// FactorizationTimeout when the budget is exhausted.
Factorization factorize(const Natural& n, const FactorConfig& cfg = {});

/// All divisors of the factored value in increasing order. `omega_filter`
/// keeps only divisors with exactly that many distinct prime factors.
/// Throws LimitExceeded when more than `budget` divisors would be produced.
std::vector<Natural> divisors(const Factorization& f,
                              std::optional<unsigned> omega_filter = std::nullopt,
                              std::size_t budget = 1'000'000);

Natural euler_phi(const Factorization& f);

/// Exponent of the unit group modulo the factored value.
Natural carmichael_lambda(const Factorization& f);

/// Least e >= 1 with a^e = 1 (mod m). Throws NotAUnit when gcd(a, m) != 1.
/// Preconditions: m >= 2.
Natural multiplicative_order(const Natural& a, const Natural& m,
                             const FactorConfig& cfg = {});

/// True when the multiplicative order of a modulo m is odd.
bool is_odd_order(const Natural& a, const Natural& m,
                  const FactorConfig& cfg = {});

/// Jacobi symbol (a | n) for odd n >= 1. Result is -1, 0 or 1.
int jacobi(const Natural& a, const Natural& n);

/// True when a is a quadratic residue modulo every prime factor of the odd
/// square-free L (vacuously true for L = 1). Throws NotSquarefree when L is
/// not square-free and NotAUnit when gcd(a, L) != 1.
bool is_qr_mod_squarefree(const Natural& a, const Factorization& L);

// ---- small helpers shared across modules ----

/// b^e mod m with m >= 1 (m = 1 gives 0).
Natural modpow(const Natural& base, const Natural& exp, const Natural& mod);

/// Inverse of a modulo m >= 2; throws NotAUnit when gcd(a, m) != 1.
Natural mod_inverse(const Natural& a, const Natural& m);

bool fits_u64(const Natural& n);
std::uint64_t to_u64(const Natural& n);

/// Primes up to and including `bound` (cached, grows monotonically).
std::vector<std::uint32_t> primes_up_to(std::uint32_t bound);

/// Smallest-prime-factor table for 0..limit (spf[0] = spf[1] = 0).
std::vector<std::uint32_t> smallest_factor_sieve(std::uint32_t limit);

/// SplitMix64 step: advances the state and returns the next value.
/// Used wherever deterministic seed derivation is needed.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace carmkit
