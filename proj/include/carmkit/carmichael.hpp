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
#include <map>
#include <optional>
#include <vector>

#include "carmkit/numtheory.hpp"

namespace carmkit {

/// Why a number fails the Korselt criterion.
enum class KorseltFailure {
    prime,               // n is prime (criterion requires composite)
    not_squarefree,      // some p^2 divides n
    divisibility_fails,  // some p | n with (p - 1) not dividing (n - 1)
    too_small,           // n < 3
};

/// One verified divisibility witness: prime p | n with quotient
/// (n - 1) / (p - 1).
struct KorseltWitness {
    Natural prime;
    Natural quotient;

    bool operator==(const KorseltWitness&) const = default;
};

/// Self-contained proof that n is a Carmichael number: the square-free
/// factorization plus one witness per prime factor. Carries at least three
/// prime factors (tested at construction, not assumed).
struct KorseltCertificate {
    Natural n;
    Factorization factors;
    std::vector<KorseltWitness> witnesses;

    /// Recomputes every claim in the certificate; throws Error on any
    /// mismatch (wrong product, repeated prime, bad quotient, omega < 3).
    void validate() const;

    bool operator==(const KorseltCertificate&) const = default;
};

struct KorseltResult {
    std::optional<KorseltCertificate> certificate;
    std::optional<KorseltFailure> failure;
    /// Set when failure == divisibility_fails: the smallest offending prime.
    std::optional<Natural> failing_prime;

    bool ok() const { return certificate.has_value(); }
};

/// Decides the Korselt criterion for n. An optional pre-computed
/// factorization skips the factoring step; it is re-validated, never
/// trusted. Inputs below 3 report too_small.
KorseltResult korselt_check(const Natural& n,
                            const std::optional<Factorization>& hint = std::nullopt,
                            const FactorConfig& cfg = {});

/// Equivalent formulation through the unit-group exponent: n is composite,
/// square-free and lambda(n) | n - 1.
bool lambda_check(const Natural& n, const FactorConfig& cfg = {});

enum class EnumStrategy {
    /// Sieve-driven scan applying the Korselt criterion to every odd
    /// composite up to the limit.
    korselt_scan,
    /// Fermat pre-screen (a^n = a mod n for a in {2, 3, 5, 7}) followed by a
    /// Korselt confirmation of the survivors.
    fermat_filter,
};

struct EnumConfig {
    /// Hard ceiling on the enumeration limit.
    std::uint64_t limit_cap = 10'000'000;
    /// Worker threads for the scan. The chunk layout is fixed, so the
    /// result does not depend on this value.
    unsigned workers = 1;
};

/// All Carmichael numbers <= limit in increasing order, each with its
/// certificate. Both strategies return identical lists.
std::vector<KorseltCertificate> enumerate_carmichael(
    std::uint64_t limit, EnumStrategy strategy = EnumStrategy::korselt_scan,
    const EnumConfig& cfg = {});

/// Distribution of the prime-factor count omega over all Carmichael numbers
/// <= limit.
std::map<unsigned, std::uint64_t> omega_histogram(std::uint64_t limit,
                                                  const EnumConfig& cfg = {});

/// Fermat probe: a^n = a (mod n).
bool fermat_probe(const Natural& n, const Natural& a);

}  // namespace carmkit
