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

#include "carmkit/carmichael.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <limits>
#include <thread>

namespace carmkit {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod_u64(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod_u64(u64 base, u64 exp, u64 mod) {
    if (mod == 1) return 0;
    u64 result = 1;
    base %= mod;
    while (exp > 0) {
        if (exp & 1) result = mulmod_u64(result, base, mod);
        base = mulmod_u64(base, base, mod);
        exp >>= 1;
    }
    return result;
}

// Korselt test for odd n in 64-bit range given a smallest-factor table.
// Fills `primes` with the distinct prime factors on success.
bool korselt_u64(u64 n, const std::vector<std::uint32_t>& spf, std::vector<u64>& primes) {
    primes.clear();
    u64 m = n;
    while (m > 1) {
        const u64 p = spf[static_cast<std::size_t>(m)];
        m /= p;
        if (m % p == 0) return false;  // square factor
        if ((n - 1) % (p - 1) != 0) return false;
        primes.push_back(p);
    }
    return primes.size() >= 3;  // composite squarefree Korselt forces omega >= 3
}

KorseltCertificate make_certificate(u64 n, const std::vector<u64>& primes) {
    KorseltCertificate cert;
    cert.n = n;
    std::vector<PrimeFactor> parts;
    for (u64 p : primes) parts.push_back({Natural(p), 1});
    cert.factors = Factorization::from_parts(std::move(parts));
    for (u64 p : primes) cert.witnesses.push_back({Natural(p), Natural((n - 1) / (p - 1))});
    return cert;
}

// Shared chunked parallel driver: applies `scan` to [lo, hi] chunks and
// concatenates results in chunk order, so the output is independent of the
// worker count.
std::vector<u64> parallel_scan(u64 limit, unsigned workers,
                               const std::function<void(u64, u64, std::vector<u64>&)>& scan) {
    constexpr u64 kChunk = 1 << 20;
    const u64 chunks = limit / kChunk + 1;
    std::vector<std::vector<u64>> results(static_cast<std::size_t>(chunks));
    std::atomic<u64> next{0};
    auto worker = [&] {
        for (;;) {
            const u64 c = next.fetch_add(1);
            if (c >= chunks) return;
            const u64 lo = c * kChunk;
            const u64 hi = std::min(limit, lo + kChunk - 1);
            if (lo <= hi) scan(lo, hi, results[static_cast<std::size_t>(c)]);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::vector<u64> merged;
    for (auto& r : results) merged.insert(merged.end(), r.begin(), r.end());
    return merged;
}

std::vector<u64> enumerate_korselt_scan(u64 limit, const EnumConfig& cfg,
                                        const std::vector<std::uint32_t>& spf) {
    auto scan = [&spf](u64 lo, u64 hi, std::vector<u64>& out) {
        std::vector<u64> local_primes;
        u64 n = std::max<u64>(lo, 9);
        if (n % 2 == 0) ++n;
        for (; n <= hi; n += 2) {
            if (spf[static_cast<std::size_t>(n)] == n) continue;  // prime
            if (korselt_u64(n, spf, local_primes)) out.push_back(n);
        }
    };
    return parallel_scan(limit, cfg.workers, scan);
}

std::vector<u64> enumerate_fermat_filter(u64 limit, const EnumConfig& cfg) {
    auto scan = [](u64 lo, u64 hi, std::vector<u64>& out) {
        u64 n = std::max<u64>(lo, 9);
        if (n % 2 == 0) ++n;
        for (; n <= hi; n += 2) {
            bool pseudo = true;
            for (u64 a : {u64{2}, u64{3}, u64{5}, u64{7}}) {
                if (powmod_u64(a, n, n) != a % n) {
                    pseudo = false;
                    break;
                }
            }
            if (!pseudo) continue;
            if (korselt_check(Natural(n)).ok()) out.push_back(n);
        }
    };
    return parallel_scan(limit, cfg.workers, scan);
}

}  // namespace

void KorseltCertificate::validate() const {
    if (factors.value() != n) throw Error("certificate: factorization value mismatch");
    if (!factors.squarefree()) throw Error("certificate: n is not square-free");
    if (factors.omega() < 3) throw Error("certificate: fewer than three prime factors");
    if (witnesses.size() != factors.factors().size()) {
        throw Error("certificate: witness count mismatch");
    }
    for (std::size_t i = 0; i < witnesses.size(); ++i) {
        const auto& w = witnesses[i];
        const auto& pf = factors.factors()[i];
        if (w.prime != pf.prime) throw Error("certificate: witness prime mismatch");
        if (!is_prime(w.prime)) throw Error("certificate: witness is not prime");
        if (w.quotient * (w.prime - 1) != n - 1) {
            throw Error("certificate: quotient does not witness divisibility");
        }
    }
}

KorseltResult korselt_check(const Natural& n, const std::optional<Factorization>& hint,
                            const FactorConfig& cfg) {
    KorseltResult result;
    if (n < 3) {
        result.failure = KorseltFailure::too_small;
        return result;
    }
    Factorization f;
    if (hint) {
        if (hint->value() != n) throw Error("korselt_check: hint does not factor n");
        // Re-validate the hint instead of trusting it.
        f = Factorization::from_parts(hint->factors(), cfg);
    } else {
        f = factorize(n, cfg);
    }
    if (f.omega() == 1 && f.factors()[0].multiplicity == 1) {
        result.failure = KorseltFailure::prime;
        return result;
    }
    if (!f.squarefree()) {
        result.failure = KorseltFailure::not_squarefree;
        return result;
    }
    for (const auto& pf : f.factors()) {
        if ((n - 1) % (pf.prime - 1) != 0) {
            result.failure = KorseltFailure::divisibility_fails;
            result.failing_prime = pf.prime;
            return result;
        }
    }
    KorseltCertificate cert;
    cert.n = n;
    cert.factors = f;
    for (const auto& pf : f.factors()) {
        cert.witnesses.push_back({pf.prime, (n - 1) / (pf.prime - 1)});
    }
    cert.validate();
    result.certificate = std::move(cert);
    return result;
}

bool lambda_check(const Natural& n, const FactorConfig& cfg) {
    if (n < 3) return false;
    const Factorization f = factorize(n, cfg);
    if (f.omega() == 1 && f.factors()[0].multiplicity == 1) return false;
    if (!f.squarefree()) return false;
    return (n - 1) % carmichael_lambda(f) == 0;
}

std::vector<KorseltCertificate> enumerate_carmichael(std::uint64_t limit,
                                                     EnumStrategy strategy,
                                                     const EnumConfig& cfg) {
    if (limit > cfg.limit_cap) throw LimitExceeded("enumerate_carmichael: limit above cap");
    if (limit > std::numeric_limits<std::uint32_t>::max()) {
        throw LimitExceeded("enumerate_carmichael: limit above sieve range");
    }
    std::vector<KorseltCertificate> certs;
    if (limit < 9) return certs;
    const auto spf = smallest_factor_sieve(static_cast<std::uint32_t>(limit));
    const std::vector<u64> hits = strategy == EnumStrategy::korselt_scan
                                      ? enumerate_korselt_scan(limit, cfg, spf)
                                      : enumerate_fermat_filter(limit, cfg);
    certs.reserve(hits.size());
    std::vector<u64> primes;
    for (u64 n : hits) {
        korselt_u64(n, spf, primes);
        certs.push_back(make_certificate(n, primes));
    }
    return certs;
}

std::map<unsigned, std::uint64_t> omega_histogram(std::uint64_t limit, const EnumConfig& cfg) {
    std::map<unsigned, std::uint64_t> histogram;
    for (const auto& cert : enumerate_carmichael(limit, EnumStrategy::korselt_scan, cfg)) {
        ++histogram[cert.factors.omega()];
    }
    return histogram;
}

bool fermat_probe(const Natural& n, const Natural& a) {
    if (n < 2) throw Error("fermat_probe: modulus must be >= 2");
    const Natural r = ((a % n) + n) % n;
    return modpow(r, n, n) == r;
}

}  // namespace carmkit
