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

#include "carmkit/numtheory.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

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

// Deterministic Miller-Rabin for the full 64-bit range.
constexpr u64 kWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {u64{2}, u64{3}, u64{5}, u64{7}}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : kWitnesses) {
        if (a % n == 0) continue;
        u64 x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

u64 gcd_u64(u64 a, u64 b) { return std::gcd(a, b); }

// Brent's cycle-finding variant of the rho splitting step. Returns a
// non-trivial factor of composite odd n, or 0 on failure within the cap.
u64 brent_rho_u64(u64 n, u64 c, u64 iteration_cap) {
    if (n % 2 == 0) return 2;
    u64 y = 2, r = 1, q = 1, g = 1, x = 0, ys = 0;
    u64 spent = 0;
    const u64 m = 128;
    while (g == 1) {
        x = y;
        for (u64 i = 0; i < r; ++i) y = (mulmod_u64(y, y, n) + c) % n;
        for (u64 k = 0; k < r && g == 1; k += m) {
            ys = y;
            const u64 steps = std::min(m, r - k);
            for (u64 i = 0; i < steps; ++i) {
                y = (mulmod_u64(y, y, n) + c) % n;
                q = mulmod_u64(q, x > y ? x - y : y - x, n);
            }
            g = gcd_u64(q, n);
            spent += steps;
            if (spent > iteration_cap) return 0;
        }
        r *= 2;
    }
    if (g == n) {
        // Backtrack one step at a time to recover the factor.
        do {
            ys = (mulmod_u64(ys, ys, n) + c) % n;
            g = gcd_u64(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g == n ? 0 : g;
}

Natural brent_rho_big(const Natural& n, unsigned c, u64 iteration_cap) {
    if (n % 2 == 0) return 2;
    Natural y = 2, x = 0, ys = 0, q = 1, g = 1;
    u64 r = 1, spent = 0;
    const u64 m = 128;
    const Natural cc = c;
    auto step = [&](Natural& v) { v = (v * v + cc) % n; };
    while (g == 1) {
        x = y;
        for (u64 i = 0; i < r; ++i) step(y);
        for (u64 k = 0; k < r && g == 1; k += m) {
            ys = y;
            const u64 steps = std::min(m, r - k);
            for (u64 i = 0; i < steps; ++i) {
                step(y);
                q = q * abs(x - y) % n;
            }
            g = gcd(q, n);
            spent += steps;
            if (spent > iteration_cap) return 0;
        }
        r *= 2;
    }
    if (g == n) {
        do {
            step(ys);
            g = gcd(abs(x - ys), n);
        } while (g == 1);
    }
    return g == n ? Natural(0) : g;
}

struct PrimeCache {
    std::mutex mutex;
    std::uint32_t bound = 0;
    std::vector<std::uint32_t> primes;
};

PrimeCache& prime_cache() {
    static PrimeCache cache;
    return cache;
}

std::vector<std::uint32_t> sieve_primes(std::uint32_t bound) {
    std::vector<bool> composite(static_cast<std::size_t>(bound) + 1, false);
    std::vector<std::uint32_t> primes;
    for (std::uint32_t i = 2; i <= bound; ++i) {
        if (composite[i]) continue;
        primes.push_back(i);
        for (std::uint64_t j = static_cast<std::uint64_t>(i) * i; j <= bound; j += i) {
            composite[static_cast<std::size_t>(j)] = true;
        }
    }
    return primes;
}

// Probabilistic Miller-Rabin above 2^64 with bases derived from the input,
// so repeated calls agree.
bool is_probable_prime_big(const Natural& n, unsigned rounds) {
    Natural d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    u64 state = static_cast<u64>(n % Natural("18446744073709551557"));
    const Natural span = n - 3;
    for (unsigned round = 0; round < rounds; ++round) {
        Natural a = 0;
        const unsigned words = static_cast<unsigned>(msb(span) / 64 + 1);
        for (unsigned w = 0; w < words; ++w) a = (a << 64) | splitmix64(state);
        a = a % span + 2;
        Natural x = powm(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned r = 1; r < s; ++r) {
            x = x * x % n;
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

// Factors m >= 1 that fits in 64 bits; appends primes with multiplicity
// into `out` unsorted.
void factorize_u64(u64 m, const FactorConfig& cfg, std::vector<u64>& out) {
    for (u64 p : {u64{2}, u64{3}, u64{5}}) {
        while (m % p == 0) {
            out.push_back(p);
            m /= p;
        }
    }
    u64 bound = cfg.trial_bound;
    for (u64 p = 7; p * p <= m && p <= bound; p += 2) {
        while (m % p == 0) {
            out.push_back(p);
            m /= p;
        }
    }
    if (m == 1) return;
    if (is_prime_u64(m)) {
        out.push_back(m);
        return;
    }
    for (unsigned c = 1; c <= cfg.rho_retries; ++c) {
        u64 f = brent_rho_u64(m, c, cfg.rho_iteration_cap);
        if (f == 0 || f == m) continue;
        factorize_u64(f, cfg, out);
        factorize_u64(m / f, cfg, out);
        return;
    }
    throw FactorizationTimeout("factorize: splitting budget exhausted");
}

void factorize_big(const Natural& m, const FactorConfig& cfg, std::vector<Natural>& out) {
    if (m == 1) return;
    if (fits_u64(m)) {
        std::vector<u64> small;
        factorize_u64(to_u64(m), cfg, small);
        for (u64 p : small) out.emplace_back(p);
        return;
    }
    if (is_prime(m, PrimalityMode::probable, cfg)) {
        out.push_back(m);
        return;
    }
    for (unsigned c = 1; c <= cfg.rho_retries; ++c) {
        Natural f = brent_rho_big(m, c, cfg.rho_iteration_cap);
        if (f == 0 || f == m) continue;
        factorize_big(f, cfg, out);
        factorize_big(m / f, cfg, out);
        return;
    }
    throw FactorizationTimeout("factorize: splitting budget exhausted");
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool fits_u64(const Natural& n) {
    return n >= 0 && n <= Natural(std::numeric_limits<u64>::max());
}

std::uint64_t to_u64(const Natural& n) { return n.convert_to<u64>(); }

std::vector<std::uint32_t> primes_up_to(std::uint32_t bound) {
    auto& cache = prime_cache();
    std::scoped_lock lock(cache.mutex);
    if (bound > cache.bound) {
        cache.primes = sieve_primes(std::max<std::uint32_t>(bound, 1'000'000));
        cache.bound = std::max<std::uint32_t>(bound, 1'000'000);
    }
    auto end = std::upper_bound(cache.primes.begin(), cache.primes.end(), bound);
    return {cache.primes.begin(), end};
}

std::vector<std::uint32_t> smallest_factor_sieve(std::uint32_t limit) {
    std::vector<std::uint32_t> spf(static_cast<std::size_t>(limit) + 1, 0);
    for (std::uint32_t i = 2; i <= limit; ++i) {
        if (spf[i] != 0) continue;
        for (std::uint64_t j = i; j <= limit; j += i) {
            if (spf[static_cast<std::size_t>(j)] == 0) spf[static_cast<std::size_t>(j)] = i;
        }
    }
    return spf;
}

bool is_prime(const Natural& n, PrimalityMode mode, const FactorConfig& cfg) {
    if (n < 2) return false;
    if (fits_u64(n)) return is_prime_u64(to_u64(n));  // deterministic proof
    if ((n & 1) == 0) return false;
    if (mode == PrimalityMode::probable) return is_probable_prime_big(n, cfg.probable_rounds);
    // Proven mode beyond 64 bits: bounded trial division.
    const Natural root = sqrt(n);
    if (root > cfg.proven_trial_cap) {
        throw BudgetExceeded("is_prime: proven mode exceeds trial division cap");
    }
    const u64 stop = to_u64(root);
    if (n % 3 == 0) return false;
    for (u64 p = 5; p <= stop; p += 6) {
        if (n % p == 0 || n % (p + 2) == 0) return false;
    }
    return true;
}

Factorization::Factorization() : value_(1) {}

Factorization Factorization::from_parts(std::vector<PrimeFactor> factors,
                                        const FactorConfig& cfg) {
    Factorization f;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const auto& pf = factors[i];
        if (pf.multiplicity < 1) throw Error("Factorization: multiplicity must be >= 1");
        if (i > 0 && !(factors[i - 1].prime < pf.prime)) {
            throw Error("Factorization: primes must be strictly increasing");
        }
        if (!is_prime(pf.prime, PrimalityMode::probable, cfg)) {
            throw Error("Factorization: listed factor is not prime");
        }
        for (unsigned e = 0; e < pf.multiplicity; ++e) f.value_ *= pf.prime;
    }
    f.factors_ = std::move(factors);
    return f;
}

bool Factorization::squarefree() const {
    return std::all_of(factors_.begin(), factors_.end(),
                       [](const PrimeFactor& pf) { return pf.multiplicity == 1; });
}

bool Factorization::contains(const Natural& prime) const {
    return std::binary_search(
        factors_.begin(), factors_.end(), prime,
        [](const auto& a, const auto& b) {
            if constexpr (std::is_same_v<std::decay_t<decltype(a)>, PrimeFactor>) {
                return a.prime < b;
            } else {
                return a < b.prime;
            }
        });
}

Factorization factorize(const Natural& n, const FactorConfig& cfg) {
    if (n < 1) throw Error("factorize: argument must be >= 1");
    std::vector<Natural> primes;
    factorize_big(n, cfg, primes);
    std::sort(primes.begin(), primes.end());
    Factorization f;
    f.value_ = n;
    for (std::size_t i = 0; i < primes.size();) {
        std::size_t j = i;
        while (j < primes.size() && primes[j] == primes[i]) ++j;
        f.factors_.push_back({primes[i], static_cast<unsigned>(j - i)});
        i = j;
    }
    return f;
}

std::vector<Natural> divisors(const Factorization& f, std::optional<unsigned> omega_filter,
                              std::size_t budget) {
    std::vector<Natural> result{Natural(1)};
    std::vector<unsigned> omegas{0};
    for (const auto& pf : f.factors()) {
        const std::size_t base = result.size();
        Natural power = 1;
        for (unsigned e = 1; e <= pf.multiplicity; ++e) {
            power *= pf.prime;
            for (std::size_t i = 0; i < base; ++i) {
                if (result.size() >= budget) {
                    throw LimitExceeded("divisors: budget exceeded");
                }
                result.push_back(result[i] * power);
                omegas.push_back(omegas[i] + 1);
            }
        }
    }
    if (omega_filter) {
        std::vector<Natural> kept;
        for (std::size_t i = 0; i < result.size(); ++i) {
            if (omegas[i] == *omega_filter) kept.push_back(result[i]);
        }
        result = std::move(kept);
    }
    std::sort(result.begin(), result.end());
    return result;
}

Natural euler_phi(const Factorization& f) {
    Natural phi = 1;
    for (const auto& pf : f.factors()) {
        Natural power = pf.prime - 1;
        for (unsigned e = 1; e < pf.multiplicity; ++e) power *= pf.prime;
        phi *= power;
    }
    return phi;
}

Natural carmichael_lambda(const Factorization& f) {
    Natural result = 1;
    for (const auto& pf : f.factors()) {
        Natural component;
        if (pf.prime == 2) {
            if (pf.multiplicity == 1) component = 1;
            else if (pf.multiplicity == 2) component = 2;
            else component = Natural(1) << (pf.multiplicity - 2);
        } else {
            component = pf.prime - 1;
            for (unsigned e = 1; e < pf.multiplicity; ++e) component *= pf.prime;
        }
        result = lcm(result, component);
    }
    return result;
}

Natural multiplicative_order(const Natural& a, const Natural& m, const FactorConfig& cfg) {
    if (m < 2) throw Error("multiplicative_order: modulus must be >= 2");
    const Natural r = ((a % m) + m) % m;
    if (gcd(r, m) != 1) throw NotAUnit("multiplicative_order: gcd(a, m) != 1");
    const Natural lam = carmichael_lambda(factorize(m, cfg));
    Natural order = lam;
    const Factorization lam_factors = factorize(lam, cfg);
    for (const auto& pf : lam_factors.factors()) {
        for (unsigned e = 0; e < pf.multiplicity; ++e) {
            if (order % pf.prime != 0) break;
            const Natural candidate = order / pf.prime;
            if (powm(r, candidate, m) == 1) order = candidate;
            else break;
        }
    }
    return order;
}

bool is_odd_order(const Natural& a, const Natural& m, const FactorConfig& cfg) {
    return (multiplicative_order(a, m, cfg) & 1) == 1;
}

int jacobi(const Natural& a_in, const Natural& n_in) {
    if (n_in < 1 || (n_in & 1) == 0) throw Error("jacobi: modulus must be odd and positive");
    Natural a = a_in % n_in;
    if (a < 0) a += n_in;
    Natural n = n_in;
    int sign = 1;
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            const unsigned r = static_cast<unsigned>(n % 8);
            if (r == 3 || r == 5) sign = -sign;
        }
        std::swap(a, n);
        if ((a % 4) == 3 && (n % 4) == 3) sign = -sign;
        a %= n;
    }
    return n == 1 ? sign : 0;
}

bool is_qr_mod_squarefree(const Natural& a, const Factorization& L) {
    if (!L.squarefree()) throw NotSquarefree("is_qr_mod_squarefree: L must be square-free");
    if ((L.value() & 1) == 0) throw Error("is_qr_mod_squarefree: L must be odd");
    if (gcd(a % L.value(), L.value()) != 1 && L.value() != 1) {
        throw NotAUnit("is_qr_mod_squarefree: gcd(a, L) != 1");
    }
    for (const auto& pf : L.factors()) {
        const Natural& q = pf.prime;
        if (powm(a % q, (q - 1) / 2, q) != 1) return false;
    }
    return true;
}

Natural modpow(const Natural& base, const Natural& exp, const Natural& mod) {
    if (mod < 1) throw Error("modpow: modulus must be >= 1");
    if (mod == 1) return 0;
    Natural b = base % mod;
    if (b < 0) b += mod;
    return powm(b, exp, mod);
}

Natural mod_inverse(const Natural& a, const Natural& m) {
    if (m < 2) throw Error("mod_inverse: modulus must be >= 2");
    Natural r0 = m, r1 = ((a % m) + m) % m;
    Natural t0 = 0, t1 = 1;
    while (r1 != 0) {
        const Natural q = r0 / r1;
        r0 -= q * r1;
        std::swap(r0, r1);
        t0 -= q * t1;
        std::swap(t0, t1);
    }
    if (r0 != 1) throw NotAUnit("mod_inverse: gcd(a, m) != 1");
    return ((t0 % m) + m) % m;
}

}  // namespace carmkit
