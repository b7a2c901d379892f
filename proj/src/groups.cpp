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

#include "carmkit/groups.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <unordered_set>

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

void check_element(const AbelianGroupSpec& G, const GroupElement& g, const char* who) {
    if (g.coords.size() != G.rank()) throw Error(std::string(who) + ": coordinate rank mismatch");
    for (std::size_t i = 0; i < g.coords.size(); ++i) {
        if (g.coords[i] >= G.cyclic_orders()[i]) {
            throw Error(std::string(who) + ": coordinate out of range");
        }
    }
}

}  // namespace

AbelianGroupSpec::AbelianGroupSpec(std::vector<std::uint64_t> orders) : orders_(std::move(orders)) {
    for (u64 n : orders_) {
        if (n < 2) throw Error("AbelianGroupSpec: cyclic orders must be >= 2");
    }
}

std::uint64_t AbelianGroupSpec::order() const {
    u128 product = 1;
    for (u64 n : orders_) {
        product *= n;
        if (product > std::numeric_limits<u64>::max()) {
            throw GroupTooLarge("AbelianGroupSpec: order exceeds 64 bits");
        }
    }
    return static_cast<u64>(product);
}

std::uint64_t AbelianGroupSpec::exponent() const {
    u64 result = 1;
    for (u64 n : orders_) result = std::lcm(result, n);
    return result;
}

std::vector<std::uint64_t> AbelianGroupSpec::invariant_factors() const {
    std::map<u64, std::vector<unsigned>> exponents_by_prime;
    std::size_t rank = 0;
    for (u64 n : orders_) {
        const Factorization f = factorize(Natural(n));
        for (const auto& pf : f.factors()) {
            exponents_by_prime[to_u64(pf.prime)].push_back(pf.multiplicity);
        }
    }
    for (auto& [p, exps] : exponents_by_prime) {
        std::sort(exps.begin(), exps.end(), std::greater<>());
        rank = std::max(rank, exps.size());
    }
    std::vector<u64> factors(rank, 1);  // factors[0] = largest invariant factor
    for (const auto& [p, exps] : exponents_by_prime) {
        for (std::size_t i = 0; i < exps.size(); ++i) {
            for (unsigned e = 0; e < exps[i]; ++e) factors[i] *= p;
        }
    }
    std::reverse(factors.begin(), factors.end());
    return factors;
}

GroupElement AbelianGroupSpec::identity() const {
    return GroupElement{std::vector<u64>(orders_.size(), 0)};
}

GroupElement AbelianGroupSpec::add(const GroupElement& a, const GroupElement& b) const {
    check_element(*this, a, "add");
    check_element(*this, b, "add");
    GroupElement out = identity();
    for (std::size_t i = 0; i < orders_.size(); ++i) {
        out.coords[i] = (a.coords[i] + b.coords[i]) % orders_[i];
    }
    return out;
}

GroupElement AbelianGroupSpec::negate(const GroupElement& a) const {
    check_element(*this, a, "negate");
    GroupElement out = identity();
    for (std::size_t i = 0; i < orders_.size(); ++i) {
        out.coords[i] = (orders_[i] - a.coords[i]) % orders_[i];
    }
    return out;
}

std::uint64_t AbelianGroupSpec::index_of(const GroupElement& g) const {
    check_element(*this, g, "index_of");
    u64 index = 0;
    for (std::size_t i = 0; i < orders_.size(); ++i) index = index * orders_[i] + g.coords[i];
    return index;
}

GroupElement AbelianGroupSpec::element_at(std::uint64_t index) const {
    GroupElement g = identity();
    for (std::size_t i = orders_.size(); i-- > 0;) {
        g.coords[i] = index % orders_[i];
        index /= orders_[i];
    }
    return g;
}

RationalPhase RationalPhase::of(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw Error("RationalPhase: zero denominator");
    num %= den;
    const u64 g = std::gcd(num, den);
    return RationalPhase{num / g, den / g};
}

RationalPhase RationalPhase::times(const RationalPhase& other) const {
    const u64 common = std::lcm(den, other.den);
    const u128 sum = static_cast<u128>(num) * (common / den) +
                     static_cast<u128>(other.num) * (common / other.den);
    return of(static_cast<u64>(sum % common), common);
}

RationalPhase evaluate_character(const AbelianGroupSpec& G, const CharacterSpec& chi,
                                 const GroupElement& g) {
    check_element(G, g, "evaluate_character");
    if (chi.exponents.size() != G.rank()) throw Error("evaluate_character: exponent rank mismatch");
    const u64 N = G.exponent();
    u128 acc = 0;
    for (std::size_t i = 0; i < G.rank(); ++i) {
        const u64 n = G.cyclic_orders()[i];
        acc += static_cast<u128>(chi.exponents[i] % n) * (g.coords[i] % n) % n * (N / n);
    }
    return RationalPhase::of(static_cast<u64>(acc % N), N);
}

std::uint64_t character_order(const AbelianGroupSpec& G, const CharacterSpec& chi) {
    if (chi.exponents.size() != G.rank()) throw Error("character_order: exponent rank mismatch");
    u64 order = 1;
    for (std::size_t i = 0; i < G.rank(); ++i) {
        const u64 n = G.cyclic_orders()[i];
        order = std::lcm(order, n / std::gcd(chi.exponents[i] % n, n));
    }
    return order;
}

std::vector<CharacterSpec> characters(const AbelianGroupSpec& G, std::uint64_t budget) {
    const u64 count = G.order();
    if (count > budget) throw GroupTooLarge("characters: group order above budget");
    std::vector<CharacterSpec> out;
    out.reserve(static_cast<std::size_t>(count));
    for (u64 index = 0; index < count; ++index) {
        out.push_back(CharacterSpec{G.element_at(index).coords});
    }
    return out;
}

// ---- exact cyclotomic arithmetic ----

namespace {

using Poly = std::vector<boost::multiprecision::cpp_int>;  // coeff[i] on x^i

Poly poly_divide_exact(const Poly& num, const Poly& den) {
    Poly rem = num;
    Poly quot(num.size() >= den.size() ? num.size() - den.size() + 1 : 0);
    const std::size_t d = den.size() - 1;
    for (std::size_t i = rem.size(); i-- > d;) {
        if (rem[i] == 0) continue;
        const auto c = rem[i] / den[d];  // den is monic in our uses
        quot[i - d] = c;
        for (std::size_t j = 0; j <= d; ++j) rem[i - d + j] -= c * den[j];
    }
    for (const auto& c : rem) {
        if (c != 0) throw Error("poly_divide_exact: non-zero remainder");
    }
    while (quot.size() > 1 && quot.back() == 0) quot.pop_back();
    return quot;
}

const Poly& cyclotomic_polynomial(u64 n) {
    static std::map<u64, Poly> cache;
    static std::mutex mutex;
    std::scoped_lock lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    // x^n - 1 divided by the product of cyclotomic polynomials of the
    // proper divisors of n.
    Poly numerator(static_cast<std::size_t>(n) + 1);
    numerator[0] = -1;
    numerator[static_cast<std::size_t>(n)] = 1;
    Poly result = numerator;
    for (u64 d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        // Recursion depth is at most the divisor count; compute iteratively
        // in ascending order so dependencies are already cached.
        if (cache.find(d) == cache.end()) {
            Poly num_d(static_cast<std::size_t>(d) + 1);
            num_d[0] = -1;
            num_d[static_cast<std::size_t>(d)] = 1;
            Poly res_d = num_d;
            for (u64 e = 1; e < d; ++e) {
                if (d % e == 0) res_d = poly_divide_exact(res_d, cache.at(e));
            }
            cache.emplace(d, std::move(res_d));
        }
        result = poly_divide_exact(result, cache.at(d));
    }
    return cache.emplace(n, std::move(result)).first->second;
}

}  // namespace

CyclotomicSum::CyclotomicSum(std::uint64_t level) : level_(level) {
    if (level < 1) throw Error("CyclotomicSum: level must be >= 1");
    coeff_.resize(static_cast<std::size_t>(level));
}

void CyclotomicSum::add_root(const RationalPhase& phase) {
    if (level_ % phase.den != 0) throw Error("CyclotomicSum: phase order does not divide level");
    coeff_[static_cast<std::size_t>(phase.num * (level_ / phase.den))] += 1;
}

void CyclotomicSum::add(const CyclotomicSum& other) {
    if (other.level_ != level_) throw Error("CyclotomicSum: level mismatch");
    for (std::size_t i = 0; i < coeff_.size(); ++i) coeff_[i] += other.coeff_[i];
}

bool CyclotomicSum::is_zero() const {
    Poly rem(coeff_.begin(), coeff_.end());
    const Poly& phi = cyclotomic_polynomial(level_);
    const std::size_t d = phi.size() - 1;
    for (std::size_t i = rem.size(); i-- > d && i < rem.size();) {
        if (rem[i] == 0) continue;
        const auto c = rem[i];  // phi is monic
        for (std::size_t j = 0; j <= d; ++j) rem[i - d + j] -= c * phi[j];
    }
    return std::all_of(rem.begin(), rem.end(),
                       [](const auto& c) { return c == 0; });
}

bool CyclotomicSum::is_integer(std::int64_t v) const {
    CyclotomicSum shifted = *this;
    shifted.coeff_[0] -= v;
    return shifted.is_zero();
}

// ---- unit group structure ----

UnitGroupStructure unit_group_structure(const Factorization& L, std::uint64_t dlog_budget,
                                        const FactorConfig& cfg) {
    if (!L.squarefree()) throw NotSquarefree("unit_group_structure: L must be square-free");
    UnitGroupStructure s;
    s.modulus_ = L.value();
    std::vector<u64> orders;
    for (const auto& pf : L.factors()) {
        if (!fits_u64(pf.prime) || pf.prime > (Natural(1) << 32)) {
            throw GroupTooLarge("unit_group_structure: prime factor above small-modulus range");
        }
        const u64 q = to_u64(pf.prime);
        if (q == 2) continue;  // trivial unit group
        const u64 qm1 = q - 1;
        const Factorization f = factorize(Natural(qm1), cfg);
        // Smallest primitive root modulo q.
        u64 root = 0;
        for (u64 g = 2; g < q; ++g) {
            bool primitive = true;
            for (const auto& qf : f.factors()) {
                if (powmod_u64(g, qm1 / to_u64(qf.prime), q) == 1) {
                    primitive = false;
                    break;
                }
            }
            if (primitive) {
                root = g;
                break;
            }
        }
        for (const auto& qf : f.factors()) {
            u64 c = 1;
            for (unsigned e = 0; e < qf.multiplicity; ++e) c *= to_u64(qf.prime);
            if (c > dlog_budget) {
                throw DiscreteLogBudget("unit_group_structure: component above dlog budget");
            }
            UnitGroupStructure::Component comp;
            comp.q = q;
            comp.order = c;
            comp.cofactor = qm1 / c;
            comp.generator = powmod_u64(root, comp.cofactor, q);
            s.components_.push_back(comp);
            orders.push_back(c);
        }
    }
    s.spec_ = AbelianGroupSpec(orders);
    return s;
}

GroupElement UnitGroupStructure::embed(const Natural& u) const {
    if (gcd(((u % modulus_) + modulus_) % modulus_, modulus_) != 1 && modulus_ != 1) {
        throw NotAUnit("embed: gcd(u, L) != 1");
    }
    GroupElement g = spec_.identity();
    for (std::size_t i = 0; i < components_.size(); ++i) {
        const auto& comp = components_[i];
        const u64 residue = to_u64(((u % comp.q) + comp.q) % comp.q);
        const u64 target = powmod_u64(residue, comp.cofactor, comp.q);
        u64 current = 1, j = 0;
        while (current != target) {
            current = mulmod_u64(current, comp.generator, comp.q);
            if (++j >= comp.order) throw Error("embed: discrete log not found");
        }
        g.coords[i] = j;
    }
    return g;
}

// ---- Davenport constant ----

namespace {

// Breadth-first search over achievable subset-sum sets of zero-sum-free
// sequences. The group is rewritten in invariant-factor coordinates with
// the largest factor last, so states are rows of bits and translation by a
// group element is a row permutation plus a bit rotation per row.
class DavenportSearch {
  public:
    DavenportSearch(const std::vector<u64>& invariants, const DavenportConfig& cfg)
        : cfg_(cfg), dims_(invariants) {
        last_ = dims_.back();
        rows_ = 1;
        for (std::size_t i = 0; i + 1 < dims_.size(); ++i) rows_ *= dims_[i];
        row_words_ = (last_ + 63) / 64;
        words_ = rows_ * row_words_;
        // Row permutations for every quotient element.
        row_perm_.resize(rows_);
        for (u64 q = 0; q < rows_; ++q) {
            row_perm_[q].resize(rows_);
            for (u64 i = 0; i < rows_; ++i) {
                row_perm_[q][i] = static_cast<std::uint32_t>(quotient_add(i, q));
            }
        }
        // Bit positions that hold real group elements (skips row padding and
        // the identity, whose column would cover every state).
        for (u64 w = 0; w < words_; ++w) {
            u64 valid = span_mask(w);
            while (valid) {
                const unsigned b = std::countr_zero(valid);
                valid &= valid - 1;
                if (w * 64 + b == 0) continue;
                positions_.push_back(static_cast<std::uint32_t>(w * 64 + b));
            }
        }
    }

    // Returns the exact Davenport constant, starting from a proven lower
    // bound best_init on the longest zero-sum-free sequence (pass 0 for a
    // fully exhaustive run).
    unsigned run(unsigned best_init) {
        std::vector<std::vector<u64>> frontier{std::vector<u64>(words_, 0)};
        unsigned depth = 0;
        unsigned best = best_init;
        while (!frontier.empty()) {
            frontier = advance(frontier, depth, best);
            if (frontier.empty()) break;
            ++depth;
            best = std::max(best, depth);
            if (frontier.size() > cfg_.max_frontier) {
                throw GroupTooLarge("davenport_exact: search frontier above budget");
            }
        }
        return std::max(best_init, depth) + 1;
    }

  private:
    u64 quotient_add(u64 a, u64 b) const {
        u64 result = 0;
        for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
            std::size_t idx = dims_.size() - 2 - i;
            const u64 n = dims_[idx];
            const u64 c = (a % n + b % n) % n;
            a /= n;
            b /= n;
            result += c * stride(idx);
        }
        return result;
    }

    u64 stride(std::size_t idx) const {
        u64 s = 1;
        for (std::size_t i = idx + 1; i + 1 < dims_.size(); ++i) s *= dims_[i];
        return s;
    }

    bool test_bit(const std::vector<u64>& state, u64 row, u64 bit) const {
        return (state[row * row_words_ + bit / 64] >> (bit % 64)) & 1;
    }

    void set_bit(std::vector<u64>& state, u64 row, u64 bit) const {
        state[row * row_words_ + bit / 64] |= u64{1} << (bit % 64);
    }

    // dst |= rotate_left(src_row, shift) within a width of last_ bits:
    // ((V << s) | (V >> (width - s))) masked to the width.
    void or_rotated_row(const u64* src, u64* dst, u64 shift) const {
        shift %= last_;
        const u64 W = row_words_;
        if (shift == 0) {
            for (u64 i = 0; i < W; ++i) dst[i] |= src[i];
            return;
        }
        const u64 s = shift, t = last_ - shift;
        const u64 ws = s / 64, bs = s % 64;
        const u64 wt = t / 64, bt = t % 64;
        const u64 top_mask = (last_ % 64) ? ((u64{1} << (last_ % 64)) - 1)
                                          : ~u64{0};
        for (u64 i = 0; i < W; ++i) {
            u64 word = 0;
            if (i >= ws) {
                word |= src[i - ws] << bs;
                if (bs != 0 && i >= ws + 1) word |= src[i - ws - 1] >> (64 - bs);
            }
            if (i + wt < W) {
                word |= src[i + wt] >> bt;
                if (bt != 0 && i + wt + 1 < W) word |= src[i + wt + 1] << (64 - bt);
            }
            if (i + 1 == W) word &= top_mask;
            dst[i] |= word;
        }
    }

    struct StateHash {
        std::size_t operator()(const std::vector<u64>& s) const {
            u64 h = 0x9e3779b97f4a7c15ULL;
            for (u64 w : s) {
                h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
                h *= 0xff51afd7ed558ccdULL;
            }
            return static_cast<std::size_t>(h);
        }
    };

    std::vector<std::vector<u64>> advance(const std::vector<std::vector<u64>>& frontier,
                                          unsigned depth, unsigned best) {
        const u64 order = rows_ * last_;
        std::unordered_set<std::vector<u64>, StateHash> seen;
        std::vector<u64> next(words_);
        for (const auto& state : frontier) {
            for (u64 grow = 0; grow < rows_; ++grow) {
                const auto& perm = row_perm_[grow];
                const u64 neg_row = quotient_negate(grow);
                for (u64 gbit = 0; gbit < last_; ++gbit) {
                    if (grow == 0 && gbit == 0) continue;  // identity excluded
                    // Zero sum appears iff -g is already achievable.
                    const u64 neg_bit = (last_ - gbit) % last_;
                    if (test_bit(state, neg_row, neg_bit)) continue;
                    next = state;
                    for (u64 r = 0; r < rows_; ++r) {
                        or_rotated_row(state.data() + r * row_words_,
                                       next.data() + perm[r] * row_words_, gbit);
                    }
                    set_bit(next, grow, gbit);
                    // Every further element adds at least one new achievable
                    // sum and 0 stays excluded, so at most order-1-|sums|
                    // extensions remain. Drop states that cannot beat the
                    // best depth known so far.
                    work_ += 1 + words_ / 8;
                    if (work_ > cfg_.max_work) {
                        throw GroupTooLarge("davenport_exact: search work above budget");
                    }
                    const std::size_t pc = popcount(next);
                    if (depth + 1 + (order - 1 - pc) <= best) continue;
                    seen.insert(next);
                    if (seen.size() > 4 * cfg_.max_frontier) {
                        throw GroupTooLarge("davenport_exact: candidate set above budget");
                    }
                }
            }
        }
        // Bucket by popcount: a strict subset always has a smaller count.
        std::vector<std::vector<std::vector<u64>>> buckets(order);
        for (auto it = seen.begin(); it != seen.end();) {
            auto node = seen.extract(it++);
            const std::size_t pc = popcount(node.value());
            buckets[pc - 1].push_back(std::move(node.value()));
        }
        // Keep only inclusion-minimal subset-sum sets: a superset can never
        // be extended further than its subset. For the dominated test, pick
        // probe positions absent from the candidate; any dominator must
        // avoid them too. not_containing[x] is a bitmap of kept-state ids
        // whose sum set misses element x; probing the rarest columns first
        // empties the intersection fastest.
        std::vector<std::vector<u64>> kept;
        std::vector<std::vector<u64>> not_containing(words_ * 64);
        std::vector<std::uint32_t> col_count(words_ * 64, 0);
        const auto id_words = [&] { return (kept.size() + 63) / 64; };
        std::vector<std::uint32_t> priority = positions_;
        std::vector<u64> acc;
        for (auto& bucket : buckets) {
            // States in one bucket cannot dominate each other, so the kept
            // prefix from earlier buckets is the full dominator pool.
            const std::size_t pool = kept.size();
            const std::size_t pool_words = (pool + 63) / 64;
            std::sort(priority.begin(), priority.end(),
                      [&](std::uint32_t a, std::uint32_t b) { return col_count[a] < col_count[b]; });
            for (auto& c : bucket) {
                bool dominated = false;
                if (pool > 0) {
                    acc.assign(pool_words, ~u64{0});
                    if (pool % 64 != 0) acc.back() = (u64{1} << (pool % 64)) - 1;
                    int probes = 0;
                    u64 live = 1;
                    for (std::uint32_t x : priority) {
                        if (probes >= 4 || live == 0) break;
                        if ((c[x / 64] >> (x % 64)) & 1) continue;
                        const auto& column = not_containing[x];
                        live = 0;
                        for (std::size_t i = 0; i < pool_words; ++i) {
                            acc[i] &= i < column.size() ? column[i] : 0;
                            live |= acc[i];
                        }
                        ++probes;
                    }
                    work_ += 1 + probes * (pool_words / 8 + 1);
                    for (std::size_t i = 0; i < pool_words && !dominated; ++i) {
                        u64 ids = acc[i];
                        while (ids) {
                            const unsigned b = std::countr_zero(ids);
                            ids &= ids - 1;
                            work_ += 1 + words_ / 8;
                            if (is_subset(kept[i * 64 + b], c)) {
                                dominated = true;
                                break;
                            }
                        }
                    }
                    if (work_ > cfg_.max_work) {
                        throw GroupTooLarge("davenport_exact: search work above budget");
                    }
                }
                if (dominated) continue;
                const std::size_t id = kept.size();
                kept.push_back(std::move(c));
                const auto& s = kept.back();
                for (u64 w = 0; w < words_; ++w) {
                    u64 missing = ~s[w] & span_mask(w);
                    while (missing) {
                        const unsigned b = std::countr_zero(missing);
                        missing &= missing - 1;
                        auto& column = not_containing[w * 64 + b];
                        if (column.size() < id_words()) column.resize(id_words(), 0);
                        column[id / 64] |= u64{1} << (id % 64);
                        ++col_count[w * 64 + b];
                    }
                }
            }
        }
        return kept;
    }

    // Mask of valid (non padding) bits inside word w.
    u64 span_mask(u64 w) const {
        const u64 row_bit = (w % row_words_) * 64;
        if (row_bit + 64 <= last_) return ~u64{0};
        if (row_bit >= last_) return 0;
        return (u64{1} << (last_ - row_bit)) - 1;
    }

    u64 quotient_negate(u64 a) const {
        u64 result = 0;
        for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
            std::size_t idx = dims_.size() - 2 - i;
            const u64 n = dims_[idx];
            const u64 c = (n - a % n) % n;
            a /= n;
            result += c * stride(idx);
        }
        return result;
    }

    static std::size_t popcount(const std::vector<u64>& state) {
        std::size_t total = 0;
        for (u64 w : state) total += std::popcount(w);
        return total;
    }

    static bool is_subset(const std::vector<u64>& a, const std::vector<u64>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] & ~b[i]) return false;
        }
        return true;
    }

    DavenportConfig cfg_;
    std::vector<u64> dims_;
    std::vector<std::uint32_t> positions_;
    u64 work_ = 0;
    u64 last_ = 0, rows_ = 0, row_words_ = 0, words_ = 0;
    std::vector<std::vector<std::uint32_t>> row_perm_;
};

bool is_prime_power_list(const std::vector<u64>& invariants) {
    Natural base = 0;
    for (u64 d : invariants) {
        const Factorization f = factorize(Natural(d));
        if (f.omega() != 1) return false;
        if (base == 0) base = f.factors()[0].prime;
        else if (f.factors()[0].prime != base) return false;
    }
    return true;
}

}  // namespace

unsigned davenport_exact(const AbelianGroupSpec& G, const DavenportConfig& cfg) {
    const u64 order = G.order();
    if (order > cfg.max_order) throw GroupTooLarge("davenport_exact: order above cap");
    if (order == 1) return 1;
    const std::vector<u64> invariants = G.invariant_factors();
    u64 chain_bound = 1;  // 1 + sum (d_i - 1): realized by basis elements
    for (u64 d : invariants) chain_bound += d - 1;
    if (!cfg.force_search) {
        // Prefix sums of any |G| elements repeat a value, so a consecutive
        // block sums to zero: D(G) <= |G|. With the chain lower bound this
        // pins cyclic groups without any search.
        if (chain_bound == order) return static_cast<unsigned>(order);
        // D(G) = 1 + sum (d_i - 1) holds for p-groups and for rank <= 2
        // (Olson 1969); the search reproduces both on small instances.
        if (is_prime_power_list(invariants)) return static_cast<unsigned>(chain_bound);
        if (invariants.size() == 2) return static_cast<unsigned>(chain_bound);
    }
    // In the general case the search starts from the basis-chain lower
    // bound: taking d_i - 1 copies of each basis element is zero-sum-free
    // (any non-empty subset has some coordinate in [1, d_i - 1]). A forced
    // search starts from zero and verifies everything exhaustively.
    const unsigned best_init = cfg.force_search ? 0 : static_cast<unsigned>(chain_bound - 1);
    return DavenportSearch(invariants, cfg).run(best_init);
}

Natural davenport_bound(const Factorization& L, BoundReading reading) {
    const Natural lambda = carmichael_lambda(L);
    const Natural size = reading == BoundReading::phi ? euler_phi(L) : L.value();
    const long double lam = lambda.convert_to<long double>();
    const long double ratio = size.convert_to<long double>() / lam;
    const long double value = lam * (1.0L + std::log(ratio)) + 1.0L;
    return Natural(static_cast<boost::multiprecision::cpp_int>(ceill(value)));
}

std::uint64_t count_subsequences_with_product(const AbelianGroupSpec& G,
                                              const std::vector<GroupElement>& S,
                                              const GroupElement& g, unsigned t) {
    if (S.size() > 24) throw TooLong("count_subsequences_with_product: sequence above 24 terms");
    check_element(G, g, "count_subsequences_with_product");
    for (const auto& e : S) check_element(G, e, "count_subsequences_with_product");
    u64 count = 0;
    // Depth-first over take/skip decisions with the running sum.
    auto visit = [&](auto&& self, std::size_t i, const GroupElement& sum, unsigned len) -> void {
        if (i == S.size()) {
            if (len >= 1 && len <= t && sum == g) ++count;
            return;
        }
        self(self, i + 1, sum, len);
        if (len < t) self(self, i + 1, G.add(sum, S[i]), len + 1);
    };
    visit(visit, 0, G.identity(), 0);
    return count;
}

}  // namespace carmkit
