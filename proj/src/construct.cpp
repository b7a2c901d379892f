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

#include "carmkit/construct.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "carmkit/groups.hpp"

namespace carmkit {

namespace {

Natural gcd_nat(const Natural& a, const Natural& b) {
    return boost::multiprecision::gcd(a, b);
}

unsigned ord2(Natural n) {
    unsigned v = 0;
    while (n != 0 && n % 2 == 0) {
        n /= 2;
        ++v;
    }
    return v;
}

std::string nat_str(const Natural& n) { return n.str(); }

}  // namespace

// ---------------------------------------------------------------------------
// SizeConstraint / TargetSpec
// ---------------------------------------------------------------------------

bool SizeConstraint::admits(std::size_t size) const {
    if (kind == Kind::exact) return size == exact;
    return modulus != 0 && size % modulus == residue;
}

void SizeConstraint::validate() const {
    if (kind == Kind::congruence && (modulus == 0 || residue >= modulus)) {
        throw Error("SizeConstraint: congruence needs 0 <= a < h");
    }
}

void TargetSpec::validate() const {
    if (modulus < 2) throw Error("TargetSpec: modulus must be >= 2");
    if (gcd_nat(residue, modulus) != 1) {
        throw NotAUnit("TargetSpec: residue must be a unit modulo the modulus");
    }
    size.validate();
}

bool TargetSpec::admits_size(std::size_t s) const {
    if (!size.admits(s)) return false;
    switch (parity) {
        case ParityRequirement::none: return true;
        case ParityRequirement::even: return s % 2 == 0;
        case ParityRequirement::odd: return s % 2 == 1;
    }
    return false;
}

// ---------------------------------------------------------------------------
// PrimePool
// ---------------------------------------------------------------------------

PrimePool::PrimePool(Factorization L, Natural k, std::vector<PoolEntry> entries,
                     std::vector<Natural> pinned, const FactorConfig& cfg)
    : mode_(PoolMode::agp),
      L_(std::move(L)),
      k_(std::move(k)),
      entries_(std::move(entries)),
      pinned_(std::move(pinned)) {
    validate(cfg);
}

PrimePool::PrimePool(Natural M, std::vector<PoolEntry> entries, std::vector<Natural> pinned,
                     const FactorConfig& cfg)
    : mode_(PoolMode::erdos),
      M_(std::move(M)),
      entries_(std::move(entries)),
      pinned_(std::move(pinned)) {
    validate(cfg);
}

const Factorization& PrimePool::L() const {
    if (mode_ != PoolMode::agp) throw Error("PrimePool: L is only defined in agp mode");
    return L_;
}

const Natural& PrimePool::k() const {
    if (mode_ != PoolMode::agp) throw Error("PrimePool: k is only defined in agp mode");
    return k_;
}

const Natural& PrimePool::M() const {
    if (mode_ != PoolMode::erdos) throw Error("PrimePool: M is only defined in erdos mode");
    return M_;
}

Natural PrimePool::working_modulus() const {
    return mode_ == PoolMode::agp ? Natural(L_.value() * k_) : M_;
}

void PrimePool::validate(const FactorConfig& cfg) const {
    if (mode_ == PoolMode::agp) {
        if (k_ < 1) throw Error("PrimePool: k must be >= 1");
        if (gcd_nat(k_, L_.value()) != 1) throw Error("PrimePool: gcd(k, L) must be 1");
    } else {
        if (M_ < 2 || M_ % 2 != 0) throw Error("PrimePool: erdos modulus must be even");
    }
    const Natural wm = working_modulus();
    Natural prev = 0;
    for (const PoolEntry& e : entries_) {
        if (e.p <= prev) throw Error("PrimePool: entries must be sorted by p without duplicates");
        prev = e.p;
        if (!is_prime(e.p, PrimalityMode::probable, cfg)) {
            throw Error("PrimePool: entry " + nat_str(e.p) + " is not prime");
        }
        if (mode_ == PoolMode::agp) {
            if (e.d < 2) throw Error("PrimePool: agp divisor must exceed 1");
            if (L_.value() % e.d != 0) throw Error("PrimePool: agp divisor must divide L");
            if (e.p != e.d * k_ + 1) throw Error("PrimePool: agp entry must satisfy p = d*k + 1");
        } else {
            if (e.d + 1 != e.p) throw Error("PrimePool: erdos entry must satisfy d = p - 1");
            if (M_ % e.d != 0) throw Error("PrimePool: erdos entry needs p - 1 | M");
            if (M_ % e.p == 0) throw Error("PrimePool: erdos entry must not divide M");
        }
    }
    prev = 0;
    for (const Natural& q : pinned_) {
        if (q <= prev) throw Error("PrimePool: pinned primes must be sorted without duplicates");
        prev = q;
        if (!is_prime(q, PrimalityMode::probable, cfg)) {
            throw Error("PrimePool: pinned " + nat_str(q) + " is not prime");
        }
        if (q < 2 || wm % (q - 1) != 0) {
            throw Error("PrimePool: pinned prime needs p - 1 dividing the working modulus");
        }
        for (const PoolEntry& e : entries_) {
            if (e.p == q) throw Error("PrimePool: pinned prime duplicates an entry");
        }
    }
}

// ---------------------------------------------------------------------------
// SubsetSolution
// ---------------------------------------------------------------------------

SubsetSolution SubsetSolution::checked(const PrimePool& pool, const TargetSpec& target,
                                       std::vector<std::size_t> indices,
                                       std::vector<Natural> includes_pinned) {
    target.validate();
    std::sort(indices.begin(), indices.end());
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
        throw Error("SubsetSolution: duplicate entry index");
    }
    std::sort(includes_pinned.begin(), includes_pinned.end());
    if (std::adjacent_find(includes_pinned.begin(), includes_pinned.end()) !=
        includes_pinned.end()) {
        throw Error("SubsetSolution: duplicate pinned prime");
    }

    SubsetSolution s;
    s.product = 1;
    for (std::size_t i : indices) {
        if (i >= pool.entries().size()) throw Error("SubsetSolution: entry index out of range");
        s.product *= pool.entries()[i].p;
    }
    const auto& pinned = pool.pinned();
    for (const Natural& q : includes_pinned) {
        if (std::find(pinned.begin(), pinned.end(), q) == pinned.end()) {
            throw Error("SubsetSolution: " + nat_str(q) + " is not pinned in this pool");
        }
        s.product *= q;
    }
    s.indices = std::move(indices);
    s.includes_pinned = std::move(includes_pinned);
    s.size = s.indices.size() + s.includes_pinned.size();

    if (s.size == 0) throw Error("SubsetSolution: the empty product is excluded (N > 1)");
    if (!target.admits_size(s.size)) {
        throw Error("SubsetSolution: size " + std::to_string(s.size) +
                    " violates the size or parity constraint");
    }
    if (s.product % target.modulus != target.residue % target.modulus) {
        throw Error("SubsetSolution: product is not congruent to the target residue");
    }
    for (std::size_t i : s.indices) {
        const Natural& p = pool.entries()[i].p;
        if (std::find(target.exclude.begin(), target.exclude.end(), p) != target.exclude.end()) {
            throw Error("SubsetSolution: uses excluded prime " + nat_str(p));
        }
    }
    for (const Natural& q : s.includes_pinned) {
        if (std::find(target.exclude.begin(), target.exclude.end(), q) != target.exclude.end()) {
            throw Error("SubsetSolution: uses excluded prime " + nat_str(q));
        }
    }
    return s;
}

void SubsetSolution::revalidate(const PrimePool& pool, const TargetSpec& target) const {
    const SubsetSolution fresh = checked(pool, target, indices, includes_pinned);
    if (fresh.product != product || fresh.size != size || fresh.indices != indices ||
        fresh.includes_pinned != includes_pinned) {
        throw Error("SubsetSolution: stored fields disagree with recomputation");
    }
}

// ---------------------------------------------------------------------------
// subset_search
// ---------------------------------------------------------------------------

namespace {

/// Depth-first subset search in combination-tree preorder, which visits
/// index sequences in lexicographic order, so the first hit is the
/// tie-break-minimal solution of the current run. Meet-in-the-middle swaps
/// the upper half of the tree for a precomputed (residue, size) -> lex-min
/// completion map over the second half of the slots.
class SubsetSearcher {
  public:
    SubsetSearcher(const PrimePool& pool, const TargetSpec& target, const SearchConfig& config)
        : pool_(pool), target_(target), config_(config), M_(target.modulus) {
        target_.validate();
        for (std::size_t i = 0; i < pool.entries().size(); ++i) {
            const Natural& p = pool.entries()[i].p;
            if (is_excluded(p)) continue;
            // A prime sharing a factor with M can never appear in a product
            // that is a unit mod M; skipping it preserves completeness.
            if (gcd_nat(p, M_) != 1) continue;
            slots_.push_back(i);
            slot_res_.push_back(p % M_);
        }
        if (slots_.size() > config_.max_pool) {
            throw LimitExceeded("subset_search: usable entries exceed config.max_pool");
        }
        budget_ = config_.budget;
        max_entries_ = target_.size.kind == SizeConstraint::Kind::exact
                           ? target_.size.exact
                           : slots_.size();
        const bool mitm = config_.strategy == SearchStrategy::meet_in_middle ||
                          (config_.strategy == SearchStrategy::automatic && slots_.size() > 28);
        split_ = mitm ? slots_.size() / 2 : slots_.size();
        if (mitm) build_completions();
    }

    std::optional<SubsetSolution> run() {
        std::vector<Natural> pinned_avail;
        if (config_.use_pinned) {
            for (const Natural& q : pool_.pinned()) {
                if (!is_excluded(q) && gcd_nat(q, M_) == 1) pinned_avail.push_back(q);
            }
        }
        if (pinned_avail.size() > 16) {
            throw LimitExceeded("subset_search: too many pinned primes");
        }

        struct Candidate {
            std::vector<std::size_t> indices;
            std::vector<Natural> pinned;
            Natural product;
        };
        std::optional<Candidate> best;

        for (std::uint32_t mask = 0; mask < (1u << pinned_avail.size()); ++mask) {
            cur_pinned_.clear();
            Natural pinned_prod = 1;
            for (std::size_t i = 0; i < pinned_avail.size(); ++i) {
                if (mask & (1u << i)) {
                    cur_pinned_.push_back(pinned_avail[i]);
                    pinned_prod = pinned_prod * pinned_avail[i] % M_;
                }
            }
            pinned_count_ = cur_pinned_.size();
            residual_ = target_.residue % M_ * mod_inverse(pinned_prod, M_) % M_;
            found_.reset();
            cur_sel_.clear();
            descend(0, 0, 1);
            if (!found_) continue;
            Natural product = 1;
            for (std::size_t slot : *found_) product *= pool_.entries()[slots_[slot]].p;
            for (const Natural& q : cur_pinned_) product *= q;
            std::vector<std::size_t> indices;
            indices.reserve(found_->size());
            for (std::size_t slot : *found_) indices.push_back(slots_[slot]);
            // Global tie-break across pinned choices: lexicographically
            // smallest entry-index sequence, then smallest product.
            if (!best || indices < best->indices ||
                (indices == best->indices && product < best->product)) {
                best = Candidate{std::move(indices), cur_pinned_, std::move(product)};
            }
        }

        if (!best) return std::nullopt;
        return SubsetSolution::checked(pool_, target_, std::move(best->indices),
                                       std::move(best->pinned));
    }

  private:
    bool is_excluded(const Natural& p) const {
        return std::find(target_.exclude.begin(), target_.exclude.end(), p) !=
               target_.exclude.end();
    }

    void spend() {
        if (budget_ == 0) throw BudgetExceeded("subset_search: node budget exhausted");
        --budget_;
    }

    /// Visits every subset of slots [next, split_) extending the current
    /// selection, in lexicographic sequence order: the selection itself
    /// first, then extensions by ascending next element, then (in
    /// meet-in-the-middle mode) completions using slots >= split_, which
    /// compare greater than any extension below split_.
    bool descend(std::size_t next, std::size_t count, Natural prod) {
        spend();
        if (count + pinned_count_ > 0 && prod == residual_ &&
            target_.admits_size(count + pinned_count_)) {
            found_ = cur_sel_;
            return true;
        }
        if (count < max_entries_) {
            for (std::size_t j = next; j < split_; ++j) {
                cur_sel_.push_back(j);
                const bool hit = descend(j + 1, count + 1, prod * slot_res_[j] % M_);
                cur_sel_.pop_back();
                if (hit) return true;
            }
        }
        if (split_ < slots_.size() && next <= split_) {
            const Natural needed = residual_ * mod_inverse(prod, M_) % M_;
            const std::vector<std::uint32_t>* completion = nullptr;
            for (std::size_t b = 1; b + count <= max_entries_; ++b) {
                if (b > slots_.size() - split_) break;
                if (!target_.admits_size(count + b + pinned_count_)) continue;
                const auto it = completions_.find({needed, b});
                if (it == completions_.end()) continue;
                // Among admissible completion sizes the lexicographically
                // smallest sequence wins; a shorter sequence that is a
                // prefix of a longer one is smaller.
                if (completion == nullptr ||
                    std::lexicographical_compare(it->second.begin(), it->second.end(),
                                                 completion->begin(), completion->end())) {
                    completion = &it->second;
                }
            }
            if (completion != nullptr) {
                found_ = cur_sel_;
                for (std::uint32_t slot : *completion) found_->push_back(slot);
                return true;
            }
        }
        return false;
    }

    /// Preorder enumeration of the nonempty subsets of slots [split_, n),
    /// recording the first (= lexicographically smallest) sequence per
    /// (product residue, size) key.
    void build_completions() {
        cur_b_.clear();
        bgen(split_, 0, 1);
    }

    void bgen(std::size_t next, std::size_t count, const Natural& prod) {
        spend();
        if (count >= 1) {
            completions_.try_emplace({prod, count}, cur_b_);
        }
        if (count >= max_entries_) return;
        for (std::size_t j = next; j < slots_.size(); ++j) {
            cur_b_.push_back(static_cast<std::uint32_t>(j));
            bgen(j + 1, count + 1, prod * slot_res_[j] % M_);
            cur_b_.pop_back();
        }
    }

    const PrimePool& pool_;
    TargetSpec target_;
    SearchConfig config_;
    Natural M_;
    std::vector<std::size_t> slots_;  // usable entry indices, ascending
    std::vector<Natural> slot_res_;   // entry prime mod M per slot
    std::size_t split_ = 0;
    std::size_t max_entries_ = 0;
    std::uint64_t budget_ = 0;
    std::map<std::pair<Natural, std::size_t>, std::vector<std::uint32_t>> completions_;

    // per-run state
    std::vector<Natural> cur_pinned_;
    std::size_t pinned_count_ = 0;
    Natural residual_;
    std::vector<std::size_t> cur_sel_;
    std::vector<std::uint32_t> cur_b_;
    std::optional<std::vector<std::size_t>> found_;
};

}  // namespace

std::optional<SubsetSolution> subset_search(const PrimePool& pool, const TargetSpec& target,
                                            const SearchConfig& config) {
    if (pool.entries().empty()) throw PoolTooSmall("subset_search: empty pool");
    SubsetSearcher searcher(pool, target, config);
    return searcher.run();
}

// ---------------------------------------------------------------------------
// extend_chain
// ---------------------------------------------------------------------------

ChainResult extend_chain(const SubsetSolution& base, const PrimePool& pool, const Natural& M,
                         unsigned h, unsigned max_blocks, const SearchConfig& config) {
    if (M < 2) throw Error("extend_chain: modulus must be >= 2");
    if (base.product % M != 1 % M) {
        throw Error("extend_chain: base product must be congruent to 1 mod M");
    }

    ChainResult result;
    result.chain.push_back(base);
    result.h = h;
    if (max_blocks == 0) return result;

    std::vector<Natural> used;
    for (std::size_t i : base.indices) used.push_back(pool.entries()[i].p);
    for (const Natural& q : base.includes_pinned) used.push_back(q);
    // Blocks draw on pool entries only; pinned primes stay fixed factors.
    for (const Natural& q : pool.pinned()) used.push_back(q);

    const auto try_block = [&](unsigned block_size) -> std::optional<SubsetSolution> {
        TargetSpec t;
        t.modulus = M;
        t.residue = 1;
        t.size = SizeConstraint::exactly(block_size);
        t.exclude = used;
        SearchConfig c = config;
        c.use_pinned = false;
        try {
            return subset_search(pool, t, c);
        } catch (const BudgetExceeded&) {
            // Chain extension is greedy best-effort: an unfinished search
            // ends the chain instead of failing the whole call.
            return std::nullopt;
        }
    };

    std::optional<SubsetSolution> block;
    if (h == 0) {
        // Smallest feasible block size, capped by the Davenport bound of
        // M's unit group and by the pool itself.
        const Natural bound = davenport_bound(factorize(M));
        unsigned cap = static_cast<unsigned>(
            std::min<std::uint64_t>(pool.entries().size(),
                                    fits_u64(bound) ? to_u64(bound) : pool.entries().size()));
        for (unsigned candidate = 2; candidate <= cap; ++candidate) {
            block = try_block(candidate);
            if (block) {
                result.h = candidate;
                break;
            }
        }
        if (!block) return result;  // no feasible h: chain is just the base
    } else {
        block = try_block(h);
    }

    unsigned blocks = 0;
    while (block && blocks < max_blocks) {
        const SubsetSolution& prev = result.chain.back();
        SubsetSolution cum;
        cum.indices = prev.indices;
        cum.indices.insert(cum.indices.end(), block->indices.begin(), block->indices.end());
        std::sort(cum.indices.begin(), cum.indices.end());
        cum.includes_pinned = prev.includes_pinned;
        cum.product = prev.product * block->product;
        cum.size = prev.size + block->size;
        if (cum.product % M != 1 % M) {
            throw Error("extend_chain: internal: cumulative product not 1 mod M");
        }
        result.chain.push_back(std::move(cum));
        ++blocks;
        for (std::size_t i : block->indices) used.push_back(pool.entries()[i].p);
        if (blocks == max_blocks) break;
        block = try_block(result.h);
    }
    return result;
}

// ---------------------------------------------------------------------------
// build_modulus / find_k / pools
// ---------------------------------------------------------------------------

namespace {

bool is_squarefree_value(const Natural& n, const FactorConfig& cfg) {
    return factorize(n, cfg).squarefree();
}

}  // namespace

Factorization build_modulus(unsigned prime_budget, std::uint64_t q_lo, std::uint64_t q_hi,
                            bool require_qr3, const FactorConfig& cfg) {
    if (prime_budget == 0) return Factorization();
    if (q_hi > 100'000'000) throw LimitExceeded("build_modulus: sieve range too large");
    std::vector<PrimeFactor> picked;
    if (q_hi >= q_lo && q_hi >= 2) {
        for (std::uint32_t q : primes_up_to(static_cast<std::uint32_t>(q_hi))) {
            if (q < q_lo) continue;
            if (!is_squarefree_value(Natural(q) - 1, cfg)) continue;
            if (require_qr3) {
                if (q == 3) continue;  // 3 is not a unit modulo 3
                // 3 is trivially a square mod 2; jacobi decides odd q >= 5.
                if (q != 2 && jacobi(3, q) != 1) continue;
            }
            picked.push_back({Natural(q), 1});
            if (picked.size() == prime_budget) break;
        }
    }
    if (picked.empty()) {
        throw Infeasible("build_modulus: no prime in range has square-free q - 1" +
                         std::string(require_qr3 ? " with 3 a quadratic residue" : ""));
    }
    return Factorization::from_parts(std::move(picked), cfg);
}

std::pair<Natural, unsigned> find_k(const Factorization& L, const Natural& k_max,
                                    std::optional<unsigned> w, const FactorConfig& cfg) {
    if (L.value() <= 1) throw Infeasible("find_k: L = 1 has no divisor d > 1");
    if (k_max < 1) throw Infeasible("find_k: no k in range");
    if (k_max > 1'000'000) throw LimitExceeded("find_k: k range too large");

    std::vector<Natural> ds = divisors(L, w);
    std::erase_if(ds, [](const Natural& d) { return d <= 1; });
    if (ds.empty()) throw Infeasible("find_k: no divisor matches the filter");

    Natural best_k = 0;
    unsigned best_hits = 0;
    bool have_best = false;
    for (Natural k = 1; k <= k_max; ++k) {
        if (gcd_nat(k, L.value()) != 1) continue;
        unsigned hits = 0;
        for (const Natural& d : ds) {
            if (is_prime(d * k + 1, PrimalityMode::probable, cfg)) ++hits;
        }
        if (!have_best || hits > best_hits) {
            have_best = true;
            best_k = k;
            best_hits = hits;
        }
    }
    if (!have_best) throw Infeasible("find_k: no k coprime to L");
    return {best_k, best_hits};
}

namespace {

std::vector<Natural> eligible_pinned(const std::vector<Natural>& candidates,
                                     const std::vector<PoolEntry>& entries, const Natural& wm,
                                     const FactorConfig& cfg) {
    std::vector<Natural> pinned;
    for (const Natural& q : candidates) {
        if (q < 2 || !is_prime(q, PrimalityMode::probable, cfg)) continue;
        if (wm % (q - 1) != 0) continue;
        if (gcd_nat(q, wm) != 1) continue;  // q | wm would forbid products = 1 mod wm
        bool in_entries = false;
        for (const PoolEntry& e : entries) {
            if (e.p == q) {
                in_entries = true;
                break;
            }
        }
        if (!in_entries) pinned.push_back(q);
    }
    std::sort(pinned.begin(), pinned.end());
    pinned.erase(std::unique(pinned.begin(), pinned.end()), pinned.end());
    return pinned;
}

}  // namespace

PrimePool build_pool(const Factorization& L, const Natural& k, const PoolOptions& options) {
    if (L.value() <= 1) throw Infeasible("build_pool: L must exceed 1");
    if (k < 1) throw Error("build_pool: k must be >= 1");
    if (gcd_nat(k, L.value()) != 1) throw Error("build_pool: gcd(k, L) must be 1");

    std::vector<PoolEntry> entries;
    for (const Natural& d : divisors(L, options.w, options.divisor_budget)) {
        if (d <= 1) continue;
        const Natural p = d * k + 1;
        if (options.ord2_cap > 0 && ord2(p - 1) > options.ord2_cap) continue;
        if (!is_prime(p, PrimalityMode::probable, options.factor)) continue;
        entries.push_back({d, p});
    }
    if (entries.empty()) throw Infeasible("build_pool: no divisor yields a prime d*k + 1");
    std::sort(entries.begin(), entries.end(),
              [](const PoolEntry& a, const PoolEntry& b) { return a.p < b.p; });

    const Natural wm = L.value() * k;
    std::vector<Natural> pinned =
        eligible_pinned(options.pinned_candidates, entries, wm, options.factor);
    return PrimePool(L, k, std::move(entries), std::move(pinned), options.factor);
}

PrimePool build_pool_erdos(const Natural& M, const PoolOptions& options) {
    if (M < 2 || M % 2 != 0) throw Error("build_pool_erdos: M must be even");

    const Factorization fM = factorize(M, options.factor);
    std::vector<PoolEntry> entries;
    for (const Natural& d : divisors(fM, std::nullopt, options.divisor_budget)) {
        const Natural p = d + 1;
        if (M % p == 0) continue;
        if (!is_prime(p, PrimalityMode::probable, options.factor)) continue;
        entries.push_back({d, p});
    }
    if (entries.empty()) throw Infeasible("build_pool_erdos: no prime p with p - 1 | M");
    std::sort(entries.begin(), entries.end(),
              [](const PoolEntry& a, const PoolEntry& b) { return a.p < b.p; });

    std::vector<Natural> pinned =
        eligible_pinned(options.pinned_candidates, entries, M, options.factor);
    return PrimePool(M, std::move(entries), std::move(pinned), options.factor);
}

// ---------------------------------------------------------------------------
// target_omega
// ---------------------------------------------------------------------------

std::vector<LadderRung> default_ladder() {
    std::vector<LadderRung> ladder;
    for (std::uint64_t m : {80ULL, 120ULL, 240ULL, 720ULL, 2520ULL, 5040ULL, 27720ULL,
                            55440ULL, 110880ULL, 720720ULL}) {
        LadderRung rung;
        rung.mode = PoolMode::erdos;
        rung.M = m;
        ladder.push_back(rung);
    }
    // agp tail: wider nets for targets the smooth erdos moduli miss.
    for (auto [budget, q_hi, k_max] :
         {std::tuple<unsigned, std::uint64_t, std::uint64_t>{3, 30, 60},
          std::tuple<unsigned, std::uint64_t, std::uint64_t>{4, 60, 120}}) {
        LadderRung rung;
        rung.mode = PoolMode::agp;
        rung.prime_budget = budget;
        rung.q_lo = 3;
        rung.q_hi = q_hi;
        rung.k_max = k_max;
        ladder.push_back(rung);
    }
    return ladder;
}

namespace {

std::string rung_label(const LadderRung& rung) {
    if (rung.mode == PoolMode::erdos) return "erdos M=" + nat_str(rung.M);
    std::ostringstream os;
    os << "agp q in [" << rung.q_lo << ", " << rung.q_hi << "] budget " << rung.prime_budget
       << " k_max " << nat_str(rung.k_max);
    return os.str();
}

TargetOmegaResult certify(unsigned R, const LadderRung& rung, PrimePool pool,
                          SubsetSolution solution, bool pinned_path,
                          const TargetOmegaOptions& options) {
    // The verifier is the sole authority: recompute the factor list and run
    // the full Korselt check on the product.
    std::vector<PrimeFactor> parts;
    for (std::size_t i : solution.indices) parts.push_back({pool.entries()[i].p, 1});
    for (const Natural& q : solution.includes_pinned) parts.push_back({q, 1});
    std::sort(parts.begin(), parts.end(),
              [](const PrimeFactor& a, const PrimeFactor& b) { return a.prime < b.prime; });
    const Factorization hint = Factorization::from_parts(std::move(parts), options.factor);

    const KorseltResult res = korselt_check(solution.product, hint, options.factor);
    if (!res.ok()) {
        throw Error("target_omega: internal: constructed product failed the Korselt check");
    }
    if (res.certificate->factors.omega() != R) {
        throw Error("target_omega: internal: certificate omega disagrees with R");
    }
    TargetOmegaResult result;
    result.certificate = *res.certificate;
    result.rung = rung;
    result.pool = std::move(pool);
    result.solution = std::move(solution);
    result.used_pinned_path = pinned_path;
    return result;
}

}  // namespace

TargetOmegaResult target_omega(unsigned R, const TargetOmegaOptions& options) {
    if (R < 3) {
        throw Infeasible("target_omega: no Carmichael number has fewer than 3 prime factors");
    }
    const std::vector<LadderRung> ladder =
        options.ladder.empty() ? default_ladder() : options.ladder;
    std::vector<std::string> attempts;

    for (const LadderRung& rung : ladder) {
        const std::string label = rung_label(rung);
        PrimePool pool;
        try {
            if (rung.mode == PoolMode::erdos) {
                pool = build_pool_erdos(rung.M, options.pool);
            } else {
                const Factorization L = build_modulus(rung.prime_budget, rung.q_lo, rung.q_hi,
                                                      rung.require_qr3, options.factor);
                const auto [k, hits] = find_k(L, rung.k_max, options.pool.w, options.factor);
                pool = build_pool(L, k, options.pool);
            }
        } catch (const Error& e) {
            attempts.push_back(label + ": pool construction failed: " + e.what());
            continue;
        }
        const Natural M = pool.working_modulus();

        // Direct path: exact size R over pool entries alone. Pinned primes
        // are reserved for the explicit parity fallback below, so a success
        // here genuinely means the plain search sufficed.
        TargetSpec direct;
        direct.modulus = M;
        direct.residue = 1;
        direct.size = SizeConstraint::exactly(R);
        SearchConfig direct_config = options.search;
        direct_config.use_pinned = false;
        if (options.require_pinned && R % 2 == 1) {
            attempts.push_back(label + " direct: skipped (pinned path required)");
        } else {
            try {
                if (auto sol = subset_search(pool, direct, direct_config)) {
                    return certify(R, rung, std::move(pool), std::move(*sol), false, options);
                }
                attempts.push_back(label + " direct: NoSolution");
            } catch (const BudgetExceeded& e) {
                attempts.push_back(label + " direct: BudgetExceeded: " + e.what());
            } catch (const Error& e) {
                attempts.push_back(label + " direct: " + e.what());
            }
        }

        // Odd R: force one odd prime and search an even count on the rest.
        if (R % 2 == 1) {
            const Natural& p3 = options.pinned_prime;
            std::optional<std::size_t> entry_index;
            for (std::size_t i = 0; i < pool.entries().size(); ++i) {
                if (pool.entries()[i].p == p3) entry_index = i;
            }
            const bool in_pinned = std::find(pool.pinned().begin(), pool.pinned().end(), p3) !=
                                   pool.pinned().end();
            if (!entry_index && !in_pinned) {
                attempts.push_back(label + " pinned: " + nat_str(p3) + " not available");
                continue;
            }
            TargetSpec rest;
            rest.modulus = M;
            rest.residue = mod_inverse(p3 % M, M);
            rest.size = SizeConstraint::exactly(R - 1);
            rest.exclude = {p3};
            SearchConfig rest_config = options.search;
            rest_config.use_pinned = false;
            try {
                if (auto sol = subset_search(pool, rest, rest_config)) {
                    std::vector<std::size_t> indices = sol->indices;
                    std::vector<Natural> pinned_used = sol->includes_pinned;
                    if (entry_index) {
                        indices.push_back(*entry_index);
                    } else {
                        pinned_used.push_back(p3);
                    }
                    SubsetSolution full = SubsetSolution::checked(pool, direct, std::move(indices),
                                                                  std::move(pinned_used));
                    return certify(R, rung, std::move(pool), std::move(full), true, options);
                }
                attempts.push_back(label + " pinned: NoSolution");
            } catch (const BudgetExceeded& e) {
                attempts.push_back(label + " pinned: BudgetExceeded: " + e.what());
            } catch (const Error& e) {
                attempts.push_back(label + " pinned: " + e.what());
            }
        }
    }

    std::string msg = "target_omega(" + std::to_string(R) + "): every rung failed:";
    for (const std::string& a : attempts) msg += "\n  " + a;
    throw Exhausted(msg);
}

}  // namespace carmkit
