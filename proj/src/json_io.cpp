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

#include "carmkit/json_io.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <utility>

#include "carmkit/errors.hpp"
#include "carmkit/groups.hpp"

namespace carmkit {

namespace {

using nlohmann::json;

// Typed field access. Missing or mistyped fields throw Error, not the JSON
// library's exceptions, so callers see one failure type for all corruption.
const json& field(const json& j, const char* name) {
    if (!j.is_object()) throw Error(std::string("json: expected object holding '") + name + "'");
    auto it = j.find(name);
    if (it == j.end()) throw Error(std::string("json: missing field '") + name + "'");
    return *it;
}

std::uint64_t get_u64(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_number_unsigned()) {
        throw Error(std::string("json: field '") + name + "' is not a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

unsigned get_unsigned(const json& j, const char* name) {
    std::uint64_t v = get_u64(j, name);
    if (v > std::numeric_limits<unsigned>::max()) {
        throw Error(std::string("json: field '") + name + "' out of range");
    }
    return static_cast<unsigned>(v);
}

double get_double(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_number()) throw Error(std::string("json: field '") + name + "' is not a number");
    return v.get<double>();
}

bool get_bool(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_boolean()) throw Error(std::string("json: field '") + name + "' is not a boolean");
    return v.get<bool>();
}

std::string get_string(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_string()) throw Error(std::string("json: field '") + name + "' is not a string");
    return v.get<std::string>();
}

Natural get_natural(const json& j, const char* name) {
    return natural_from_decimal(get_string(j, name));
}

const json& get_array(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_array()) throw Error(std::string("json: field '") + name + "' is not an array");
    return v;
}

std::vector<std::uint64_t> get_u64_array(const json& j, const char* name) {
    std::vector<std::uint64_t> out;
    for (const json& v : get_array(j, name)) {
        if (!v.is_number_unsigned()) {
            throw Error(std::string("json: field '") + name +
                        "' holds a non-integer element");
        }
        out.push_back(v.get<std::uint64_t>());
    }
    return out;
}

std::vector<Natural> get_natural_array(const json& j, const char* name) {
    std::vector<Natural> out;
    for (const json& v : get_array(j, name)) {
        if (!v.is_string()) {
            throw Error(std::string("json: field '") + name + "' holds a non-string element");
        }
        out.push_back(natural_from_decimal(v.get<std::string>()));
    }
    return out;
}

json group_to_json(const AbelianGroupSpec& g) {
    json orders = json::array();
    for (std::uint64_t d : g.cyclic_orders()) orders.push_back(d);
    return orders;
}

AbelianGroupSpec group_from_json(const json& j, const char* name) {
    std::vector<std::uint64_t> orders = get_u64_array(j, name);
    if (orders.empty()) return AbelianGroupSpec();
    return AbelianGroupSpec(std::move(orders));
}

json chi_to_json(const CharacterSpec& chi) {
    json exps = json::array();
    for (std::uint64_t e : chi.exponents) exps.push_back(e);
    return exps;
}

// Reads a character and confirms it is well formed for G with the recorded
// order; the order doubles as a corruption check on the exponents.
CharacterSpec chi_from_json(const json& j, const AbelianGroupSpec& G,
                            std::uint64_t recorded_order) {
    CharacterSpec chi{get_u64_array(j, "chi")};
    const auto& orders = G.cyclic_orders();
    if (chi.exponents.size() != orders.size()) {
        throw Error("json: character exponent count does not match the group rank");
    }
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (chi.exponents[i] >= orders[i]) {
            throw Error("json: character exponent out of range");
        }
    }
    if (character_order(G, chi) != recorded_order) {
        throw Error("json: recorded character order is wrong");
    }
    return chi;
}

// Structural check of a solution against a pool: index ranges, pinned
// membership, and the recomputed product. Target compliance (residue, size
// constraint) is the caller's concern; this guards the parts a pool alone
// determines.
void recheck_solution_in_pool(const PrimePool& pool, const SubsetSolution& s) {
    Natural prod = 1;
    for (std::size_t i : s.indices) {
        if (i >= pool.entries().size()) throw Error("json: solution index out of range");
        prod *= pool.entries()[i].p;
    }
    for (const Natural& q : s.includes_pinned) {
        if (std::find(pool.pinned().begin(), pool.pinned().end(), q) == pool.pinned().end()) {
            throw Error("json: solution pinned prime is not pinned in the pool");
        }
        prod *= q;
    }
    if (prod != s.product) throw Error("json: solution product mismatch");
}

}  // namespace

// ---------------------------------------------------------------------------
// Integers and documents
// ---------------------------------------------------------------------------

std::string to_decimal(const Natural& n) { return n.str(); }

Natural natural_from_decimal(const std::string& text) {
    if (text.empty()) throw Error("json: empty integer string");
    for (char c : text) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw Error("json: integer string '" + text + "' has a non-digit character");
        }
    }
    return Natural(text);
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw Error("json: malformed document");
    return j;
}

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

nlohmann::json to_json(const Factorization& f) {
    json factors = json::array();
    for (const PrimeFactor& pf : f.factors()) {
        factors.push_back({{"prime", to_decimal(pf.prime)}, {"multiplicity", pf.multiplicity}});
    }
    return {{"value", to_decimal(f.value())}, {"factors", std::move(factors)}};
}

Factorization factorization_from_json(const nlohmann::json& j, const FactorConfig& cfg) {
    std::vector<PrimeFactor> parts;
    for (const json& pf : get_array(j, "factors")) {
        parts.push_back({get_natural(pf, "prime"), get_unsigned(pf, "multiplicity")});
    }
    Factorization f = Factorization::from_parts(std::move(parts), cfg);
    if (f.value() != get_natural(j, "value")) {
        throw Error("json: factorization value does not match its factors");
    }
    return f;
}

// ---------------------------------------------------------------------------
// Korselt certificates
// ---------------------------------------------------------------------------

nlohmann::json to_json(const KorseltCertificate& certificate) {
    json witnesses = json::array();
    for (const KorseltWitness& w : certificate.witnesses) {
        witnesses.push_back(
            {{"prime", to_decimal(w.prime)}, {"quotient", to_decimal(w.quotient)}});
    }
    return {{"n", to_decimal(certificate.n)},
            {"factors", to_json(certificate.factors)},
            {"witnesses", std::move(witnesses)}};
}

KorseltCertificate certificate_from_json(const nlohmann::json& j) {
    KorseltCertificate c;
    c.n = get_natural(j, "n");
    c.factors = factorization_from_json(field(j, "factors"));
    for (const json& w : get_array(j, "witnesses")) {
        c.witnesses.push_back({get_natural(w, "prime"), get_natural(w, "quotient")});
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Pools
// ---------------------------------------------------------------------------

nlohmann::json to_json(const PrimePool& pool) {
    json entries = json::array();
    for (const PoolEntry& e : pool.entries()) {
        entries.push_back({{"d", to_decimal(e.d)}, {"p", to_decimal(e.p)}});
    }
    json pinned = json::array();
    for (const Natural& q : pool.pinned()) pinned.push_back(to_decimal(q));
    json j = {{"entries", std::move(entries)},
              {"pinned", std::move(pinned)},
              {"working_modulus", to_decimal(pool.working_modulus())}};
    if (pool.mode() == PoolMode::erdos) {
        j["mode"] = "erdos";
        j["modulus"] = to_decimal(pool.M());
    } else {
        j["mode"] = "agp";
        j["L"] = to_json(pool.L());
        j["k"] = to_decimal(pool.k());
    }
    return j;
}

PrimePool pool_from_json(const nlohmann::json& j, const FactorConfig& cfg) {
    std::vector<PoolEntry> entries;
    for (const json& e : get_array(j, "entries")) {
        entries.push_back({get_natural(e, "d"), get_natural(e, "p")});
    }
    std::vector<Natural> pinned = get_natural_array(j, "pinned");
    std::string mode = get_string(j, "mode");
    // Both constructors run the full invariant sweep on the untrusted data.
    PrimePool pool;
    if (mode == "erdos") {
        pool = PrimePool(get_natural(j, "modulus"), std::move(entries), std::move(pinned), cfg);
    } else if (mode == "agp") {
        pool = PrimePool(factorization_from_json(field(j, "L"), cfg), get_natural(j, "k"),
                         std::move(entries), std::move(pinned), cfg);
    } else {
        throw Error("json: unknown pool mode '" + mode + "'");
    }
    if (pool.working_modulus() != get_natural(j, "working_modulus")) {
        throw Error("json: recorded working modulus is wrong");
    }
    return pool;
}

// ---------------------------------------------------------------------------
// Solutions, rungs, construction results
// ---------------------------------------------------------------------------

nlohmann::json to_json(const SubsetSolution& solution) {
    json indices = json::array();
    for (std::size_t i : solution.indices) indices.push_back(static_cast<std::uint64_t>(i));
    json pinned = json::array();
    for (const Natural& q : solution.includes_pinned) pinned.push_back(to_decimal(q));
    return {{"indices", std::move(indices)},
            {"includes_pinned", std::move(pinned)},
            {"product", to_decimal(solution.product)},
            {"size", static_cast<std::uint64_t>(solution.size)}};
}

SubsetSolution solution_from_json(const nlohmann::json& j) {
    SubsetSolution s;
    for (std::uint64_t i : get_u64_array(j, "indices")) {
        s.indices.push_back(static_cast<std::size_t>(i));
    }
    s.includes_pinned = get_natural_array(j, "includes_pinned");
    s.product = get_natural(j, "product");
    s.size = static_cast<std::size_t>(get_u64(j, "size"));
    auto strictly_increasing = [](const auto& v) {
        return std::adjacent_find(v.begin(), v.end(),
                                  [](const auto& a, const auto& b) { return a >= b; }) ==
               v.end();
    };
    if (!strictly_increasing(s.indices) || !strictly_increasing(s.includes_pinned)) {
        throw Error("json: solution lists must be strictly increasing");
    }
    if (s.size != s.indices.size() + s.includes_pinned.size()) {
        throw Error("json: solution size mismatch");
    }
    return s;
}

nlohmann::json to_json(const LadderRung& rung) {
    return {{"mode", rung.mode == PoolMode::erdos ? "erdos" : "agp"},
            {"M", to_decimal(rung.M)},
            {"prime_budget", rung.prime_budget},
            {"q_lo", rung.q_lo},
            {"q_hi", rung.q_hi},
            {"require_qr3", rung.require_qr3},
            {"k_max", to_decimal(rung.k_max)}};
}

LadderRung rung_from_json(const nlohmann::json& j) {
    LadderRung r;
    std::string mode = get_string(j, "mode");
    if (mode == "erdos") {
        r.mode = PoolMode::erdos;
    } else if (mode == "agp") {
        r.mode = PoolMode::agp;
    } else {
        throw Error("json: unknown rung mode '" + mode + "'");
    }
    r.M = get_natural(j, "M");
    r.prime_budget = get_unsigned(j, "prime_budget");
    r.q_lo = get_u64(j, "q_lo");
    r.q_hi = get_u64(j, "q_hi");
    r.require_qr3 = get_bool(j, "require_qr3");
    r.k_max = get_natural(j, "k_max");
    return r;
}

nlohmann::json to_json(const TargetOmegaResult& result) {
    return {{"certificate", to_json(result.certificate)},
            {"rung", to_json(result.rung)},
            {"pool", to_json(result.pool)},
            {"solution", to_json(result.solution)},
            {"used_pinned_path", result.used_pinned_path}};
}

TargetOmegaResult target_result_from_json(const nlohmann::json& j, const FactorConfig& cfg) {
    TargetOmegaResult r;
    r.certificate = certificate_from_json(field(j, "certificate"));
    r.rung = rung_from_json(field(j, "rung"));
    r.pool = pool_from_json(field(j, "pool"), cfg);
    r.solution = solution_from_json(field(j, "solution"));
    r.used_pinned_path = get_bool(j, "used_pinned_path");
    recheck_solution_in_pool(r.pool, r.solution);
    if (r.certificate.n != r.solution.product) {
        throw Error("json: certificate does not certify the solution product");
    }
    return r;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

nlohmann::json to_json(const UniformityReport& report) {
    json classes = json::array();
    for (const Natural& c : report.classes) classes.push_back(to_decimal(c));
    json counts = json::array();
    for (std::uint64_t c : report.counts) counts.push_back(c);
    return {{"modulus", to_decimal(report.modulus)},
            {"classes", std::move(classes)},
            {"counts", std::move(counts)},
            {"sample_size", report.sample_size},
            {"expected", report.expected},
            {"max_rel_deviation", report.max_rel_deviation},
            {"chi_square", report.chi_square},
            {"seed", report.seed},
            {"note", report.note}};
}

UniformityReport uniformity_from_json(const nlohmann::json& j) {
    UniformityReport r;
    r.modulus = get_natural(j, "modulus");
    r.classes = get_natural_array(j, "classes");
    r.counts = get_u64_array(j, "counts");
    r.sample_size = get_u64(j, "sample_size");
    r.expected = get_double(j, "expected");
    r.max_rel_deviation = get_double(j, "max_rel_deviation");
    r.chi_square = get_double(j, "chi_square");
    r.seed = get_u64(j, "seed");
    r.note = get_string(j, "note");
    r.validate();
    return r;
}

nlohmann::json to_json(const CharacterReport& report) {
    json rows = json::array();
    for (const CharacterNonconstancy& row : report.rows) {
        rows.push_back({{"chi", chi_to_json(row.chi)},
                        {"order", row.order},
                        {"min_disagreement", row.min_disagreement},
                        {"threshold", row.threshold}});
    }
    return {{"modulus", to_decimal(report.modulus)},
            {"group", group_to_json(report.group)},
            {"units", report.units},
            {"skipped", report.skipped},
            {"rows", std::move(rows)}};
}

CharacterReport characters_from_json(const nlohmann::json& j) {
    CharacterReport r;
    r.modulus = get_natural(j, "modulus");
    r.group = group_from_json(j, "group");
    r.units = get_u64(j, "units");
    r.skipped = get_u64(j, "skipped");
    for (const json& row : get_array(j, "rows")) {
        CharacterNonconstancy c;
        c.order = get_u64(row, "order");
        c.chi = chi_from_json(row, r.group, c.order);
        if (c.order < 2) throw Error("json: principal characters are never reported");
        c.min_disagreement = get_u64(row, "min_disagreement");
        if (c.min_disagreement > r.units) {
            throw Error("json: min_disagreement exceeds the unit count");
        }
        c.threshold = get_double(row, "threshold");
        r.rows.push_back(std::move(c));
    }
    return r;
}

nlohmann::json to_json(const CosetReport& report) {
    json rows = json::array();
    for (const CosetRow& row : report.rows) {
        json counts = json::array();
        for (std::uint64_t c : row.counts) counts.push_back(c);
        rows.push_back({{"ell", row.ell},
                        {"chi", chi_to_json(row.chi)},
                        {"counts", std::move(counts)},
                        {"max_fraction", row.max_fraction},
                        {"majority", row.majority}});
    }
    return {{"modulus", to_decimal(report.modulus)},
            {"group", group_to_json(report.group)},
            {"units", report.units},
            {"skipped", report.skipped},
            {"majority_threshold", report.majority_threshold},
            {"rows", std::move(rows)}};
}

CosetReport cosets_from_json(const nlohmann::json& j) {
    CosetReport r;
    r.modulus = get_natural(j, "modulus");
    r.group = group_from_json(j, "group");
    r.units = get_u64(j, "units");
    r.skipped = get_u64(j, "skipped");
    r.majority_threshold = get_double(j, "majority_threshold");
    for (const json& row : get_array(j, "rows")) {
        CosetRow c;
        c.ell = get_u64(row, "ell");
        c.chi = chi_from_json(row, r.group, c.ell);
        c.counts = get_u64_array(row, "counts");
        if (c.counts.size() != c.ell) {
            throw Error("json: coset row must hold one count per coset");
        }
        std::uint64_t sum = 0;
        std::uint64_t most = 0;
        for (std::uint64_t n : c.counts) {
            sum += n;
            most = std::max(most, n);
        }
        if (sum != r.units) throw Error("json: coset counts must sum to the unit count");
        double fraction =
            r.units == 0 ? 0.0 : static_cast<double>(most) / static_cast<double>(r.units);
        c.max_fraction = get_double(row, "max_fraction");
        if (c.max_fraction != fraction) throw Error("json: recorded max_fraction is stale");
        c.majority = get_bool(row, "majority");
        if (c.majority != (c.max_fraction > r.majority_threshold)) {
            throw Error("json: recorded majority flag is stale");
        }
        r.rows.push_back(std::move(c));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Cache envelopes
// ---------------------------------------------------------------------------

nlohmann::json cache_envelope(nlohmann::json key, nlohmann::json payload) {
    return {{"schema_version", kSchemaVersion},
            {"key", std::move(key)},
            {"payload", std::move(payload)}};
}

std::optional<nlohmann::json> cache_payload(const nlohmann::json& envelope,
                                            const nlohmann::json& key) {
    if (!envelope.is_object()) return std::nullopt;
    auto version = envelope.find("schema_version");
    if (version == envelope.end() || *version != json(kSchemaVersion)) return std::nullopt;
    auto stored_key = envelope.find("key");
    if (stored_key == envelope.end() || *stored_key != key) return std::nullopt;
    auto payload = envelope.find("payload");
    if (payload == envelope.end()) return std::nullopt;
    return *payload;
}

}  // namespace carmkit
