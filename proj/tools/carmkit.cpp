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

// Command-line surface over the library. Exit codes are a contract:
//   0 success, 1 domain failure (no solution, criterion rejected),
//   2 usage error (bad flags, malformed input), 3 budget exhausted.
// JSON goes to stdout; human-readable tables are opt-in via --format table.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "carmkit/carmichael.hpp"
#include "carmkit/construct.hpp"
#include "carmkit/equidist.hpp"
#include "carmkit/errors.hpp"
#include "carmkit/groups.hpp"
#include "carmkit/json_io.hpp"
#include "carmkit/numtheory.hpp"

namespace {

using namespace carmkit;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

/// Thrown for malformed user input that CLI11's own validation cannot catch
/// (unparseable integers, bad file contents). Maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Configuration: defaults < config file < environment < flags
// ---------------------------------------------------------------------------

struct Config {
    std::uint64_t oracle_limit = 1'000'000;    // default enumeration limit
    std::uint64_t factor_budget = 1'000'000;   // trial-division bound
    std::uint64_t search_budget = 200'000'000; // subset-search node budget
    std::string ladder_path;                   // modulus ladder file
    std::string cache_dir;                     // pool cache directory
    std::string pinned = "3";                  // default pinned prime candidates
    std::uint64_t seed = 0;                    // sampling seed
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream stream(s);
    std::string item;
    while (std::getline(stream, item, sep)) out.push_back(trim(item));
    return out;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    Natural n = [&] {
        try {
            return natural_from_decimal(text);
        } catch (const Error&) {
            throw UsageError(what + ": '" + text + "' is not a nonnegative integer");
        }
    }();
    if (!fits_u64(n)) throw UsageError(what + ": '" + text + "' is out of range");
    return to_u64(n);
}

Natural parse_natural(const std::string& text, const std::string& what) {
    try {
        return natural_from_decimal(text);
    } catch (const Error&) {
        throw UsageError(what + ": '" + text + "' is not a nonnegative integer");
    }
}

std::vector<Natural> parse_natural_list(const std::string& text, const std::string& what) {
    std::vector<Natural> out;
    if (trim(text).empty()) return out;
    for (const std::string& item : split(text, ',')) out.push_back(parse_natural(item, what));
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Key-value config file: one `key = value` per line, '#' comments.
/// Keys: oracle_limit, factor_budget, search_budget, ladder, cache_dir,
/// pinned (comma-separated), seed.
void load_config_file(const std::string& path, Config& cfg) {
    std::string text = slurp(path);
    std::stringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config '" + path + "': line '" + stripped + "' is not key = value");
        }
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key == "oracle_limit") {
            cfg.oracle_limit = parse_u64(value, "config oracle_limit");
        } else if (key == "factor_budget") {
            cfg.factor_budget = parse_u64(value, "config factor_budget");
        } else if (key == "search_budget") {
            cfg.search_budget = parse_u64(value, "config search_budget");
        } else if (key == "ladder") {
            cfg.ladder_path = value;
        } else if (key == "cache_dir") {
            cfg.cache_dir = value;
        } else if (key == "pinned") {
            cfg.pinned = value;
        } else if (key == "seed") {
            cfg.seed = parse_u64(value, "config seed");
        } else {
            throw UsageError("config '" + path + "': unknown key '" + key + "'");
        }
        if (cfg.oracle_limit == 0 || cfg.factor_budget == 0 || cfg.search_budget == 0) {
            throw UsageError("config '" + path + "': budgets must be positive");
        }
    }
}

FactorConfig factor_config(const Config& cfg) {
    FactorConfig fc;
    fc.trial_bound = cfg.factor_budget;
    return fc;
}

PoolOptions pool_options(const Config& cfg, std::optional<unsigned> w, unsigned ord2_cap) {
    PoolOptions opts;
    opts.w = w;
    opts.ord2_cap = ord2_cap;
    opts.pinned_candidates = parse_natural_list(cfg.pinned, "pinned candidates");
    opts.factor = factor_config(cfg);
    return opts;
}

// ---------------------------------------------------------------------------
// Output formatting
// ---------------------------------------------------------------------------

enum class Format { json, table, csv };

Format parse_format(const std::string& name) {
    if (name == "json") return Format::json;
    if (name == "table") return Format::table;
    if (name == "csv") return Format::csv;
    throw UsageError("unknown format '" + name + "' (expected json, table, or csv)");
}

void print_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (row.size() > widths.size()) widths.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += "  ";
            line += row[i];
            if (i + 1 < row.size()) line += std::string(widths[i] - row[i].size(), ' ');
        }
        std::cout << line << "\n";
    }
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void print_csv(const std::vector<std::vector<std::string>>& rows) {
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += ',';
            line += csv_escape(row[i]);
        }
        std::cout << line << "\n";
    }
}

std::string factors_compact(const Factorization& f) {
    std::string out;
    for (const PrimeFactor& pf : f.factors()) {
        if (!out.empty()) out += " * ";
        out += to_decimal(pf.prime);
        if (pf.multiplicity > 1) out += "^" + std::to_string(pf.multiplicity);
    }
    return out.empty() ? "1" : out;
}

std::string chi_compact(const CharacterSpec& chi) {
    std::string out = "[";
    for (std::size_t i = 0; i < chi.exponents.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(chi.exponents[i]);
    }
    return out + "]";
}

// ---------------------------------------------------------------------------
// Pool references and caching
// ---------------------------------------------------------------------------

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::optional<PrimePool> cached_pool(const Config& cfg, const json& key) {
    if (cfg.cache_dir.empty()) return std::nullopt;
    std::filesystem::path path =
        std::filesystem::path(cfg.cache_dir) / ("pool-" + std::to_string(fnv1a(key.dump())) + ".json");
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buffer;
    buffer << in.rdbuf();
    // A cache entry is never trusted: any parse, version, key, or invariant
    // failure falls through to a rebuild.
    try {
        json envelope = parse_json(buffer.str());
        std::optional<json> payload = cache_payload(envelope, key);
        if (!payload) return std::nullopt;
        return pool_from_json(*payload, factor_config(cfg));
    } catch (const Error&) {
        return std::nullopt;
    }
}

void store_pool(const Config& cfg, const json& key, const PrimePool& pool) {
    if (cfg.cache_dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(cfg.cache_dir, ec);
    if (ec) return;  // caching is best-effort; never fails a command
    std::filesystem::path path =
        std::filesystem::path(cfg.cache_dir) / ("pool-" + std::to_string(fnv1a(key.dump())) + ".json");
    std::ofstream out(path, std::ios::binary);
    out << dump_json(cache_envelope(key, to_json(pool)));
}

/// A pool reference is a JSON file path, "erdos:<M>", or "agp:<L>:<k>".
PrimePool load_pool_ref(const std::string& ref, const Config& cfg) {
    if (std::filesystem::exists(ref)) {
        json j = parse_json(slurp(ref));
        if (j.is_object() && j.contains("payload")) j = j["payload"];
        return pool_from_json(j, factor_config(cfg));
    }
    std::vector<std::string> parts = split(ref, ':');
    if (parts.size() == 2 && parts[0] == "erdos") {
        return build_pool_erdos(parse_natural(parts[1], "pool modulus"),
                                pool_options(cfg, std::nullopt, 2));
    }
    if (parts.size() == 3 && parts[0] == "agp") {
        return build_pool(factorize(parse_natural(parts[1], "pool L"), factor_config(cfg)),
                          parse_natural(parts[2], "pool k"), pool_options(cfg, std::nullopt, 2));
    }
    throw UsageError("--pool expects a JSON file, erdos:<M>, or agp:<L>:<k>; got '" + ref + "'");
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_verify(const Config& cfg, const std::string& n_text, Format format) {
    Natural n = [&] {
        try {
            return natural_from_decimal(n_text);
        } catch (const Error&) {
            throw UsageError("verify: '" + n_text + "' is not a nonnegative integer");
        }
    }();
    KorseltResult result = korselt_check(n, std::nullopt, factor_config(cfg));
    if (result.ok()) {
        const KorseltCertificate& cert = *result.certificate;
        if (format == Format::table) {
            std::vector<std::vector<std::string>> rows = {{"prime", "quotient"}};
            for (const KorseltWitness& w : cert.witnesses) {
                rows.push_back({to_decimal(w.prime), to_decimal(w.quotient)});
            }
            std::cout << to_decimal(cert.n) << " = " << factors_compact(cert.factors)
                      << " is a Carmichael number\n";
            print_table(rows);
        } else {
            std::cout << dump_json(to_json(cert));
        }
        return kExitOk;
    }
    const char* reason = "TooSmall";
    switch (*result.failure) {
        case KorseltFailure::prime: reason = "Prime"; break;
        case KorseltFailure::not_squarefree: reason = "NotSquarefree"; break;
        case KorseltFailure::divisibility_fails: reason = "DivisibilityFails"; break;
        case KorseltFailure::too_small: reason = "TooSmall"; break;
    }
    json out = {{"n", to_decimal(n)}, {"reason", reason}};
    if (result.failing_prime) out["failing_prime"] = to_decimal(*result.failing_prime);
    if (format == Format::table) {
        std::cout << to_decimal(n) << " is not a Carmichael number: " << reason << "\n";
    } else {
        std::cout << dump_json(out);
    }
    return kExitDomain;
}

int cmd_enumerate(const Config&, std::uint64_t limit, std::optional<unsigned> omega,
                  const std::string& strategy_name, bool histogram, unsigned workers,
                  Format format) {
    EnumConfig ec;
    ec.workers = workers;
    if (histogram) {
        std::map<unsigned, std::uint64_t> hist = omega_histogram(limit, ec);
        if (format == Format::json) {
            json rows = json::array();
            for (const auto& [w, count] : hist) {
                rows.push_back({{"omega", w}, {"count", count}});
            }
            std::cout << dump_json({{"limit", limit}, {"histogram", rows}});
        } else {
            std::vector<std::vector<std::string>> rows = {{"omega", "count"}};
            for (const auto& [w, count] : hist) {
                rows.push_back({std::to_string(w), std::to_string(count)});
            }
            format == Format::csv ? print_csv(rows) : print_table(rows);
        }
        return kExitOk;
    }
    EnumStrategy strategy;
    if (strategy_name == "korselt") {
        strategy = EnumStrategy::korselt_scan;
    } else if (strategy_name == "fermat") {
        strategy = EnumStrategy::fermat_filter;
    } else {
        throw UsageError("unknown strategy '" + strategy_name + "' (expected korselt or fermat)");
    }
    std::vector<KorseltCertificate> all = enumerate_carmichael(limit, strategy, ec);
    std::vector<const KorseltCertificate*> kept;
    for (const KorseltCertificate& c : all) {
        if (!omega || c.factors.omega() == *omega) kept.push_back(&c);
    }
    if (format == Format::json) {
        json rows = json::array();
        for (const KorseltCertificate* c : kept) rows.push_back(to_json(*c));
        std::cout << dump_json({{"limit", limit}, {"count", kept.size()}, {"certificates", rows}});
    } else {
        std::vector<std::vector<std::string>> rows = {{"n", "omega", "factors"}};
        for (const KorseltCertificate* c : kept) {
            rows.push_back({to_decimal(c->n), std::to_string(c->factors.omega()),
                            factors_compact(c->factors)});
        }
        format == Format::csv ? print_csv(rows) : print_table(rows);
    }
    return kExitOk;
}

void print_pool_table(const PrimePool& pool) {
    std::cout << "mode " << (pool.mode() == PoolMode::erdos ? "erdos" : "agp")
              << "  working_modulus " << to_decimal(pool.working_modulus()) << "  entries "
              << pool.entries().size() << "\n";
    std::vector<std::vector<std::string>> rows = {{"d", "p"}};
    for (const PoolEntry& e : pool.entries()) {
        rows.push_back({to_decimal(e.d), to_decimal(e.p)});
    }
    print_table(rows);
    if (!pool.pinned().empty()) {
        std::string pinned;
        for (const Natural& q : pool.pinned()) {
            if (!pinned.empty()) pinned += ", ";
            pinned += to_decimal(q);
        }
        std::cout << "pinned: " << pinned << "\n";
    }
}

int cmd_pool(const Config& cfg, const std::string& mode, const std::string& M_text,
             const std::string& L_text, const std::string& kmax_text,
             std::optional<unsigned> w, unsigned ord2_cap, bool no_cache, Format format) {
    json key = {{"mode", mode},
                {"w", w ? json(*w) : json(nullptr)},
                {"ord2_cap", ord2_cap},
                {"pinned", cfg.pinned}};
    PrimePool pool;
    if (mode == "erdos") {
        if (M_text.empty()) throw UsageError("pool --mode erdos requires --M");
        key["modulus"] = M_text;
        std::optional<PrimePool> hit = no_cache ? std::nullopt : cached_pool(cfg, key);
        pool = hit ? *hit
                   : build_pool_erdos(parse_natural(M_text, "--M"), pool_options(cfg, w, ord2_cap));
        if (!hit && !no_cache) store_pool(cfg, key, pool);
    } else if (mode == "agp") {
        if (L_text.empty() || kmax_text.empty()) {
            throw UsageError("pool --mode agp requires --L and --kmax");
        }
        key["L"] = L_text;
        key["kmax"] = kmax_text;
        std::optional<PrimePool> hit = no_cache ? std::nullopt : cached_pool(cfg, key);
        if (hit) {
            pool = *hit;
        } else {
            Factorization L = factorize(parse_natural(L_text, "--L"), factor_config(cfg));
            auto [k, hits] = find_k(L, parse_natural(kmax_text, "--kmax"), w, factor_config(cfg));
            (void)hits;
            pool = build_pool(L, k, pool_options(cfg, w, ord2_cap));
            if (!no_cache) store_pool(cfg, key, pool);
        }
    } else {
        throw UsageError("unknown pool mode '" + mode + "' (expected erdos or agp)");
    }
    if (format == Format::table) {
        print_pool_table(pool);
    } else {
        std::cout << dump_json(to_json(pool));
    }
    return kExitOk;
}

int cmd_construct(const Config& cfg, const std::string& pool_ref, const std::string& g_text,
                  std::optional<unsigned> size, const std::string& mod_text,
                  const std::string& parity_name, bool pin, const std::string& exclude_text,
                  const std::string& strategy_name, std::uint64_t budget, Format format) {
    PrimePool pool = load_pool_ref(pool_ref, cfg);
    TargetSpec target;
    target.modulus = pool.working_modulus();
    target.residue = parse_natural(g_text, "--g");
    if (size && !mod_text.empty()) throw UsageError("--size and --mod are mutually exclusive");
    if (size) {
        target.size = SizeConstraint::exactly(*size);
    } else if (!mod_text.empty()) {
        std::vector<std::string> parts = split(mod_text, ',');
        if (parts.size() != 2) throw UsageError("--mod expects 'a,h'");
        unsigned a = static_cast<unsigned>(parse_u64(parts[0], "--mod residue"));
        unsigned h = static_cast<unsigned>(parse_u64(parts[1], "--mod modulus"));
        target.size = SizeConstraint::congruent(a, h);
    } else {
        throw UsageError("construct requires --size or --mod");
    }
    if (parity_name == "even") {
        target.parity = ParityRequirement::even;
    } else if (parity_name == "odd") {
        target.parity = ParityRequirement::odd;
    } else if (parity_name != "any") {
        throw UsageError("unknown parity '" + parity_name + "' (expected any, even, or odd)");
    }
    target.exclude = parse_natural_list(exclude_text, "--exclude");

    SearchConfig sc;
    sc.budget = budget;
    sc.use_pinned = pin;
    if (strategy_name == "exhaustive") {
        sc.strategy = SearchStrategy::exhaustive;
    } else if (strategy_name == "mitm") {
        sc.strategy = SearchStrategy::meet_in_middle;
    } else if (strategy_name != "auto") {
        throw UsageError("unknown strategy '" + strategy_name + "' (expected auto, exhaustive, or mitm)");
    }

    std::optional<SubsetSolution> solution = subset_search(pool, target, sc);
    if (!solution) {
        json out = {{"solution", nullptr}, {"reason", "NoSolution"}};
        if (format == Format::table) {
            std::cout << "no subset matches the target\n";
        } else {
            std::cout << dump_json(out);
        }
        return kExitDomain;
    }

    // The product is Carmichael exactly when g = 1 and at least three primes
    // are involved; report the certificate whenever the check passes.
    std::vector<PrimeFactor> parts;
    for (std::size_t i : solution->indices) parts.push_back({pool.entries()[i].p, 1});
    for (const Natural& q : solution->includes_pinned) parts.push_back({q, 1});
    std::sort(parts.begin(), parts.end(),
              [](const PrimeFactor& a, const PrimeFactor& b) { return a.prime < b.prime; });
    KorseltResult kr = korselt_check(
        solution->product, Factorization::from_parts(std::move(parts), factor_config(cfg)),
        factor_config(cfg));

    json out = {{"pool_modulus", to_decimal(pool.working_modulus())},
                {"solution", to_json(*solution)},
                {"certificate", kr.ok() ? to_json(*kr.certificate) : json(nullptr)}};
    if (format == Format::table) {
        std::cout << "product " << to_decimal(solution->product) << "  size " << solution->size
                  << (kr.ok() ? "  (Carmichael, certificate verified)" : "") << "\n";
        std::vector<std::vector<std::string>> rows = {{"index", "d", "p"}};
        for (std::size_t i : solution->indices) {
            rows.push_back({std::to_string(i), to_decimal(pool.entries()[i].d),
                            to_decimal(pool.entries()[i].p)});
        }
        for (const Natural& q : solution->includes_pinned) {
            rows.push_back({"pinned", to_decimal(q - 1), to_decimal(q)});
        }
        print_table(rows);
    } else {
        std::cout << dump_json(out);
    }
    return kExitOk;
}

/// A ladder file is either a JSON array (rung objects, or bare moduli as
/// strings/numbers) or a plain list of decimal moduli separated by
/// whitespace. Bare moduli become erdos rungs.
std::vector<LadderRung> load_ladder(const std::string& path) {
    std::string text = slurp(path);
    std::vector<LadderRung> rungs;
    // A JSON array gets the structured treatment; anything else (including a
    // bare number, which is valid JSON) is read as whitespace-separated
    // decimal working moduli.
    std::optional<json> parsed;
    try {
        parsed = parse_json(text);
    } catch (const Error&) {
    }
    if (parsed && parsed->is_array()) {
        for (const json& item : *parsed) {
            try {
                if (item.is_object()) {
                    rungs.push_back(rung_from_json(item));
                } else if (item.is_string()) {
                    LadderRung r;
                    r.M = parse_natural(item.get<std::string>(), "ladder modulus");
                    rungs.push_back(r);
                } else if (item.is_number_unsigned()) {
                    LadderRung r;
                    r.M = item.get<std::uint64_t>();
                    rungs.push_back(r);
                } else {
                    throw UsageError("ladder '" + path + "': unsupported entry type");
                }
            } catch (const Error& e) {
                throw UsageError("ladder '" + path + "': " + std::string(e.what()));
            }
        }
    } else {
        std::stringstream stream(text);
        std::string token;
        while (stream >> token) {
            LadderRung r;
            r.M = parse_natural(token, "ladder modulus");
            rungs.push_back(r);
        }
    }
    if (rungs.empty()) throw UsageError("ladder '" + path + "' holds no moduli");
    return rungs;
}

int cmd_target_omega(const Config& cfg, unsigned R, const std::string& ladder_path,
                     bool require_pinned, const std::string& pinned_prime_text,
                     std::uint64_t budget, Format format) {
    TargetOmegaOptions options;
    options.search.budget = budget;
    options.pool.pinned_candidates = parse_natural_list(cfg.pinned, "pinned candidates");
    options.pool.factor = factor_config(cfg);
    options.factor = factor_config(cfg);
    options.require_pinned = require_pinned;
    options.pinned_prime = parse_natural(pinned_prime_text, "--pinned-prime");
    std::string path = !ladder_path.empty() ? ladder_path : cfg.ladder_path;
    if (!path.empty()) options.ladder = load_ladder(path);

    TargetOmegaResult result = target_omega(R, options);
    if (format == Format::table) {
        const LadderRung& rung = result.rung;
        std::cout << to_decimal(result.certificate.n) << " = "
                  << factors_compact(result.certificate.factors) << "\n";
        std::cout << "omega " << result.certificate.factors.omega() << "  rung "
                  << (rung.mode == PoolMode::erdos
                          ? "erdos M=" + to_decimal(rung.M)
                          : "agp budget=" + std::to_string(rung.prime_budget))
                  << "  pool entries " << result.pool.entries().size() << "  pinned path "
                  << (result.used_pinned_path ? "yes" : "no") << "\n";
        if (!result.solution.includes_pinned.empty()) {
            std::string pinned;
            for (const Natural& q : result.solution.includes_pinned) {
                if (!pinned.empty()) pinned += ", ";
                pinned += to_decimal(q);
            }
            std::cout << "pinned primes used: " << pinned << "\n";
        }
    } else {
        std::cout << dump_json(to_json(result));
    }
    return kExitOk;
}

int cmd_davenport(const Config& cfg, const std::string& group_text, const std::string& L_text,
                  const std::string& reading_name, Format format) {
    if (group_text.empty() == L_text.empty()) {
        throw UsageError("davenport requires exactly one of --group or --L");
    }
    json out;
    std::vector<std::vector<std::string>> rows;
    if (!group_text.empty()) {
        std::vector<std::uint64_t> orders;
        for (const std::string& item : split(group_text, ',')) {
            orders.push_back(parse_u64(item, "--group order"));
        }
        AbelianGroupSpec G(orders);
        unsigned exact = davenport_exact(G);
        json orders_json = json::array();
        for (std::uint64_t d : orders) orders_json.push_back(d);
        out = {{"group", orders_json}, {"exact", exact}};
        rows = {{"group", "exact"}, {group_text, std::to_string(exact)}};
    } else {
        BoundReading reading = BoundReading::phi;
        if (reading_name == "modulus") {
            reading = BoundReading::modulus;
        } else if (reading_name != "phi") {
            throw UsageError("unknown reading '" + reading_name + "' (expected phi or modulus)");
        }
        Factorization L = factorize(parse_natural(L_text, "--L"), factor_config(cfg));
        UnitGroupStructure U = unit_group_structure(L, 1'000'000, factor_config(cfg));
        Natural bound = davenport_bound(L, reading);
        json exact = nullptr;
        std::string exact_text = "(group too large)";
        try {
            unsigned value = davenport_exact(U.spec());
            exact = value;
            exact_text = std::to_string(value);
        } catch (const GroupTooLarge&) {
            // The bound still stands; exact stays null.
        }
        json orders_json = json::array();
        for (std::uint64_t d : U.spec().cyclic_orders()) orders_json.push_back(d);
        out = {{"modulus", to_decimal(L.value())},
               {"group", orders_json},
               {"bound", to_decimal(bound)},
               {"exact", exact}};
        rows = {{"modulus", "bound", "exact"},
                {to_decimal(L.value()), to_decimal(bound), exact_text}};
    }
    if (format == Format::table) {
        print_table(rows);
    } else {
        std::cout << dump_json(out);
    }
    return kExitOk;
}

void print_uniformity(const UniformityReport& r, Format format) {
    if (format == Format::json) {
        std::cout << dump_json(to_json(r));
        return;
    }
    std::vector<std::vector<std::string>> rows = {{"class", "count"}};
    for (std::size_t i = 0; i < r.classes.size(); ++i) {
        rows.push_back({to_decimal(r.classes[i]), std::to_string(r.counts[i])});
    }
    if (format == Format::csv) {
        print_csv(rows);
        return;
    }
    print_table(rows);
    std::cout << "samples " << r.sample_size << "  expected " << r.expected
              << "  max_rel_deviation " << r.max_rel_deviation << "  chi_square " << r.chi_square
              << "\n";
}

int cmd_equidist(const Config& cfg, const std::string& report, const std::string& pool_ref,
                 const std::string& L_text, const std::string& m_text,
                 const std::string& kp_text, std::optional<unsigned> w, unsigned t,
                 std::uint64_t samples, std::uint64_t seed, double threshold, Format format) {
    FactorConfig fc = factor_config(cfg);
    if (report == "uniformity") {
        if (m_text.empty()) throw UsageError("equidist --report uniformity requires --m");
        Natural L;
        if (!L_text.empty()) {
            L = parse_natural(L_text, "--L");
        } else if (!pool_ref.empty()) {
            L = load_pool_ref(pool_ref, cfg).working_modulus();
        } else {
            throw UsageError("equidist --report uniformity requires --L or --pool");
        }
        print_uniformity(divisor_uniformity(factorize(L, fc), w, parse_natural(m_text, "--m")),
                         format);
        return kExitOk;
    }
    if (pool_ref.empty()) throw UsageError("equidist --report " + report + " requires --pool");
    PrimePool pool = load_pool_ref(pool_ref, cfg);
    if (report == "products") {
        if (kp_text.empty()) throw UsageError("equidist --report products requires --kp");
        print_uniformity(
            product_residue_sampling(pool, t, samples, parse_natural(kp_text, "--kp"), seed),
            format);
        return kExitOk;
    }
    if (report == "chars") {
        if (kp_text.empty()) throw UsageError("equidist --report chars requires --kp");
        CharacterReport r = char_nonconstancy(pool, factorize(parse_natural(kp_text, "--kp"), fc), fc);
        if (format == Format::json) {
            std::cout << dump_json(to_json(r));
        } else {
            std::cout << "modulus " << to_decimal(r.modulus) << "  units " << r.units
                      << "  skipped " << r.skipped << "\n";
            std::vector<std::vector<std::string>> rows = {
                {"chi", "order", "min_disagreement", "threshold"}};
            for (const CharacterNonconstancy& row : r.rows) {
                rows.push_back({chi_compact(row.chi), std::to_string(row.order),
                                std::to_string(row.min_disagreement),
                                std::to_string(row.threshold)});
            }
            format == Format::csv ? print_csv(rows) : print_table(rows);
        }
        return kExitOk;
    }
    if (report == "cosets") {
        if (kp_text.empty()) throw UsageError("equidist --report cosets requires --kp");
        CosetReport r =
            coset_avoidance(pool, factorize(parse_natural(kp_text, "--kp"), fc), threshold, fc);
        if (format == Format::json) {
            std::cout << dump_json(to_json(r));
        } else {
            std::cout << "modulus " << to_decimal(r.modulus) << "  units " << r.units
                      << "  skipped " << r.skipped << "  majority_threshold "
                      << r.majority_threshold << "\n";
            std::vector<std::vector<std::string>> rows = {
                {"ell", "chi", "counts", "max_fraction", "majority"}};
            for (const CosetRow& row : r.rows) {
                std::string counts;
                for (std::uint64_t c : row.counts) {
                    if (!counts.empty()) counts += "/";
                    counts += std::to_string(c);
                }
                rows.push_back({std::to_string(row.ell), chi_compact(row.chi), counts,
                                std::to_string(row.max_fraction), row.majority ? "yes" : "no"});
            }
            format == Format::csv ? print_csv(rows) : print_table(rows);
        }
        return kExitOk;
    }
    throw UsageError("unknown report '" + report +
                     "' (expected uniformity, chars, products, or cosets)");
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

int classify_error(const Error& e) {
    bool budget = dynamic_cast<const BudgetExceeded*>(&e) != nullptr ||
                  dynamic_cast<const LimitExceeded*>(&e) != nullptr ||
                  dynamic_cast<const FactorizationTimeout*>(&e) != nullptr ||
                  dynamic_cast<const DiscreteLogBudget*>(&e) != nullptr ||
                  dynamic_cast<const GroupTooLarge*>(&e) != nullptr ||
                  dynamic_cast<const TooLong*>(&e) != nullptr;
    std::cout << dump_json({{"error", budget ? "budget" : "domain"}, {"detail", e.what()}});
    return budget ? kExitBudget : kExitDomain;
}

int run(int argc, char** argv) {
    // Config resolution: defaults, then the config file (--config flag,
    // else CARMKIT_CONFIG), then CARMKIT_CACHE_DIR, then flags.
    Config cfg;
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    }
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
    }
    if (config_path.empty()) {
        if (const char* env = std::getenv("CARMKIT_CONFIG")) config_path = env;
    }
    if (!config_path.empty()) load_config_file(config_path, cfg);
    if (const char* env = std::getenv("CARMKIT_CACHE_DIR")) cfg.cache_dir = env;

    CLI::App app{"carmkit: construct and verify Carmichael numbers with a chosen number of prime factors"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "carmkit 1.0.0");
    app.add_option("--config", config_path, "key-value config file (already applied)");
    app.add_option("--cache-dir", cfg.cache_dir, "pool cache directory");
    app.add_option("--seed", cfg.seed, "seed for sampled reports");
    std::string format_name = "json";
    app.add_option("--format", format_name, "output format: json, table, or csv")
        ->capture_default_str();

    int rc = kExitOk;

    auto* verify = app.add_subcommand("verify", "decide the Korselt criterion for n");
    std::string verify_n;
    verify->add_option("n", verify_n, "number to test")->required();
    verify->callback([&] { rc = cmd_verify(cfg, verify_n, parse_format(format_name)); });

    auto* enumerate = app.add_subcommand("enumerate", "list all Carmichael numbers up to a limit");
    std::uint64_t enum_limit = 0;
    std::optional<unsigned> enum_omega;
    std::string enum_strategy = "korselt";
    bool enum_histogram = false;
    unsigned enum_workers = 1;
    enumerate->add_option("--limit", enum_limit, "inclusive upper bound (default: oracle_limit)");
    enumerate->add_option("--omega", enum_omega, "keep only omega = R");
    enumerate->add_option("--strategy", enum_strategy, "korselt or fermat")
        ->capture_default_str();
    enumerate->add_flag("--histogram", enum_histogram, "print the omega histogram instead");
    enumerate->add_option("--workers", enum_workers, "scan worker threads")->capture_default_str();
    enumerate->callback([&] {
        rc = cmd_enumerate(cfg, enum_limit ? enum_limit : cfg.oracle_limit, enum_omega,
                           enum_strategy, enum_histogram, enum_workers, parse_format(format_name));
    });

    auto* pool = app.add_subcommand("pool", "build (and cache) a prime pool");
    std::string pool_mode = "erdos", pool_M, pool_L, pool_kmax;
    std::optional<unsigned> pool_w;
    unsigned pool_ord2 = 2;
    bool pool_no_cache = false;
    pool->add_option("--mode", pool_mode, "erdos or agp")->capture_default_str();
    pool->add_option("--M", pool_M, "erdos working modulus (even)");
    pool->add_option("--L", pool_L, "agp divisor source L");
    pool->add_option("--kmax", pool_kmax, "agp multiplier search bound");
    pool->add_option("--w", pool_w, "keep divisors with exactly w prime factors");
    pool->add_option("--ord2-cap", pool_ord2, "cap on ord_2(p - 1); 0 disables")
        ->capture_default_str();
    pool->add_flag("--no-cache", pool_no_cache, "bypass the pool cache");
    pool->callback([&] {
        rc = cmd_pool(cfg, pool_mode, pool_M, pool_L, pool_kmax, pool_w, pool_ord2, pool_no_cache,
                      parse_format(format_name));
    });

    auto* construct = app.add_subcommand("construct", "search a pool for a subset product hitting a target");
    std::string con_pool, con_g = "1", con_mod, con_parity = "any", con_exclude,
                con_strategy = "auto";
    std::optional<unsigned> con_size;
    bool con_pin = true;
    std::uint64_t con_budget = cfg.search_budget;
    construct->add_option("--pool", con_pool, "pool file, erdos:<M>, or agp:<L>:<k>")->required();
    construct->add_option("--g", con_g, "target residue")->capture_default_str();
    construct->add_option("--size", con_size, "exact number of primes");
    construct->add_option("--mod", con_mod, "size constraint 'a,h': size = a (mod h)");
    construct->add_option("--parity", con_parity, "any, even, or odd")->capture_default_str();
    construct->add_flag("--pin,!--no-pin", con_pin, "allow pinned primes in solutions");
    construct->add_option("--exclude", con_exclude, "comma-separated primes to avoid");
    construct->add_option("--strategy", con_strategy, "auto, exhaustive, or mitm")
        ->capture_default_str();
    construct->add_option("--budget", con_budget, "search node budget")->capture_default_str();
    construct->callback([&] {
        rc = cmd_construct(cfg, con_pool, con_g, con_size, con_mod, con_parity, con_pin,
                           con_exclude, con_strategy, con_budget, parse_format(format_name));
    });

    auto* target = app.add_subcommand("target-omega", "find a Carmichael number with exactly R prime factors");
    unsigned target_R = 0;
    std::string target_ladder, target_pinned = "3";
    bool target_require_pinned = false;
    std::uint64_t target_budget = cfg.search_budget;
    target->add_option("--R", target_R, "required number of prime factors")->required();
    target->add_option("--ladder", target_ladder, "modulus ladder file");
    target->add_flag("--require-pinned", target_require_pinned,
                     "odd R: force the pinned-prime decomposition");
    target->add_option("--pinned-prime", target_pinned, "prime forced on the fallback path")
        ->capture_default_str();
    target->add_option("--budget", target_budget, "search node budget per attempt")
        ->capture_default_str();
    target->callback([&] {
        rc = cmd_target_omega(cfg, target_R, target_ladder, target_require_pinned, target_pinned,
                              target_budget, parse_format(format_name));
    });

    auto* davenport = app.add_subcommand("davenport", "Davenport constant: exact value and unit-group bound");
    std::string dav_group, dav_L, dav_reading = "phi";
    davenport->add_option("--group", dav_group, "cyclic orders, e.g. 2,2");
    davenport->add_option("--L", dav_L, "square-free modulus; uses its unit group");
    davenport->add_option("--reading", dav_reading, "bound reading: phi or modulus")
        ->capture_default_str();
    davenport->callback(
        [&] { rc = cmd_davenport(cfg, dav_group, dav_L, dav_reading, parse_format(format_name)); });

    auto* equidist = app.add_subcommand("equidist", "distribution reports over pools and divisors");
    std::string eq_report, eq_pool, eq_L, eq_m, eq_kp;
    std::optional<unsigned> eq_w;
    unsigned eq_t = 3;
    std::uint64_t eq_samples = 10'000;
    double eq_threshold = 0.5;
    equidist->add_option("--report", eq_report, "uniformity, chars, products, or cosets")
        ->required();
    equidist->add_option("--pool", eq_pool, "pool file, erdos:<M>, or agp:<L>:<k>");
    equidist->add_option("--L", eq_L, "divisor source for uniformity");
    equidist->add_option("--m", eq_m, "class modulus for uniformity");
    equidist->add_option("--kp", eq_kp, "character / residue modulus");
    equidist->add_option("--w", eq_w, "restrict divisors to exactly w prime factors");
    equidist->add_option("--t", eq_t, "product length for sampling")->capture_default_str();
    equidist->add_option("--samples", eq_samples, "sample count")->capture_default_str();
    equidist->add_option("--threshold", eq_threshold, "majority fraction for coset rows")
        ->capture_default_str();
    equidist->callback([&] {
        rc = cmd_equidist(cfg, eq_report, eq_pool, eq_L, eq_m, eq_kp, eq_w, eq_t, eq_samples,
                          cfg.seed, eq_threshold, parse_format(format_name));
    });

    // Global options (--format, --seed, ...) may appear after the
    // subcommand name; unmatched subcommand arguments fall through.
    for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        return classify_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}
