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

#pragma once

#include <optional>
#include <string>

#include "carmkit/carmichael.hpp"
#include "carmkit/construct.hpp"
#include "carmkit/equidist.hpp"
#include "carmkit/numtheory.hpp"
#include "json.hpp"

namespace carmkit {

/// Bumped whenever any serialized layout changes. Cache envelopes carrying
/// a different version are rebuilt, never migrated.
inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Integers and documents
// ---------------------------------------------------------------------------
// Every big integer crosses the JSON boundary as a decimal string: numbers
// here routinely exceed 64 bits and JSON number semantics are lossy.

std::string to_decimal(const Natural& n);

/// Strict inverse of to_decimal: nonempty, digits only. Throws Error.
Natural natural_from_decimal(const std::string& text);

/// Canonical rendering used everywhere a document leaves the library:
/// sorted keys, two-space indent, trailing newline. Repeated runs over
/// equal values are byte-identical.
std::string dump_json(const nlohmann::json& j);

/// Parses text; throws Error on malformed JSON.
nlohmann::json parse_json(const std::string& text);

// ---------------------------------------------------------------------------
// Serializers
// ---------------------------------------------------------------------------

nlohmann::json to_json(const Factorization& f);
nlohmann::json to_json(const KorseltCertificate& certificate);
nlohmann::json to_json(const PrimePool& pool);
nlohmann::json to_json(const SubsetSolution& solution);
nlohmann::json to_json(const LadderRung& rung);
nlohmann::json to_json(const TargetOmegaResult& result);
nlohmann::json to_json(const UniformityReport& report);
nlohmann::json to_json(const CharacterReport& report);
nlohmann::json to_json(const CosetReport& report);

// ---------------------------------------------------------------------------
// Deserializers
// ---------------------------------------------------------------------------
// Deserialized data is never trusted: every loader re-validates the full
// invariant set of its type (primality, divisibility, recomputed products
// and statistics) and throws Error on any mismatch.

Factorization factorization_from_json(const nlohmann::json& j, const FactorConfig& cfg = {});
KorseltCertificate certificate_from_json(const nlohmann::json& j);
PrimePool pool_from_json(const nlohmann::json& j, const FactorConfig& cfg = {});

/// Structure and ranges are checked here; product and target compliance are
/// rechecked against a pool inside target_result_from_json or by calling
/// SubsetSolution::revalidate.
SubsetSolution solution_from_json(const nlohmann::json& j);

LadderRung rung_from_json(const nlohmann::json& j);
TargetOmegaResult target_result_from_json(const nlohmann::json& j, const FactorConfig& cfg = {});
UniformityReport uniformity_from_json(const nlohmann::json& j);
CharacterReport characters_from_json(const nlohmann::json& j);
CosetReport cosets_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Cache envelopes
// ---------------------------------------------------------------------------

/// Wraps a payload for disk: {"schema_version", "key", "payload"}.
nlohmann::json cache_envelope(nlohmann::json key, nlohmann::json payload);

/// Returns the payload when the envelope is an object carrying the current
/// schema version and exactly the given key; nullopt otherwise (the caller
/// rebuilds). Never throws on malformed envelopes.
std::optional<nlohmann::json> cache_payload(const nlohmann::json& envelope,
                                            const nlohmann::json& key);

}  // namespace carmkit
