#pragma once

// JSON documents exchanged with the outside world.

#include <string>
#include <vector>

#include "json.hpp"

#include "branchlab/quantum.hpp"

namespace branchlab::io {

using Json = nlohmann::ordered_json;

/// {state: [{label, re, im[, exact]}], observable: {name, eigenvalues},
///  payoff: {"<eigenvalue>": {consequence, utility}}}
///
/// `exact` is an optional "m/n" string giving |amplitude|^2 exactly; the
/// amplitude is then +-sqrt(m/n) with the sign of `re`.
Json game_to_json(const quantum::QuantumGame& game);

/// Throws ValidationError naming the offending field, or the first invariant
/// the parsed game violates.
quantum::QuantumGame game_from_json(const Json& doc);

/// A single game object or a list of them.
std::vector<quantum::QuantumGame> games_from_json(const Json& doc);

/// Canonical text for an eigenvalue used as a JSON object key.
std::string eigenvalue_key(double x);

/// Reads a whole file; throws ValidationError with the parser's line and
/// column when the JSON is malformed.
Json read_json_file(const std::string& path);

}  // namespace branchlab::io
