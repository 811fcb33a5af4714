#pragma once

// JSON encodings shared by the CLI configuration and reports. Objects are
// written with a fixed field order so reports diff cleanly.

#include <nlohmann/json.hpp>

#include "opquant/construction.hpp"
#include "opquant/operators.hpp"
#include "opquant/quantities.hpp"
#include "opquant/seqspace.hpp"

namespace opquant {

using Json = nlohmann::ordered_json;

Json to_json(const TailVector& v);
Json to_json(SpaceConfig space);
Json to_json(const Operator& T);
Json to_json(const Subspace& M);
Json to_json(const QuantityEstimate& e);
Json to_json(const CaseReport& r);
Json to_json(const BiorthogonalSystem& s);
Json to_json(const DenseIntersectionReport& r);

/// Parsers throw Error(config_error) naming the offending field relative to
/// `path` (e.g. "operator.periodic").
TailVector tail_vector_from_json(const Json& j, const std::string& path);
SpaceConfig space_from_json(const Json& j, const std::string& path);
Operator operator_from_json(const Json& j, const std::string& path);

}  // namespace opquant
