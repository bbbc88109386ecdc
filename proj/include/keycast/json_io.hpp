#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "keycast/code.hpp"
#include "keycast/feasibility.hpp"
#include "keycast/instance.hpp"
#include "keycast/search.hpp"
#include "keycast/transforms.hpp"

namespace keycast {

using Json = nlohmann::json;

inline constexpr const char* kInstanceFormat = "keycast-instance/1";
inline constexpr const char* kCodeFormat = "keycast-code/1";
inline constexpr const char* kReportFormat = "keycast-report/1";
inline constexpr const char* kSearchFormat = "keycast-search/1";

// Parsers throw PARSE on malformed documents; semantic checks are left to
// validate() and validate_code().
Json instance_to_json(const NetworkInstance& instance);
NetworkInstance instance_from_json(const Json& j);

Json code_to_json(const NetworkCode& code);
NetworkCode code_from_json(const Json& j);

Json rational_to_json(const Rational& r);
Rational rational_from_json(const Json& j);

Json validation_to_json(const ValidationReport& report);
// Counterexample assignments print as hex padded to report.total_bits.
Json report_to_json(const FeasibilityReport& report, const NetworkInstance& instance);
Json search_to_json(const SearchResult& result, const CodeShape& shape);
Json permutation_to_json(const Permutation& pi);
Permutation permutation_from_json(const Json& j);

// Lowercase hex, zero-padded to ceil(bits / 4) digits (at least one).
std::string hex_assignment(std::uint64_t m, int bits);

Json parse_json(std::istream& in);
// Pretty-printed with two-space indent, keys sorted, trailing newline.
std::string dump_json(const Json& j);

}  // namespace keycast
