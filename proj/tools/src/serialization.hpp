#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"

#include "quiverstair/oracle.hpp"
#include "quiverstair/quiver.hpp"

namespace quiverstair::io {

inline constexpr int kFormatVersion = 1;

/// Malformed input file. The message starts with the offending field path or
/// the line and column of a syntax error.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Json = nlohmann::ordered_json;

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& path);

Json complex_to_json(cplx z);
cplx complex_from_json(const Json& j, const std::string& path);

/// Representation file: format tag, version, kind, t, orientation string,
/// dims and matrices with explicit rows/cols and [re, im] entries.
Json representation_to_json(const Representation& a);
Representation representation_from_json(const Json& j);

/// Ground-truth sidecar written next to generated representations.
Json plant_spec_to_json(const PlantSpec& spec);
PlantSpec plant_spec_from_json(const Json& j);

/// Reads and parses a JSON file; syntax errors become FormatError with the
/// line and column.
Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

Representation read_representation(const std::string& path);
PlantSpec read_plant_spec(const std::string& path);

}  // namespace quiverstair::io
