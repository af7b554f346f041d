#pragma once

#include <string>

#include <json.hpp>

#include "sympflow/linalg.hpp"

namespace sympflow {

using json = nlohmann::json;

/// {"rows": r, "cols": c, "re": [[...]], "im": [[...]]}. "im" may be omitted
/// on input for real matrices.
json matrix_to_json(const Mat& A);
Mat matrix_from_json(const json& j);

/// Reads and parses a JSON file; throws UsageError on I/O or parse failure.
json read_json_file(const std::string& path);

}  // namespace sympflow
