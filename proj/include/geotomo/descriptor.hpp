#pragma once

// JSON body descriptors:
//   {"dim": n, "type": "ball" | "ellipsoid" | "lp" | "perturbed_ball" | "power" |
//    "radial_sum" | "dilate" | "ellipsoid_sum" | "expansion", ...}
// Matrices are flat row-major arrays of n*n numbers (a list of rows is also
// accepted on input). Errors name the JSON path of the offending element,
// e.g. "ellipsoid.matrix not positive definite".

#include <string>

#include "json.hpp"

#include "geotomo/star_bodies.hpp"

namespace geotomo {

using Json = nlohmann::json;

StarBody body_from_json(const Json& j);
/// Throws InvalidArgument for bodies without a descriptor form (function, intersection_body).
Json body_to_json(const StarBody& k);

Perturbation perturbation_from_json(const Json& j, int n, const std::string& path = "perturbation");
Json perturbation_to_json(const Perturbation& phi);

Json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const Json& j, int n, const std::string& path);

/// Reads and parses a descriptor file; IO failures and malformed JSON throw DescriptorError.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
StarBody load_body(const std::string& path);

}  // namespace geotomo
