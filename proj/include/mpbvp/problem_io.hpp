#pragma once

#include <filesystem>
#include <string>

#include "mpbvp/problem.hpp"

namespace mpbvp {

/// Parse a problem document (JSON). Fields:
///   n        state dimension (required)
///   mode     "linear" (default) or "quasilinear"
///   A        n x n array of expression strings in t, or a list of such
///            arrays for the series terms A0..AK
///   f        n array of expression strings (quasilinear entries may use
///            x1..xn), or a list of such arrays f0..fK
///   points   list of { "t": real, "F": n x n numeric array }
///   alpha    n numeric array
///   eps      optional positive real
///   B        optional n x n expression array (base for the fixed-point solver)
///   split    optional list of n x n numeric arrays summing to the identity
/// Throws Error(IoError) for unreadable files, Error(SyntaxError) for broken
/// JSON and Error(InvalidInput) / ParseError for structural problems.
BvpProblem parse_problem_json(const std::string& text, const std::string& source_name);

BvpProblem load_problem(const std::filesystem::path& path);

}  // namespace mpbvp
