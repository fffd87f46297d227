#pragma once

#include "amoebas/ensemble.hpp"
#include "amoebas/laurent.hpp"
#include "amoebas/polytope.hpp"
#include "amoebas/rational.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace amoebas {

using Json = nlohmann::json;

/// {"n": 2, "terms": [{"exp": [1, 0], "re": -1.0, "im": 0.0}, ...]}; "im"
/// may be omitted. Repeated exponents are summed. Throws InputError.
LaurentPolynomial polynomial_from_json(const Json& j);
Json to_json(const LaurentPolynomial& p);

/// {"n": 1, "shift": ["1/2"], "points": [[0], [1]], "recession": [[1]]};
/// shift and recession are optional. Shift entries may be "p/q" strings or
/// JSON numbers, which are read from their decimal text.
Spectrum spectrum_from_json(const Json& j);
Json to_json(const Spectrum& s);

/// {"n": .., "vertices": [[num, den], ...] per coordinate, "recession": [...]}.
Json to_json(const Polyhedron& p);

/// Exact rational from a "p/q" string, an integer or a decimal number.
Rational rational_from_json(const Json& j);

/// Reads a JSON document from a file, or parses `source` directly when it
/// starts with '{'. Throws InputError on I/O or syntax errors.
Json load_json(const std::string& source);

/// Splits "a,b,c" and parses each entry exactly.
RationalPoint parse_rational_list(std::string_view text);
std::vector<double> parse_real_list(std::string_view text);
std::vector<long> parse_integer_list(std::string_view text);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Round-trip decimal for a double ("%.17g").
std::string format_real(double v);

/// Plain SVG scatter of 2-D points, axis-aligned bounding box with a margin.
void write_svg_scatter(std::ostream& out, const std::vector<std::array<double, 2>>& points,
                       const std::string& header_comment, const std::string& x_label, const std::string& y_label);

}  // namespace amoebas
