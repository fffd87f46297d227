#include "amoebas/io.hpp"

#include "amoebas/errors.hpp"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

using namespace amoebas;

TEST_CASE("polynomial JSON round trip") {
  const std::string text = R"({"n":2,"terms":[{"exp":[2,1],"re":1},{"exp":[1,1],"re":-4},{"exp":[0,0],"re":1,"im":0.5}]})";
  const LaurentPolynomial p = polynomial_from_json(load_json(text));
  CHECK(p.dimension() == 2);
  CHECK(p.terms().size() == 3);
  const LaurentPolynomial back = polynomial_from_json(to_json(p));
  CHECK(to_json(back).dump() == to_json(p).dump());
  CHECK(p.evaluate(ComplexVector{1.0, 1.0}) == Complex(-2.0, 0.5));
}

TEST_CASE("malformed polynomial JSON is an input error") {
  CHECK_THROWS_AS(polynomial_from_json(load_json(R"({"terms":[]})")), InputError);
  CHECK_THROWS_AS(polynomial_from_json(load_json(R"({"n":2,"terms":[{"exp":[1],"re":1}]})")), InputError);
  CHECK_THROWS_AS(polynomial_from_json(load_json(R"({"n":2,"terms":[{"exp":[1,0.5],"re":1}]})")), InputError);
  CHECK_THROWS_AS(polynomial_from_json(load_json(R"({"n":0,"terms":[]})")), InputError);
  CHECK_THROWS_AS(load_json("{not json"), InputError);
  CHECK_THROWS_AS(load_json("/nonexistent/file.json"), InputError);
}

TEST_CASE("spectrum JSON keeps shifts exact") {
  const Spectrum s = spectrum_from_json(load_json(R"({"n":1,"shift":["1/2"],"points":[[0],[1],[2]],"recession":[[1]]})"));
  CHECK(s.shift()[0] == Rational(1, 2));
  CHECK(s.size() == 3);
  CHECK(s.recession().size() == 1);
  const Spectrum decimal = spectrum_from_json(load_json(R"({"n":1,"shift":[0.1],"points":[[0],[1]]})"));
  CHECK(decimal.shift()[0] == Rational(1, 10));
  const Spectrum back = spectrum_from_json(to_json(s));
  CHECK(to_json(back).dump() == to_json(s).dump());
}

TEST_CASE("rational_from_json") {
  CHECK(rational_from_json(Json("3/4")) == Rational(3, 4));
  CHECK(rational_from_json(Json(5)) == Rational(5));
  CHECK(rational_from_json(Json::parse("0.25")) == Rational(1, 4));
  CHECK_THROWS_AS(rational_from_json(Json::array()), InputError);
}

TEST_CASE("list parsing") {
  CHECK(parse_rational_list("1/2,-3/4,2") == RationalPoint{Rational(1, 2), Rational(-3, 4), Rational(2)});
  CHECK(parse_real_list("-4,0.5,1e-3") == std::vector<double>{-4.0, 0.5, 1e-3});
  CHECK(parse_integer_list("1,-2,30") == std::vector<long>{1, -2, 30});
  CHECK_THROWS_AS(parse_integer_list("1,2.5"), InputError);
  CHECK_THROWS_AS(parse_real_list("1,x"), InputError);
  CHECK_THROWS_AS(parse_real_list("1,"), InputError);
  CHECK_THROWS_AS(parse_rational_list("1/0"), InputError);
}

TEST_CASE("fnv1a matches published test vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("format_real round-trips") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0}) CHECK(std::stod(format_real(v)) == v);
}

TEST_CASE("SVG scatter carries the header comment") {
  std::ostringstream out;
  write_svg_scatter(out, {{0.0, 0.0}, {1.0, 2.0}}, "amoebas test config 0123", "x1", "x2");
  const std::string svg = out.str();
  CHECK(svg.find("<!-- amoebas test config 0123 -->") != std::string::npos);
  CHECK(svg.find("<circle") != std::string::npos);
  CHECK(svg.rfind("</svg>") != std::string::npos);
  std::ostringstream empty;
  write_svg_scatter(empty, {}, "h", "a", "b");
  CHECK(empty.str().find("<circle") == std::string::npos);
}
