#include "amoebas/io.hpp"

#include "amoebas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace amoebas {

namespace {

const Json& field(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string(what) + ": missing \"" + key + "\"");
  return j.at(key);
}

std::size_t dimension_field(const Json& j, const char* what) {
  const Json& n = field(j, "n", what);
  if (!n.is_number_integer() || n.get<long>() < 1) throw InputError(std::string(what) + ": \"n\" must be a positive integer");
  return n.get<std::size_t>();
}

ExponentVector integer_vector(const Json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n) {
    throw InputError(std::string(what) + ": expected an integer array of length " + std::to_string(n));
  }
  ExponentVector v;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw InputError(std::string(what) + ": non-integer entry " + e.dump());
    v.push_back(e.get<long>());
  }
  return v;
}

double finite_number(const Json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(std::string(what) + ": non-finite number");
  return v;
}

template <typename T, typename F>
std::vector<T> split_list(std::string_view text, F&& parse) {
  std::vector<T> out;
  while (true) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    out.push_back(parse(item));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

LaurentPolynomial polynomial_from_json(const Json& j) {
  const std::size_t n = dimension_field(j, "polynomial");
  const Json& terms = field(j, "terms", "polynomial");
  if (!terms.is_array()) throw InputError("polynomial: \"terms\" must be an array");
  LaurentPolynomial p(n);
  for (const auto& t : terms) {
    const ExponentVector e = integer_vector(field(t, "exp", "polynomial term"), n, "polynomial term exponent");
    const double re = t.contains("re") ? finite_number(t.at("re"), "polynomial term re") : 0.0;
    const double im = t.contains("im") ? finite_number(t.at("im"), "polynomial term im") : 0.0;
    p.add_term(e, Complex(re, im));
  }
  return p;
}

Json to_json(const LaurentPolynomial& p) {
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"exp", e}, {"re", c.real()}, {"im", c.imag()}});
  return {{"n", p.dimension()}, {"terms", terms}};
}

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  // Read the literal as printed, so 0.1 means 1/10 rather than its binary neighbour.
  if (j.is_number()) return parse_rational(j.dump());
  throw InputError("expected a rational (\"p/q\" string or number), got " + j.dump());
}

Spectrum spectrum_from_json(const Json& j) {
  const std::size_t n = dimension_field(j, "spectrum");
  const Json& pts = field(j, "points", "spectrum");
  if (!pts.is_array()) throw InputError("spectrum: \"points\" must be an array");
  std::vector<ExponentVector> points;
  for (const auto& p : pts) points.push_back(integer_vector(p, n, "spectrum point"));

  RationalPoint shift(n, Rational(0));
  if (j.contains("shift")) {
    const Json& s = j.at("shift");
    if (!s.is_array() || s.size() != n) throw InputError("spectrum: \"shift\" must have length n");
    for (std::size_t i = 0; i < n; ++i) shift[i] = rational_from_json(s[i]);
  }
  std::vector<ExponentVector> recession;
  if (j.contains("recession")) {
    const Json& r = j.at("recession");
    if (!r.is_array()) throw InputError("spectrum: \"recession\" must be an array");
    for (const auto& ray : r) recession.push_back(integer_vector(ray, n, "spectrum recession ray"));
  }
  return Spectrum(std::move(points), std::move(shift), std::move(recession));
}

Json to_json(const Spectrum& s) {
  Json shift = Json::array();
  for (const auto& c : s.shift()) shift.push_back(to_string(c));
  return {{"n", s.dimension()}, {"shift", shift}, {"points", s.points()}, {"recession", s.recession()}};
}

Json to_json(const Polyhedron& p) {
  auto encode = [](const std::vector<RationalPoint>& pts) {
    Json out = Json::array();
    for (const auto& v : pts) {
      Json coords = Json::array();
      for (const auto& c : v) {
        coords.push_back({static_cast<long>(numerator(c)), static_cast<long>(denominator(c))});
      }
      out.push_back(coords);
    }
    return out;
  };
  return {{"n", p.dimension()}, {"vertices", encode(p.vertices())}, {"recession", encode(p.recession())}};
}

Json load_json(const std::string& source) {
  std::string text;
  const auto first = source.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && source[first] == '{') {
    text = source;
  } else {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw InputError("cannot read '" + source + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError("invalid JSON in '" + source.substr(0, 60) + "': " + e.what());
  }
}

RationalPoint parse_rational_list(std::string_view text) {
  return split_list<Rational>(text, [](std::string_view s) { return parse_rational(s); });
}

std::vector<double> parse_real_list(std::string_view text) {
  return split_list<double>(text, [](std::string_view s) {
    std::string item(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InputError("not a number: '" + item + "'");
    }
    if (used != item.size() || !std::isfinite(v)) throw InputError("not a finite number: '" + item + "'");
    return v;
  });
}

std::vector<long> parse_integer_list(std::string_view text) {
  return split_list<long>(text, [](std::string_view s) {
    const Rational r = parse_rational(s);
    if (denominator(r) != 1) throw InputError("not an integer: '" + std::string(s) + "'");
    return static_cast<long>(numerator(r));
  });
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_svg_scatter(std::ostream& out, const std::vector<std::array<double, 2>>& points,
                       const std::string& header_comment, const std::string& x_label, const std::string& y_label) {
  constexpr double width = 640.0, height = 640.0, margin = 48.0;
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  if (!points.empty()) {
    x_lo = x_hi = points.front()[0];
    y_lo = y_hi = points.front()[1];
    for (const auto& p : points) {
      x_lo = std::min(x_lo, p[0]);
      x_hi = std::max(x_hi, p[0]);
      y_lo = std::min(y_lo, p[1]);
      y_hi = std::max(y_hi, p[1]);
    }
  }
  if (x_hi - x_lo < 1e-12) x_hi = x_lo + 1.0;
  if (y_hi - y_lo < 1e-12) y_hi = y_lo + 1.0;
  const double sx = (width - 2 * margin) / (x_hi - x_lo);
  const double sy = (height - 2 * margin) / (y_hi - y_lo);

  char buf[160];
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- " << header_comment << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" viewBox=\"0 0 640 640\">\n";
  out << "<rect width=\"640\" height=\"640\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                margin, margin, width - 2 * margin, height - 2 * margin);
  out << buf;
  out << "<g fill=\"black\">\n";
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"0.8\"/>\n", margin + (p[0] - x_lo) * sx,
                  height - margin - (p[1] - y_lo) * sy);
    out << buf;
  }
  out << "</g>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"320\" y=\"630\" text-anchor=\"middle\" font-size=\"14\">%s [%.3g, %.3g]</text>\n",
                x_label.c_str(), x_lo, x_hi);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"16\" y=\"320\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 320)\">%s [%.3g, %.3g]</text>\n",
                y_label.c_str(), y_lo, y_hi);
  out << buf;
  out << "</svg>\n";
}

}  // namespace amoebas
