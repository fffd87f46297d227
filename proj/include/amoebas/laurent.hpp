#pragma once

#include <complex>
#include <initializer_list>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace amoebas {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;
using RealVector = std::vector<double>;

/// Integer exponent (or energy, or order) vector in Z^n.
using ExponentVector = std::vector<long>;

/// Integer power that also handles negative exponents; zero base with a
/// negative exponent throws DomainError.
Complex ipow(Complex base, long exponent);

/// Finite Laurent polynomial sum a_alpha z^alpha over an exponent support in Z^n.
///
/// Terms are kept in lexicographic exponent order, zero coefficients are
/// never stored. Axis indices are zero-based throughout the library.
class LaurentPolynomial {
 public:
  using Terms = std::map<ExponentVector, Complex>;

  explicit LaurentPolynomial(std::size_t n = 1);
  LaurentPolynomial(std::size_t n, std::initializer_list<std::pair<ExponentVector, Complex>> terms);

  static LaurentPolynomial constant(std::size_t n, Complex c);
  static LaurentPolynomial monomial(ExponentVector exponent, Complex c = 1.0);
  /// The coordinate function z_axis.
  static LaurentPolynomial variable(std::size_t n, std::size_t axis);

  std::size_t dimension() const noexcept { return n_; }
  const Terms& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  Complex coefficient(const ExponentVector& exponent) const;
  std::vector<ExponentVector> support() const;

  /// Adds c z^exponent, dropping the term if it cancels.
  void add_term(const ExponentVector& exponent, Complex c);

  Complex evaluate(std::span<const Complex> z) const;
  /// sum |a_alpha| |z^alpha|, the natural scale for residual tests.
  double abs_scale(std::span<const Complex> z) const;

  /// d/dz_axis.
  LaurentPolynomial partial(std::size_t axis) const;
  /// Euler operator z_axis d/dz_axis (same support, coefficients scaled by alpha_axis).
  LaurentPolynomial euler(std::size_t axis) const;

  /// (min, max) exponent along an axis; (0, 0) for the zero polynomial.
  std::pair<long, long> exponent_range(std::size_t axis) const;

  /// Inserts a new coordinate at position `axis` with exponent 0 in every term.
  LaurentPolynomial with_new_axis(std::size_t axis) const;

  /// Multiplies by z^shift.
  LaurentPolynomial shifted(const ExponentVector& shift) const;

  LaurentPolynomial& operator+=(const LaurentPolynomial& other);
  LaurentPolynomial& operator-=(const LaurentPolynomial& other);
  LaurentPolynomial& operator*=(Complex c);

  friend LaurentPolynomial operator+(LaurentPolynomial a, const LaurentPolynomial& b) { return a += b; }
  friend LaurentPolynomial operator-(LaurentPolynomial a, const LaurentPolynomial& b) { return a -= b; }
  friend LaurentPolynomial operator*(LaurentPolynomial a, Complex c) { return a *= c; }
  friend LaurentPolynomial operator*(const LaurentPolynomial& a, const LaurentPolynomial& b);
  friend bool operator==(const LaurentPolynomial& a, const LaurentPolynomial& b) = default;

 private:
  void check_exponent(const ExponentVector& exponent) const;

  std::size_t n_;
  Terms terms_;
};

/// The graph hypersurface w - f(z) in n+1 variables, with w last.
LaurentPolynomial graph_polynomial(const LaurentPolynomial& f);

/// Free-function spelling of LaurentPolynomial::evaluate.
inline Complex evaluate(const LaurentPolynomial& p, std::span<const Complex> z) { return p.evaluate(z); }
inline LaurentPolynomial partial(const LaurentPolynomial& p, std::size_t axis) { return p.partial(axis); }

}  // namespace amoebas
