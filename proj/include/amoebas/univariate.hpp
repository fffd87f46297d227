#pragma once

#include "amoebas/laurent.hpp"

#include <span>
#include <vector>

namespace amoebas {

/// Dense univariate polynomial with complex coefficients in ascending degree.
/// Trailing zero coefficients are trimmed, so the leading coefficient is
/// nonzero unless the polynomial is identically zero.
class UnivariatePolynomial {
 public:
  UnivariatePolynomial() = default;
  explicit UnivariatePolynomial(ComplexVector coefficients);

  const ComplexVector& coefficients() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  /// Degree; -1 for the zero polynomial.
  long degree() const noexcept { return static_cast<long>(coeffs_.size()) - 1; }
  Complex operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : Complex(0.0); }

  Complex evaluate(Complex z) const;
  /// sum |a_k| |z|^k
  double abs_scale(Complex z) const;
  UnivariatePolynomial derivative() const;

  /// Number of vanishing low-order coefficients (multiplicity of the root at 0).
  std::size_t zero_root_multiplicity() const;
  /// Divides out z^zero_root_multiplicity().
  UnivariatePolynomial without_zero_roots() const;

  friend bool operator==(const UnivariatePolynomial&, const UnivariatePolynomial&) = default;

 private:
  ComplexVector coeffs_;
};

struct RootOptions {
  double tol = 1e-10;
  int max_iterations = 2000;
};

/// All complex roots with multiplicity, by Aberth-Ehrlich simultaneous
/// iteration started from scaled roots of unity on a circle given by the
/// Cauchy bound of the balanced polynomial. Each returned root satisfies
/// |p(r)| <= tol * sum |a_k||r|^k; otherwise NumericalError carries the best
/// backward error reached. Output is sorted by (modulus, argument).
ComplexVector roots(const UnivariatePolynomial& p, const RootOptions& options = {});

/// Restriction of a Laurent polynomial to a line parallel to one axis.
struct Fiber {
  /// z_axis^cleared * p(w_1, ..., z_axis, ..., w_{n-1}) as a polynomial in z_axis.
  UnivariatePolynomial poly;
  /// m = -(min exponent along the axis); a root of multiplicity m at z_axis = 0 is
  /// an artifact of clearing and is subtracted from every root count.
  long cleared = 0;

  /// Roots in C \ {0}, i.e. the actual intersections of the fiber with V.
  ComplexVector torus_roots(const RootOptions& options = {}) const;
  /// Winding number of p around |z_axis| = radius: zeros inside (counting the
  /// root at the origin) minus the cleared multiplicity.
  long winding_inside(double radius, const RootOptions& options = {}) const;
};

/// Substitutes `others` (the n-1 remaining coordinates in axis order) into p.
/// Throws DegenerateFiberError if the resulting polynomial vanishes identically.
Fiber fiber(const LaurentPolynomial& p, std::size_t axis, std::span<const Complex> others);

}  // namespace amoebas
