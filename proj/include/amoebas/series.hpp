#pragma once

#include "amoebas/laurent.hpp"
#include "amoebas/rational.hpp"

#include <map>
#include <vector>

namespace amoebas {

/// Laurent polynomial with exact rational coefficients (zero terms never stored).
using ExactPolynomial = std::map<ExponentVector, Rational>;

/// Exact copy of a polynomial whose coefficients are real; each double is
/// taken at its exact binary value. Throws DomainError on a nonzero imaginary part.
ExactPolynomial to_exact(const LaurentPolynomial& p);

/// Multivariate power series truncated to the box 0 <= e_j <= degree_bound_j.
///
/// Supports are confined to the nonnegative orthant, so products truncated to
/// the box are exact: no discarded term can ever come back into the box.
class TruncatedSeries {
 public:
  explicit TruncatedSeries(ExponentVector degree_bound);
  /// Throws InputError for negative exponents; terms beyond the box are dropped.
  static TruncatedSeries from_polynomial(const ExactPolynomial& p, ExponentVector degree_bound);
  static TruncatedSeries one(ExponentVector degree_bound);

  std::size_t dimension() const noexcept { return bound_.size(); }
  const ExponentVector& degree_bound() const noexcept { return bound_; }
  bool in_box(const ExponentVector& e) const;

  /// Throws TruncationError outside the box.
  const Rational& coefficient(const ExponentVector& e) const;
  void set(const ExponentVector& e, Rational value);
  bool is_integral() const;

  TruncatedSeries& operator+=(const TruncatedSeries& other);
  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);
  friend bool operator==(const TruncatedSeries&, const TruncatedSeries&) = default;

  /// Visits every stored (exponent, coefficient), zero or not, in row-major order.
  template <typename F>
  void for_each(F&& f) const {
    ExponentVector e(bound_.size(), 0);
    for (std::size_t flat = 0; flat < data_.size(); ++flat) {
      f(static_cast<const ExponentVector&>(e), data_[flat]);
      advance(e);
    }
  }

 private:
  std::size_t flat_index(const ExponentVector& e) const;
  void advance(ExponentVector& e) const;

  ExponentVector bound_;
  std::vector<std::size_t> stride_;
  std::vector<Rational> data_;
};

/// Z^N within Z's box, by binary powering.
TruncatedSeries series_power(const TruncatedSeries& z, long power);

/// Taylor coefficients of P/Q in the box by the recurrence
/// c_a = (p_a - sum_{b != 0} q_b c_{a-b}) / q_0. Requires Q(0) != 0 and
/// nonnegative supports.
TruncatedSeries series_divide(const ExactPolynomial& p, const ExactPolynomial& q, ExponentVector degree_bound);

/// Coefficient c_alpha of the Laurent expansion of P/Q attached to the
/// complement component of the vertex nu of Newt(Q), via the geometric series
///   1/Q = sum_k (-1)^k g^k / (a_nu z^nu)^(k+1),   g = Q - a_nu z^nu.
/// The truncation order is derived from an integral weight strictly
/// increasing along Newt(Q) - nu; TruncationError if it exceeds max_order.
Rational laurent_oracle(const LaurentPolynomial& p, const LaurentPolynomial& q, const ExponentVector& nu,
                        const ExponentVector& alpha, long max_order = 4096);

}  // namespace amoebas
