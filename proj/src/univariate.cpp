#include "amoebas/univariate.hpp"

#include "amoebas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace amoebas {

UnivariatePolynomial::UnivariatePolynomial(ComplexVector coefficients) : coeffs_(std::move(coefficients)) {
  while (!coeffs_.empty() && coeffs_.back() == Complex(0.0)) coeffs_.pop_back();
}

Complex UnivariatePolynomial::evaluate(Complex z) const {
  Complex acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double UnivariatePolynomial::abs_scale(Complex z) const {
  double r = std::abs(z);
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * r + std::abs(*it);
  return acc;
}

UnivariatePolynomial UnivariatePolynomial::derivative() const {
  if (coeffs_.size() <= 1) return UnivariatePolynomial();
  ComplexVector d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<double>(k);
  return UnivariatePolynomial(std::move(d));
}

std::size_t UnivariatePolynomial::zero_root_multiplicity() const {
  std::size_t m = 0;
  while (m < coeffs_.size() && coeffs_[m] == Complex(0.0)) ++m;
  return m;
}

UnivariatePolynomial UnivariatePolynomial::without_zero_roots() const {
  std::size_t m = zero_root_multiplicity();
  return UnivariatePolynomial(ComplexVector(coeffs_.begin() + static_cast<std::ptrdiff_t>(m), coeffs_.end()));
}

namespace {

double backward_error(const UnivariatePolynomial& p, Complex z) {
  double scale = p.abs_scale(z);
  return scale == 0.0 ? 0.0 : std::abs(p.evaluate(z)) / scale;
}

// Aberth-Ehrlich on a polynomial with nonzero constant term and degree >= 2.
ComplexVector aberth(const UnivariatePolynomial& p, const RootOptions& options) {
  const std::size_t d = static_cast<std::size_t>(p.degree());
  const auto& a = p.coefficients();

  // Balance the coefficients with z = s*y, s the geometric-mean root modulus.
  const double s = std::pow(std::abs(a[0]) / std::abs(a[d]), 1.0 / static_cast<double>(d));
  ComplexVector b(d + 1);
  double sk = 1.0;
  for (std::size_t k = 0; k <= d; ++k) {
    b[k] = a[k] * sk;
    sk *= s;
  }
  const Complex lead = b[d];
  for (auto& c : b) c /= lead;
  const UnivariatePolynomial q(b);
  const UnivariatePolynomial dq = q.derivative();

  double cauchy = 0.0;
  for (std::size_t k = 0; k < d; ++k) cauchy = std::max(cauchy, std::abs(b[k]));
  cauchy += 1.0;

  ComplexVector y(d);
  constexpr double kOffset = 0.4;  // breaks the symmetry of real-coefficient inputs
  for (std::size_t k = 0; k < d; ++k) {
    double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(d) + kOffset;
    y[k] = std::polar(cauchy, angle);
  }

  constexpr double kEps = 4.0 * std::numeric_limits<double>::epsilon();
  std::vector<bool> done(d, false);
  for (int it = 0; it < options.max_iterations; ++it) {
    bool all_done = true;
    for (std::size_t k = 0; k < d; ++k) {
      if (done[k]) continue;
      Complex pv = q.evaluate(y[k]);
      double scale = q.abs_scale(y[k]);
      if (std::abs(pv) <= kEps * scale) {
        done[k] = true;
        continue;
      }
      all_done = false;
      Complex ratio = pv / dq.evaluate(y[k]);
      Complex repulsion = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        if (j != k) repulsion += 1.0 / (y[k] - y[j]);
      }
      Complex step = ratio / (1.0 - ratio * repulsion);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
        step = ratio;
      }
      y[k] -= step;
      if (std::abs(step) <= kEps * std::abs(y[k])) done[k] = true;
    }
    if (all_done) break;
  }

  ComplexVector z(d);
  for (std::size_t k = 0; k < d; ++k) z[k] = y[k] * s;
  return z;
}

}  // namespace

ComplexVector roots(const UnivariatePolynomial& p, const RootOptions& options) {
  if (p.degree() < 1) throw InputError("root finding needs degree >= 1");

  const std::size_t zeros = p.zero_root_multiplicity();
  ComplexVector out(zeros, Complex(0.0));
  const UnivariatePolynomial core = p.without_zero_roots();

  if (core.degree() == 1) {
    out.push_back(-core[0] / core[1]);
  } else if (core.degree() >= 2) {
    ComplexVector r = aberth(core, options);
    out.insert(out.end(), r.begin(), r.end());
  }

  double worst = 0.0;
  for (const auto& r : out) worst = std::max(worst, backward_error(p, r));
  if (!(worst <= options.tol)) {
    throw NumericalError("root iteration did not converge", worst);
  }

  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma < mb;
    return std::arg(a) < std::arg(b);
  });
  return out;
}

ComplexVector Fiber::torus_roots(const RootOptions& options) const {
  UnivariatePolynomial core = poly.without_zero_roots();
  if (core.degree() < 1) return {};
  return roots(core, options);
}

long Fiber::winding_inside(double radius, const RootOptions& options) const {
  long count = static_cast<long>(poly.zero_root_multiplicity());
  for (const auto& r : torus_roots(options)) {
    if (std::abs(r) < radius) ++count;
  }
  return count - cleared;
}

Fiber fiber(const LaurentPolynomial& p, std::size_t axis, std::span<const Complex> others) {
  const std::size_t n = p.dimension();
  if (axis >= n) throw InputError("fiber axis out of range");
  if (others.size() + 1 != n) throw InputError("fiber needs n-1 fixed coordinates");

  auto [lo, hi] = p.exponent_range(axis);
  ComplexVector coeffs(static_cast<std::size_t>(hi - lo + 1), Complex(0.0));
  for (const auto& [e, c] : p.terms()) {
    Complex m = c;
    std::size_t k = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == axis) continue;
      m *= ipow(others[k++], e[j]);
    }
    coeffs[static_cast<std::size_t>(e[axis] - lo)] += m;
  }
  Fiber f{UnivariatePolynomial(std::move(coeffs)), -lo};
  if (f.poly.is_zero()) throw DegenerateFiberError("fiber polynomial vanishes identically");
  return f;
}

}  // namespace amoebas
