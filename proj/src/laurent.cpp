#include "amoebas/laurent.hpp"

#include "amoebas/errors.hpp"

#include <algorithm>
#include <string>

namespace amoebas {

Complex ipow(Complex base, long exponent) {
  if (exponent == 0) return 1.0;
  if (base == Complex(0.0)) {
    if (exponent < 0) throw DomainError("zero coordinate raised to a negative power");
    return 0.0;
  }
  bool invert = exponent < 0;
  unsigned long e = invert ? static_cast<unsigned long>(-exponent) : static_cast<unsigned long>(exponent);
  Complex result = 1.0;
  Complex b = base;
  while (e != 0) {
    if (e & 1UL) result *= b;
    e >>= 1;
    if (e != 0) b *= b;
  }
  return invert ? 1.0 / result : result;
}

LaurentPolynomial::LaurentPolynomial(std::size_t n) : n_(n) {
  if (n == 0) throw InputError("Laurent polynomial needs dimension n >= 1");
}

LaurentPolynomial::LaurentPolynomial(std::size_t n,
                                     std::initializer_list<std::pair<ExponentVector, Complex>> terms)
    : LaurentPolynomial(n) {
  for (const auto& [e, c] : terms) add_term(e, c);
}

LaurentPolynomial LaurentPolynomial::constant(std::size_t n, Complex c) {
  LaurentPolynomial p(n);
  p.add_term(ExponentVector(n, 0), c);
  return p;
}

LaurentPolynomial LaurentPolynomial::monomial(ExponentVector exponent, Complex c) {
  LaurentPolynomial p(exponent.size());
  p.add_term(exponent, c);
  return p;
}

LaurentPolynomial LaurentPolynomial::variable(std::size_t n, std::size_t axis) {
  if (axis >= n) throw InputError("axis out of range");
  ExponentVector e(n, 0);
  e[axis] = 1;
  return monomial(e);
}

void LaurentPolynomial::check_exponent(const ExponentVector& exponent) const {
  if (exponent.size() != n_) {
    throw InputError("exponent of length " + std::to_string(exponent.size()) +
                     " in a polynomial of dimension " + std::to_string(n_));
  }
}

Complex LaurentPolynomial::coefficient(const ExponentVector& exponent) const {
  auto it = terms_.find(exponent);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

std::vector<ExponentVector> LaurentPolynomial::support() const {
  std::vector<ExponentVector> out;
  out.reserve(terms_.size());
  for (const auto& [e, c] : terms_) out.push_back(e);
  return out;
}

void LaurentPolynomial::add_term(const ExponentVector& exponent, Complex c) {
  check_exponent(exponent);
  if (c == Complex(0.0)) return;
  auto [it, inserted] = terms_.try_emplace(exponent, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex(0.0)) terms_.erase(it);
  }
}

Complex LaurentPolynomial::evaluate(std::span<const Complex> z) const {
  if (z.size() != n_) throw InputError("evaluation point has wrong dimension");
  Complex sum = 0.0;
  for (const auto& [e, c] : terms_) {
    Complex m = c;
    for (std::size_t j = 0; j < n_; ++j) m *= ipow(z[j], e[j]);
    sum += m;
  }
  return sum;
}

double LaurentPolynomial::abs_scale(std::span<const Complex> z) const {
  if (z.size() != n_) throw InputError("evaluation point has wrong dimension");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = std::abs(c);
    for (std::size_t j = 0; j < n_; ++j) m *= std::abs(ipow(z[j], e[j]));
    sum += m;
  }
  return sum;
}

LaurentPolynomial LaurentPolynomial::partial(std::size_t axis) const {
  if (axis >= n_) throw InputError("axis out of range");
  LaurentPolynomial out(n_);
  for (const auto& [e, c] : terms_) {
    if (e[axis] == 0) continue;
    ExponentVector d = e;
    d[axis] -= 1;
    out.add_term(d, c * static_cast<double>(e[axis]));
  }
  return out;
}

LaurentPolynomial LaurentPolynomial::euler(std::size_t axis) const {
  if (axis >= n_) throw InputError("axis out of range");
  LaurentPolynomial out(n_);
  for (const auto& [e, c] : terms_) {
    if (e[axis] != 0) out.add_term(e, c * static_cast<double>(e[axis]));
  }
  return out;
}

std::pair<long, long> LaurentPolynomial::exponent_range(std::size_t axis) const {
  if (axis >= n_) throw InputError("axis out of range");
  if (terms_.empty()) return {0, 0};
  long lo = terms_.begin()->first[axis];
  long hi = lo;
  for (const auto& [e, c] : terms_) {
    lo = std::min(lo, e[axis]);
    hi = std::max(hi, e[axis]);
  }
  return {lo, hi};
}

LaurentPolynomial LaurentPolynomial::with_new_axis(std::size_t axis) const {
  if (axis > n_) throw InputError("axis out of range");
  LaurentPolynomial out(n_ + 1);
  for (const auto& [e, c] : terms_) {
    ExponentVector f = e;
    f.insert(f.begin() + static_cast<std::ptrdiff_t>(axis), 0);
    out.add_term(f, c);
  }
  return out;
}

LaurentPolynomial LaurentPolynomial::shifted(const ExponentVector& shift) const {
  check_exponent(shift);
  LaurentPolynomial out(n_);
  for (const auto& [e, c] : terms_) {
    ExponentVector f = e;
    for (std::size_t j = 0; j < n_; ++j) f[j] += shift[j];
    out.add_term(f, c);
  }
  return out;
}

LaurentPolynomial& LaurentPolynomial::operator+=(const LaurentPolynomial& other) {
  if (other.n_ != n_) throw InputError("dimension mismatch in polynomial sum");
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

LaurentPolynomial& LaurentPolynomial::operator-=(const LaurentPolynomial& other) {
  if (other.n_ != n_) throw InputError("dimension mismatch in polynomial difference");
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

LaurentPolynomial& LaurentPolynomial::operator*=(Complex c) {
  if (c == Complex(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, a] : terms_) a *= c;
  return *this;
}

LaurentPolynomial operator*(const LaurentPolynomial& a, const LaurentPolynomial& b) {
  if (a.n_ != b.n_) throw InputError("dimension mismatch in polynomial product");
  LaurentPolynomial out(a.n_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      ExponentVector e = ea;
      for (std::size_t j = 0; j < a.n_; ++j) e[j] += eb[j];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

LaurentPolynomial graph_polynomial(const LaurentPolynomial& f) {
  const std::size_t n = f.dimension();
  LaurentPolynomial q = f.with_new_axis(n) * Complex(-1.0);
  q += LaurentPolynomial::variable(n + 1, n);
  return q;
}

}  // namespace amoebas
