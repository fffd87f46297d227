#include "amoebas/series.hpp"

#include "amoebas/errors.hpp"
#include "amoebas/polytope.hpp"

#include <algorithm>

namespace amoebas {

ExactPolynomial to_exact(const LaurentPolynomial& p) {
  ExactPolynomial out;
  for (const auto& [e, c] : p.terms()) {
    if (c.imag() != 0.0) throw DomainError("exact arithmetic needs real coefficients");
    out.emplace(e, rational_from_double(c.real()));
  }
  return out;
}

// ---------------------------------------------------------------------------

TruncatedSeries::TruncatedSeries(ExponentVector degree_bound) : bound_(std::move(degree_bound)) {
  if (bound_.empty()) throw InputError("truncated series needs dimension >= 1");
  std::size_t size = 1;
  stride_.assign(bound_.size(), 1);
  for (std::size_t j = bound_.size(); j-- > 0;) {
    if (bound_[j] < 0) throw InputError("negative degree bound");
    stride_[j] = size;
    size *= static_cast<std::size_t>(bound_[j] + 1);
  }
  data_.assign(size, Rational(0));
}

TruncatedSeries TruncatedSeries::from_polynomial(const ExactPolynomial& p, ExponentVector degree_bound) {
  TruncatedSeries s(std::move(degree_bound));
  for (const auto& [e, c] : p) {
    if (e.size() != s.dimension()) throw InputError("series term of wrong dimension");
    if (std::any_of(e.begin(), e.end(), [](long x) { return x < 0; })) {
      throw InputError("truncated series support must be nonnegative");
    }
    if (s.in_box(e)) s.data_[s.flat_index(e)] += c;
  }
  return s;
}

TruncatedSeries TruncatedSeries::one(ExponentVector degree_bound) {
  TruncatedSeries s(std::move(degree_bound));
  s.data_[0] = 1;
  return s;
}

bool TruncatedSeries::in_box(const ExponentVector& e) const {
  if (e.size() != bound_.size()) return false;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (e[j] < 0 || e[j] > bound_[j]) return false;
  }
  return true;
}

std::size_t TruncatedSeries::flat_index(const ExponentVector& e) const {
  std::size_t k = 0;
  for (std::size_t j = 0; j < e.size(); ++j) k += static_cast<std::size_t>(e[j]) * stride_[j];
  return k;
}

void TruncatedSeries::advance(ExponentVector& e) const {
  for (std::size_t j = e.size(); j-- > 0;) {
    if (e[j] < bound_[j]) {
      ++e[j];
      return;
    }
    e[j] = 0;
  }
}

const Rational& TruncatedSeries::coefficient(const ExponentVector& e) const {
  if (!in_box(e)) throw TruncationError("exponent lies outside the truncation box");
  return data_[flat_index(e)];
}

void TruncatedSeries::set(const ExponentVector& e, Rational value) {
  if (!in_box(e)) throw TruncationError("exponent lies outside the truncation box");
  data_[flat_index(e)] = std::move(value);
}

bool TruncatedSeries::is_integral() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const Rational& c) { return boost::multiprecision::denominator(c) == 1; });
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& other) {
  if (other.bound_ != bound_) throw InputError("series boxes differ");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (a.bound_ != b.bound_) throw InputError("series boxes differ");
  const std::size_t n = a.bound_.size();
  TruncatedSeries out(a.bound_);

  std::vector<std::pair<ExponentVector, const Rational*>> bt;
  b.for_each([&](const ExponentVector& e, const Rational& c) {
    if (c != 0) bt.emplace_back(e, &c);
  });

  ExponentVector sum(n);
  a.for_each([&](const ExponentVector& ea, const Rational& ca) {
    if (ca == 0) return;
    for (const auto& [eb, cb] : bt) {
      bool inside = true;
      for (std::size_t j = 0; j < n; ++j) {
        sum[j] = ea[j] + eb[j];
        if (sum[j] > a.bound_[j]) {
          inside = false;
          break;
        }
      }
      if (inside) out.data_[out.flat_index(sum)] += ca * *cb;
    }
  });
  return out;
}

TruncatedSeries series_power(const TruncatedSeries& z, long power) {
  if (power < 0) throw InputError("series power must be nonnegative");
  TruncatedSeries result = TruncatedSeries::one(z.degree_bound());
  TruncatedSeries base = z;
  auto e = static_cast<unsigned long>(power);
  while (e != 0) {
    if (e & 1UL) result = result * base;
    e >>= 1;
    if (e != 0) base = base * base;
  }
  return result;
}

TruncatedSeries series_divide(const ExactPolynomial& p, const ExactPolynomial& q, ExponentVector degree_bound) {
  const std::size_t n = degree_bound.size();
  const ExponentVector zero(n, 0);
  auto q0 = q.find(zero);
  if (q0 == q.end()) throw InputError("series division needs Q(0) != 0");

  std::vector<std::pair<ExponentVector, Rational>> tail;
  for (const auto& [e, c] : q) {
    if (e.size() != n) throw InputError("divisor of wrong dimension");
    if (std::any_of(e.begin(), e.end(), [](long x) { return x < 0; })) {
      throw InputError("series division needs a nonnegative divisor support");
    }
    if (e != zero) tail.emplace_back(e, c);
  }

  TruncatedSeries out = TruncatedSeries::from_polynomial(p, degree_bound);
  const Rational inv_q0 = 1 / q0->second;
  // Row-major order visits a - b before a for every b >= 0, b != 0.
  ExponentVector e(n, 0);
  ExponentVector prev(n);
  bool more = true;
  while (more) {
    Rational acc = out.coefficient(e);
    for (const auto& [b, qb] : tail) {
      bool ok = true;
      for (std::size_t j = 0; j < n; ++j) {
        prev[j] = e[j] - b[j];
        if (prev[j] < 0) {
          ok = false;
          break;
        }
      }
      if (ok) acc -= qb * out.coefficient(prev);
    }
    out.set(e, acc * inv_q0);

    more = false;
    for (std::size_t j = n; j-- > 0;) {
      if (e[j] < degree_bound[j]) {
        ++e[j];
        more = true;
        break;
      }
      e[j] = 0;
    }
  }
  return out;
}

Rational laurent_oracle(const LaurentPolynomial& p, const LaurentPolynomial& q, const ExponentVector& nu,
                        const ExponentVector& alpha, long max_order) {
  const std::size_t n = q.dimension();
  if (p.dimension() != n || nu.size() != n || alpha.size() != n) {
    throw InputError("laurent_oracle: dimension mismatch");
  }
  const ExactPolynomial pe = to_exact(p);
  const ExactPolynomial qe = to_exact(q);
  auto lead = qe.find(nu);
  if (lead == qe.end()) throw InputError("laurent_oracle: nu is not in the support of Q");

  const Polyhedron newton = newton_polytope(q);
  const RationalPoint nu_r = to_rational_point(nu);
  if (!newton.is_vertex(nu_r)) throw InputError("laurent_oracle: nu is not a vertex of the Newton polytope");

  // Integral weight w with <w, beta - nu> >= 1 on the rest of the support.
  RationalPoint s = newton.dual_cone_at(nu_r).interior_direction();
  BigInt lcm = 1;
  for (const auto& x : s) lcm = boost::multiprecision::lcm(lcm, boost::multiprecision::denominator(x));
  std::vector<BigInt> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = -boost::multiprecision::numerator(s[j]) * (lcm / boost::multiprecision::denominator(s[j]));
  }
  auto weight = [&](const ExponentVector& e) {
    BigInt t = 0;
    for (std::size_t j = 0; j < n; ++j) t += w[j] * e[j];
    return t;
  };

  // h = g / (a_nu z^nu), supported on Newt(Q) - nu minus the origin.
  ExactPolynomial h;
  BigInt w_min = -1;
  for (const auto& [e, c] : qe) {
    if (e == nu) continue;
    ExponentVector d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = e[j] - nu[j];
    BigInt wd = weight(d);
    if (wd < 1) throw NumericalError("laurent_oracle: weight is not positive on the support");
    if (w_min < 0 || wd < w_min) w_min = wd;
    h.emplace(std::move(d), c / lead->second);
  }

  // Targets in the expansion of sum_k (-h)^k: alpha + nu - gamma for gamma in supp P.
  BigInt w_target = -1;
  for (const auto& [g, c] : pe) {
    ExponentVector t(n);
    for (std::size_t j = 0; j < n; ++j) t[j] = alpha[j] + nu[j] - g[j];
    w_target = std::max(w_target, weight(t));
  }
  if (w_target < 0) return 0;

  long order = 0;
  if (!h.empty()) {
    BigInt k = w_target / w_min;
    if (k > max_order) {
      throw TruncationError("laurent_oracle: exponent needs expansion order " + k.str() +
                            " > budget " + std::to_string(max_order));
    }
    order = k.convert_to<long>();
  }

  ExactPolynomial sum;
  ExactPolynomial power{{ExponentVector(n, 0), Rational(1)}};
  for (long k = 0; k <= order; ++k) {
    for (const auto& [e, c] : power) {
      Rational& slot = sum[e];
      slot += (k % 2 == 0) ? c : Rational(-c);
    }
    if (k == order) break;
    ExactPolynomial next;
    for (const auto& [e1, c1] : power) {
      for (const auto& [e2, c2] : h) {
        ExponentVector e(n);
        for (std::size_t j = 0; j < n; ++j) e[j] = e1[j] + e2[j];
        if (weight(e) > w_target) continue;
        next[e] += c1 * c2;
      }
    }
    power = std::move(next);
  }

  Rational result = 0;
  for (const auto& [g, c] : pe) {
    ExponentVector t(n);
    for (std::size_t j = 0; j < n; ++j) t[j] = alpha[j] + nu[j] - g[j];
    auto it = sum.find(t);
    if (it != sum.end()) result += c * it->second;
  }
  return result / lead->second;
}

}  // namespace amoebas
