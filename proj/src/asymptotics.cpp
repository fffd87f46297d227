#include "amoebas/asymptotics.hpp"

#include "amoebas/errors.hpp"
#include "amoebas/parallel.hpp"
#include "amoebas/polytope.hpp"
#include "amoebas/series.hpp"
#include "amoebas/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace amoebas {

namespace {

using Index = Eigen::Index;

bool is_real_positive(std::span<const Complex> z) {
  return std::all_of(z.begin(), z.end(), [](Complex c) { return c.real() > 0.0 && std::abs(c.imag()) <= 1e-9 * c.real(); });
}

}  // namespace

std::size_t elimination_axis(const LaurentPolynomial& q, std::span<const double> direction,
                             std::span<const Complex> z) {
  const std::size_t n = q.dimension();
  if (direction.size() != n || z.size() != n) throw InputError("elimination_axis: dimension mismatch");
  std::vector<double> d(n);
  double largest = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = std::abs(q.euler(j).evaluate(z));
    largest = std::max(largest, d[j]);
  }
  if (largest == 0.0) throw SingularityError("elimination_axis: singular point of the hypersurface");
  const std::size_t last = n - 1;
  if (direction[last] != 0.0 && d[last] > 1e-8 * largest) return last;
  std::optional<std::size_t> best;
  for (std::size_t j = 0; j < n; ++j) {
    if (direction[j] == 0.0) continue;
    if (!best || d[j] > d[*best]) best = j;
  }
  if (!best || d[*best] <= 1e-8 * largest) {
    throw NumericalError("elimination_axis: no axis with q_j != 0 and z_j dQ/dz_j != 0");
  }
  return *best;
}

PhaseHessian phase_hessian(const LaurentPolynomial& q, std::span<const double> direction,
                           std::span<const Complex> z, double step) {
  const std::size_t n = q.dimension();
  if (direction.size() != n || z.size() != n) throw InputError("phase_hessian: dimension mismatch");
  if (!(step > 0.0)) throw InputError("phase_hessian: step must be positive");
  PhaseHessian out;
  if (n == 1) {
    out.matrix.resize(0, 0);
    out.determinant = 1.0;
    return out;
  }

  const std::size_t e = elimination_axis(q, direction, z);
  out.eliminated_axis = e;
  const LaurentPolynomial de = q.euler(e);
  std::vector<std::size_t> free_axes;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != e) free_axes.push_back(j);
  }
  const std::size_t m = free_axes.size();

  ComplexVector xi0(n);
  for (std::size_t j = 0; j < n; ++j) xi0[j] = std::log(z[j]);

  // Only the eliminated coordinate contributes curvature: phi is linear in the free ones.
  auto implicit_shift = [&](std::span<const double> offsets) {
    ComplexVector zz(n);
    for (std::size_t a = 0; a < m; ++a) zz[free_axes[a]] = std::exp(xi0[free_axes[a]] + offsets[a]);
    Complex w = xi0[e];
    for (int it = 0; it < 60; ++it) {
      zz[e] = std::exp(w);
      const Complex value = q.evaluate(zz);
      const double scale = q.abs_scale(zz);
      if (std::abs(value) <= 4e-16 * scale) return w - xi0[e];
      const Complex dw = value / de.evaluate(zz);
      w -= dw;
      if (std::abs(dw) <= 1e-16 * std::max(1.0, std::abs(w))) return w - xi0[e];
    }
    throw NumericalError("phase_hessian: implicit solve along the elimination axis failed");
  };

  auto second_differences = [&](double h) {
    Eigen::MatrixXcd hess(static_cast<Index>(m), static_cast<Index>(m));
    std::vector<double> off(m, 0.0);
    const Complex f0 = implicit_shift(off);
    for (std::size_t a = 0; a < m; ++a) {
      off.assign(m, 0.0);
      off[a] = h;
      const Complex fp = implicit_shift(off);
      off[a] = -h;
      const Complex fm = implicit_shift(off);
      hess(static_cast<Index>(a), static_cast<Index>(a)) = (fp - 2.0 * f0 + fm) / (h * h);
      for (std::size_t b = a + 1; b < m; ++b) {
        Complex acc = 0.0;
        for (int sa : {1, -1}) {
          for (int sb : {1, -1}) {
            off.assign(m, 0.0);
            off[a] = sa * h;
            off[b] = sb * h;
            acc += static_cast<double>(sa * sb) * implicit_shift(off);
          }
        }
        hess(static_cast<Index>(a), static_cast<Index>(b)) = acc / (4.0 * h * h);
        hess(static_cast<Index>(b), static_cast<Index>(a)) = hess(static_cast<Index>(a), static_cast<Index>(b));
      }
    }
    return hess;
  };

  Eigen::MatrixXcd coarse = second_differences(step);
  Eigen::MatrixXcd fine = second_differences(0.5 * step);
  out.matrix = direction[e] * (4.0 * fine - coarse) / 3.0;
  out.determinant = out.matrix.determinant();
  return out;
}

Complex gauss_jacobian_determinant(const LaurentPolynomial& q, std::span<const Complex> z) {
  const std::size_t n = q.dimension();
  if (z.size() != n) throw InputError("gauss_jacobian_determinant: dimension mismatch");
  if (n == 1) return 1.0;

  std::vector<LaurentPolynomial> d1;
  ComplexVector g(n);
  for (std::size_t j = 0; j < n; ++j) {
    d1.push_back(q.euler(j));
    g[j] = d1[j].evaluate(z);
  }
  std::size_t p = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (std::abs(g[j]) > std::abs(g[p])) p = j;
  }
  if (g[p] == Complex(0.0)) throw SingularityError("gauss_jacobian_determinant: singular point");

  Eigen::MatrixXcd grad(1, static_cast<Index>(n));
  for (std::size_t k = 0; k < n; ++k) grad(0, static_cast<Index>(k)) = g[k];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(grad, Eigen::ComputeFullV);
  const Eigen::MatrixXcd& v = svd.matrixV();

  std::vector<std::size_t> chart;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != p) chart.push_back(j);
  }
  Eigen::MatrixXcd jac(static_cast<Index>(n - 1), static_cast<Index>(n - 1));
  for (std::size_t r = 0; r < chart.size(); ++r) {
    const std::size_t j = chart[r];
    for (Index col = 1; col < static_cast<Index>(n); ++col) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const Complex djk = d1[j].euler(k).evaluate(z);
        const Complex dpk = d1[p].euler(k).evaluate(z);
        acc += (djk * g[p] - g[j] * dpk) * v(static_cast<Index>(k), col);
      }
      jac(static_cast<Index>(r), col - 1) = acc / (g[p] * g[p]);
    }
  }
  return jac.determinant();
}

Complex AsymptoticEstimate::log_law(long k) const {
  const double n = static_cast<double>(q.size());
  Complex acc = 0.5 * (1.0 - n) * std::log(static_cast<double>(k));
  for (std::size_t j = 0; j < q.size(); ++j) acc -= static_cast<double>(q[j] * k) * std::log(saddle[j]);
  return acc + std::log(constant);
}

AsymptoticEstimate estimate(const LaurentPolynomial& p, const LaurentPolynomial& q, const ExponentVector& direction,
                            const EstimateOptions& options) {
  const std::size_t n = q.dimension();
  if (p.dimension() != n || direction.size() != n) throw InputError("estimate: dimension mismatch");
  if (std::all_of(direction.begin(), direction.end(), [](long v) { return v == 0; })) {
    throw InputError("estimate: direction must be nonzero");
  }
  const RealVector dir(direction.begin(), direction.end());

  std::vector<ComplexVector> seeds;
  if (options.seed) seeds.push_back(*options.seed);
  for (auto& s : default_seeds(q)) seeds.push_back(std::move(s));

  std::optional<CriticalPoint> chosen;
  double last_residual = std::numeric_limits<double>::infinity();
  for (const auto& s : seeds) {
    try {
      CriticalPoint cp = inverse_gauss(q, dir, s, options.newton);
      if (is_real_positive(cp.z)) {
        chosen = std::move(cp);
        break;
      }
      if (!chosen) chosen = std::move(cp);
      if (options.seed) break;
    } catch (const NumericalError& err) {
      last_residual = std::min(last_residual, err.residual());
    }
  }
  if (!chosen) throw NumericalError("estimate: no critical point found for this direction", last_residual);

  AsymptoticEstimate est;
  est.q = direction;
  est.saddle = chosen->z;
  if (!is_real_positive(est.saddle)) est.warnings.push_back("saddle is not real positive; square-root branch is heuristic");

  est.hessian = phase_hessian(q, dir, est.saddle);
  double qmax = 0.0;
  for (double c : dir) qmax = std::max(qmax, std::abs(c));
  if (std::abs(est.hessian.determinant) <= 1e-6 * std::max(1.0, std::pow(qmax, static_cast<double>(n - 1)))) {
    throw SingularityError("estimate: non-Morse saddle (det Hess phi = 0); the leading law does not apply",
                           std::abs(est.hessian.determinant));
  }
  if (chosen->degenerate) est.warnings.push_back("inverse Gauss Jacobian is nearly singular at the saddle");

  const std::size_t e = est.hessian.eliminated_axis;
  const Complex pz = p.evaluate(est.saddle);
  if (std::abs(pz) <= 1e-12 * std::max(p.abs_scale(est.saddle), std::numeric_limits<double>::min())) {
    est.constant = 0.0;
    est.constant_vanishes = true;
    est.warnings.push_back("P vanishes at the saddle; higher-order asymptotics not provided");
  } else {
    const double sign = direction[e] > 0 ? 1.0 : -1.0;
    const Complex de = q.euler(e).evaluate(est.saddle);
    const Complex det_minus = (n % 2 == 0 ? -1.0 : 1.0) * est.hessian.determinant;
    const double norm = std::pow(2.0 * std::numbers::pi, 0.5 * (1.0 - static_cast<double>(n)));
    est.constant = norm * (-sign) * pz / de / std::sqrt(det_minus);
  }

  // Simple-boundary spot check: the saddle's torus meets V only at the saddle.
  const std::size_t dims = n - 1;
  std::size_t total = 1;
  for (std::size_t d = 0; d < dims; ++d) total *= static_cast<std::size_t>(options.phase_samples);
  const double xe = std::log(std::abs(est.saddle[e]));
  for (std::size_t k = 0; k < total && est.simple_boundary; ++k) {
    ComplexVector others;
    std::size_t rest = k;
    std::vector<int> digits(dims);
    for (std::size_t d = dims; d-- > 0;) {
      digits[d] = static_cast<int>(rest % static_cast<std::size_t>(options.phase_samples));
      rest /= static_cast<std::size_t>(options.phase_samples);
    }
    std::size_t d = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == e) continue;
      others.push_back(est.saddle[j] *
                       std::exp(Complex(0.0, 2.0 * std::numbers::pi * digits[d++] / options.phase_samples)));
    }
    try {
      Fiber f = fiber(q, e, others);
      for (const auto& r : f.torus_roots()) {
        if (std::abs(std::log(std::abs(r)) - xe) > 1e-6) continue;
        if (k == 0 && std::abs(r - est.saddle[e]) <= 1e-6 * std::abs(est.saddle[e])) continue;
        est.simple_boundary = false;
      }
    } catch (const NumericalError&) {
      // skip degenerate sample
    }
  }
  if (!est.simple_boundary) est.warnings.push_back("saddle torus meets V elsewhere; boundary is not simple");
  return est;
}

ExponentVector expansion_vertex(const LaurentPolynomial& q, const ExponentVector& direction) {
  const Polyhedron poly = newton_polytope(q);
  const RationalPoint d = to_rational_point(direction);
  auto dot = [](const RationalPoint& a, const RationalPoint& b) {
    Rational s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
  };
  for (const auto& v : poly.vertices()) {
    const Cone c = poly.dual_cone_at(v);
    bool ok = !c.generators().empty();
    for (const auto& g : c.generators()) ok = ok && dot(d, g) < 0;
    for (const auto& l : c.lineality()) ok = ok && dot(d, l) == 0;
    if (ok) {
      ExponentVector out;
      for (const auto& x : v) out.push_back(static_cast<long>(boost::multiprecision::numerator(x)));
      return out;
    }
  }
  throw InputError("no vertex of the Newton polytope has the direction in its tangent cone");
}

namespace {

bool nonnegative_support(const LaurentPolynomial& p) {
  for (const auto& [e, c] : p.terms()) {
    if (std::any_of(e.begin(), e.end(), [](long x) { return x < 0; })) return false;
  }
  return true;
}

}  // namespace

std::vector<Rational> diagonal_coefficients(const LaurentPolynomial& p, const LaurentPolynomial& q,
                                           const ExponentVector& direction, const std::vector<long>& k_list,
                                           const ExponentVector& vertex, long max_order, unsigned workers) {
  const std::size_t n = q.dimension();
  if (direction.size() != n || vertex.size() != n || p.dimension() != n) {
    throw InputError("diagonal_coefficients: dimension mismatch");
  }
  auto exponent = [&](long k) {
    ExponentVector a(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = direction[j] * k;
    return a;
  };
  const bool taylor = std::all_of(vertex.begin(), vertex.end(), [](long v) { return v == 0; }) &&
                      std::all_of(direction.begin(), direction.end(), [](long v) { return v >= 0; }) &&
                      nonnegative_support(p) && nonnegative_support(q);
  std::vector<Rational> exact(k_list.size());
  if (taylor && !k_list.empty()) {
    const long kmax = *std::max_element(k_list.begin(), k_list.end());
    const TruncatedSeries series = series_divide(to_exact(p), to_exact(q), exponent(std::max(kmax, 0L)));
    for (std::size_t i = 0; i < k_list.size(); ++i) exact[i] = k_list[i] < 0 ? Rational(0) : series.coefficient(exponent(k_list[i]));
  } else {
    exact = parallel_map(k_list.size(), workers,
                         [&](std::size_t i) { return laurent_oracle(p, q, vertex, exponent(k_list[i]), max_order); });
  }
  return exact;
}

Comparison compare(const LaurentPolynomial& p, const LaurentPolynomial& q, const ExponentVector& direction,
                   const std::vector<long>& k_list, const CompareOptions& options) {
  if (k_list.empty()) throw InputError("compare: empty k list");
  for (long k : k_list) {
    if (k < 1) throw InputError("compare: k must be positive");
  }
  Comparison out;
  out.vertex = options.vertex ? *options.vertex : expansion_vertex(q, direction);
  out.estimate = estimate(p, q, direction, options.estimate);
  const std::vector<Rational> exact =
      diagonal_coefficients(p, q, direction, k_list, out.vertex, options.max_order, options.workers);

  for (std::size_t i = 0; i < k_list.size(); ++i) {
    ComparisonRow row;
    row.k = k_list[i];
    row.exact = exact[i];
    if (out.estimate.constant_vanishes) {
      row.log_estimate = Complex(-std::numeric_limits<double>::infinity(), 0.0);
      row.ratio = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    } else {
      row.log_estimate = out.estimate.log_law(row.k);
      if (row.exact == 0) {
        row.ratio = 0.0;
      } else {
        const Complex log_exact(log_abs(row.exact), row.exact < 0 ? std::numbers::pi : 0.0);
        row.ratio = std::exp(log_exact - row.log_estimate);
      }
    }
    out.rows.push_back(row);
  }

  // Branch of sqrt(det(-H)): fixed by the oracle outside the real positive regime.
  const bool positive_regime = is_real_positive(out.estimate.saddle) &&
                               std::abs(out.estimate.constant.imag()) <= 1e-12 * std::abs(out.estimate.constant);
  if (!positive_regime && !out.estimate.constant_vanishes) {
    std::vector<std::size_t> order(out.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return out.rows[a].k < out.rows[b].k; });
    bool flip = true;
    for (std::size_t i = 0; i < std::min<std::size_t>(2, order.size()); ++i) {
      const Complex r = out.rows[order[i]].ratio;
      flip = flip && std::abs(r + 1.0) < std::abs(r - 1.0);
    }
    if (flip) {
      out.branch_flipped = true;
      out.estimate.constant = -out.estimate.constant;
      for (auto& row : out.rows) {
        row.ratio = -row.ratio;
        row.log_estimate += Complex(0.0, std::numbers::pi);
      }
      out.estimate.warnings.push_back("square-root branch negated to match the oracle at the smallest k");
    }
  }
  return out;
}

std::string format_exp(Complex log_value, int digits) {
  if (std::isinf(log_value.real()) && log_value.real() < 0) return "0";
  if (std::isnan(log_value.real())) return "nan";
  const double phase = std::remainder(log_value.imag(), 2.0 * std::numbers::pi);
  char buf[128];
  const double l10 = log_value.real() / std::numbers::ln10;
  long exponent = static_cast<long>(std::floor(l10));
  double mant = std::pow(10.0, l10 - static_cast<double>(exponent));
  // Round first so that 9.9999... prints as 1.0e+(exponent+1).
  const double unit = std::pow(10.0, digits - 1);
  mant = std::round(mant * unit) / unit;
  if (mant >= 10.0) {
    mant /= 10.0;
    ++exponent;
  }
  const bool real_valued = std::abs(std::sin(phase)) <= 1e-12;
  if (real_valued) {
    const double sign = std::cos(phase) < 0 ? -1.0 : 1.0;
    std::snprintf(buf, sizeof buf, "%.*fe%+ld", digits - 1, sign * mant, exponent);
  } else {
    const Complex m = mant * std::exp(Complex(0.0, phase));
    std::snprintf(buf, sizeof buf, "(%.*f%+.*fi)e%+ld", digits - 1, m.real(), digits - 1, m.imag(), exponent);
  }
  return buf;
}

double error_slope(const std::vector<ComparisonRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    const double err = std::abs(r.ratio - 1.0);
    if (err > 0.0 && std::isfinite(err)) pts.emplace_back(std::log(static_cast<double>(r.k)), std::log(err));
  }
  if (pts.size() < 2) throw InputError("error_slope: need at least two rows with nonzero error");
  double mx = 0.0, my = 0.0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (auto [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

}  // namespace amoebas
