#include "amoebas/ensemble.hpp"

#include "amoebas/errors.hpp"
#include "amoebas/parallel.hpp"
#include "amoebas/series.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace amoebas {

namespace {

using Eigen::Index;

RationalPoint as_rational(const ExponentVector& v) { return to_rational_point(v); }

void require_dimension(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw InputError(std::string(what) + ": expected dimension " + std::to_string(want) + ", got " +
                     std::to_string(got));
  }
}

/// Centered log-sum-exp objective log sum_k exp(<p_k - u, x>) with its
/// gradient and Hessian. Rows of `centered` are p_k - u.
struct Objective {
  Eigen::MatrixXd centered;

  double value(const Eigen::VectorXd& x, Eigen::VectorXd* weights = nullptr) const {
    Eigen::VectorXd a = centered * x;
    Index top = 0;
    const double m = a.maxCoeff(&top);
    Eigen::VectorXd w = (a.array() - m).exp();
    // log1p keeps the objective resolved when one level dominates, which is
    // what lets the iterate run away on the hull boundary instead of stalling.
    w[top] = 0.0;
    const double rest = w.sum();
    w[top] = 1.0;
    if (weights) *weights = w / (1.0 + rest);
    return m + std::log1p(rest);
  }
};

/// Multinomial N! / prod a_k!.
BigInt multinomial(const std::vector<long>& parts) {
  BigInt r = 1;
  long used = 0;
  for (long a : parts) {
    for (long i = 1; i <= a; ++i) r = r * (used + i) / i;
    used += a;
  }
  return r;
}

}  // namespace

Spectrum::Spectrum(std::vector<ExponentVector> points, RationalPoint shift, std::vector<ExponentVector> recession)
    : n_(points.empty() ? 0 : points.front().size()),
      points_(std::move(points)),
      shift_(std::move(shift)),
      recession_(std::move(recession)),
      lattice_(false) {
  if (points_.empty()) throw InputError("Spectrum: no energy levels");
  if (n_ == 0) throw InputError("Spectrum: zero-dimensional energies");
  std::set<ExponentVector> seen;
  for (const auto& p : points_) {
    require_dimension(p.size(), n_, "Spectrum point");
    if (!seen.insert(p).second) throw InputError("Spectrum: repeated energy level");
  }
  if (shift_.empty()) shift_.assign(n_, Rational(0));
  require_dimension(shift_.size(), n_, "Spectrum shift");
  for (const auto& r : recession_) require_dimension(r.size(), n_, "Spectrum recession ray");
  lattice_ = points_.size() > n_ && amoebas::generates_lattice(points_);
}

Spectrum Spectrum::fermi() { return Spectrum(std::vector<ExponentVector>{{0}, {1}}); }

Spectrum Spectrum::planck(long levels) {
  if (levels < 2) throw InputError("Spectrum::planck: need at least two levels");
  std::vector<ExponentVector> pts;
  for (long k = 0; k < levels; ++k) pts.push_back({k});
  return Spectrum(std::move(pts), RationalPoint{Rational(1, 2)}, std::vector<ExponentVector>{{1}});
}

std::vector<RationalPoint> Spectrum::energies() const {
  std::vector<RationalPoint> out;
  out.reserve(points_.size());
  for (const auto& p : points_) {
    RationalPoint e = as_rational(p);
    for (std::size_t j = 0; j < n_; ++j) e[j] += shift_[j];
    out.push_back(std::move(e));
  }
  return out;
}

LaurentPolynomial partition_function(const Spectrum& s) {
  LaurentPolynomial z(s.dimension());
  for (const auto& p : s.points()) z.add_term(p, 1.0);
  return z;
}

bool admissible(const Spectrum& s, const RationalPoint& u) {
  require_dimension(u.size(), s.dimension(), "admissible");
  std::vector<RationalPoint> rays;
  for (const auto& r : s.recession()) rays.push_back(as_rational(r));
  return Polyhedron::hull(s.energies(), rays).contains_interior(u);
}

EnsembleSolution solve_mean_energy(const Spectrum& s, const RationalPoint& u, const SolveOptions& options) {
  const std::size_t n = s.dimension();
  require_dimension(u.size(), n, "solve_mean_energy");
  const Polyhedron hull = Polyhedron::hull(s.energies());
  if (!hull.is_full_dimensional()) {
    throw AdmissibilityError("solve_mean_energy: the spectrum does not affinely span the energy space");
  }
  if (!hull.contains(u)) {
    throw AdmissibilityError("solve_mean_energy: mean energy outside the convex hull of the spectrum");
  }

  Eigen::VectorXd local_u(static_cast<Index>(n));
  for (std::size_t j = 0; j < n; ++j) local_u[static_cast<Index>(j)] = to_double(u[j] - s.shift()[j]);
  Objective obj{Eigen::MatrixXd(static_cast<Index>(s.size()), static_cast<Index>(n))};
  for (std::size_t k = 0; k < s.size(); ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      obj.centered(static_cast<Index>(k), static_cast<Index>(j)) =
          static_cast<double>(s.points()[k][j]) - local_u[static_cast<Index>(j)];
    }
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Index>(n));
  if (options.seed) {
    require_dimension(options.seed->size(), n, "solve_mean_energy seed");
    for (std::size_t j = 0; j < n; ++j) x[static_cast<Index>(j)] = (*options.seed)[j];
  }

  std::vector<double> trace;
  Eigen::VectorXd w;
  double f = obj.value(x, &w);
  Eigen::VectorXd grad = obj.centered.transpose() * w;
  int it = 0;
  for (;; ++it) {
    trace.push_back(grad.norm());
    // Hessian of log-sum-exp: weighted covariance of the centered levels.
    Eigen::MatrixXd hess = obj.centered.transpose() * w.asDiagonal() * obj.centered - grad * grad.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    Eigen::VectorXd step;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0.0).all()) {
      step = -ldlt.solve(grad);
    }
    if (step.size() == 0 || !step.allFinite()) step = -grad;
    // Far from the minimum one level dominates and the Hessian is nearly
    // singular; an uncapped step could jump past the escape radius at once.
    constexpr double max_step = 4.0;
    if (step.norm() > max_step) step *= max_step / step.norm();

    // A small gradient alone is not enough: on the hull boundary the gradient
    // decays like e^{-|x|} while Newton keeps taking unit steps outward.
    if (grad.norm() <= options.gradient_tol && step.norm() <= 1e-8 * std::max(1.0, x.norm())) break;
    if (it >= options.max_iterations) {
      throw NumericalError("solve_mean_energy: no convergence within the iteration limit", grad.norm(), trace);
    }

    const double slope = grad.dot(step);
    // Below this predicted decrease the objective cannot tell steps apart, so
    // progress is judged by the gradient instead.
    const bool unresolved = -slope <= 1e-13 * std::max(1.0, std::abs(f));
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      Eigen::VectorXd cand = x + t * step;
      Eigen::VectorXd wc;
      const double fc = obj.value(cand, &wc);
      const bool decreases = unresolved ? (obj.centered.transpose() * wc).norm() < grad.norm()
                                        : fc <= f + 1e-4 * t * slope;
      if (decreases) {
        x = cand;
        f = fc;
        w = wc;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Rounding floor: accept the state if it is already stationary.
      if (grad.norm() <= options.gradient_tol && step.norm() <= 1e-6 * std::max(1.0, x.norm())) break;
      throw NumericalError("solve_mean_energy: line search failed", grad.norm(), trace);
    }
    grad = obj.centered.transpose() * w;
    if (x.norm() > options.escape_radius) {
      throw BoundaryError("solve_mean_energy: iterate escaped to infinity; the mean energy lies on the hull boundary",
                          grad.norm(), trace);
    }
  }

  EnsembleSolution sol;
  sol.u.resize(n);
  for (std::size_t j = 0; j < n; ++j) sol.u[j] = to_double(u[j]);
  sol.x.assign(x.data(), x.data() + x.size());
  for (double xj : sol.x) {
    sol.z.push_back(std::exp(xj));
    sol.mu.push_back(-xj);
    sol.temperature.push_back(xj == 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / xj);
  }
  sol.entropy = f;
  sol.gradient_norm = grad.norm();
  sol.iterations = it;
  return sol;
}

RealVector occupations(const Spectrum& s, const EnsembleSolution& solution, double particles) {
  require_dimension(solution.x.size(), s.dimension(), "occupations");
  RealVector a(s.size());
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.size(); ++k) {
    double e = 0.0;
    for (std::size_t j = 0; j < s.dimension(); ++j) e += static_cast<double>(s.points()[k][j]) * solution.x[j];
    a[k] = e;
    m = std::max(m, e);
  }
  double sum = 0.0;
  for (double& v : a) sum += (v = std::exp(v - m));
  for (double& v : a) v *= particles / sum;
  return a;
}

double entropy_gradient_check(const Spectrum& s, const RationalPoint& u, double h) {
  const std::size_t n = s.dimension();
  require_dimension(u.size(), n, "entropy_gradient_check");
  if (!(h > 0.0)) throw InputError("entropy_gradient_check: step must be positive");
  const EnsembleSolution centre = solve_mean_energy(s, u);
  const Rational step = rational_from_double(h);
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    RationalPoint up = u, down = u;
    up[j] += step;
    down[j] -= step;
    const double diff = (solve_mean_energy(s, up).entropy - solve_mean_energy(s, down).entropy) / (2.0 * h);
    worst = std::max(worst, std::abs(diff - centre.mu[j]));
  }
  return worst;
}

ExactStats exact_stats(const Spectrum& s, long particles, const ExponentVector& energy) {
  const std::size_t n = s.dimension();
  require_dimension(energy.size(), n, "exact_stats");
  if (particles < 1) throw InputError("exact_stats: need at least one particle");

  // Translate the levels into the nonnegative orthant so that Z becomes a
  // power series; E moves by N times the same offset.
  ExponentVector low(n, std::numeric_limits<long>::max());
  for (const auto& p : s.points())
    for (std::size_t j = 0; j < n; ++j) low[j] = std::min(low[j], p[j]);
  ExponentVector box(n);
  for (std::size_t j = 0; j < n; ++j) {
    box[j] = energy[j] - particles * low[j];
    if (box[j] < 0) throw EmptyEnsembleError("exact_stats: energy below N times the lowest level");
  }

  ExactPolynomial z;
  std::vector<ExponentVector> local;
  for (const auto& p : s.points()) {
    ExponentVector e(n);
    for (std::size_t j = 0; j < n; ++j) e[j] = p[j] - low[j];
    z[e] = 1;
    local.push_back(std::move(e));
  }
  const TruncatedSeries zs = TruncatedSeries::from_polynomial(z, box);
  const TruncatedSeries lower = series_power(zs, particles - 1);
  const TruncatedSeries full = lower * zs;

  const Rational total = full.coefficient(box);
  if (total == 0) throw EmptyEnsembleError("exact_stats: no collection reaches the requested energy");

  ExactStats out{particles, energy, numerator(total), {}};
  for (const auto& e : local) {
    ExponentVector rest(n);
    bool inside = true;
    for (std::size_t j = 0; j < n; ++j) {
      rest[j] = box[j] - e[j];
      inside = inside && rest[j] >= 0;
    }
    out.averages.push_back(inside ? Rational(particles) * lower.coefficient(rest) / total : Rational(0));
  }
  return out;
}

ExactStats enumerate_states(const Spectrum& s, long particles, const ExponentVector& energy) {
  const std::size_t n = s.dimension();
  require_dimension(energy.size(), n, "enumerate_states");
  if (particles < 1) throw InputError("enumerate_states: need at least one particle");
  if (particles > 12) throw InputError("enumerate_states: enumeration is limited to N <= 12");

  const std::size_t levels = s.size();
  std::vector<long> counts(levels, 0);
  BigInt total = 0;
  std::vector<BigInt> weighted(levels, 0);
  ExponentVector remaining = energy;

  // Depth-first over a_0, ..., a_{K-1}; the last level takes what is left.
  auto visit = [&](auto&& self, std::size_t level, long left) -> void {
    if (level + 1 == levels) {
      counts[level] = left;
      for (std::size_t j = 0; j < n; ++j) {
        if (remaining[j] != left * s.points()[level][j]) return;
      }
      const BigInt w = multinomial(counts);
      total += w;
      for (std::size_t k = 0; k < levels; ++k) weighted[k] += counts[k] * w;
      return;
    }
    for (long a = 0; a <= left; ++a) {
      counts[level] = a;
      for (std::size_t j = 0; j < n; ++j) remaining[j] -= a * s.points()[level][j];
      self(self, level + 1, left - a);
      for (std::size_t j = 0; j < n; ++j) remaining[j] += a * s.points()[level][j];
    }
    counts[level] = 0;
  };
  visit(visit, 0, particles);

  if (total == 0) throw EmptyEnsembleError("enumerate_states: no collection reaches the requested energy");
  ExactStats out{particles, energy, total, {}};
  for (const auto& w : weighted) out.averages.push_back(Rational(w, total));
  return out;
}

std::vector<OccupationRow> occupation_comparison(const Spectrum& s, const RationalPoint& u,
                                                 const std::vector<long>& particle_counts, unsigned workers) {
  const std::size_t n = s.dimension();
  require_dimension(u.size(), n, "occupation_comparison");
  if (!s.generates_lattice()) throw InputError("occupation_comparison: the spectrum does not generate the lattice");

  std::vector<ExponentVector> energies;
  for (long particles : particle_counts) {
    if (particles < 1) throw InputError("occupation_comparison: particle counts must be positive");
    ExponentVector e(n);
    for (std::size_t j = 0; j < n; ++j) {
      const Rational total = Rational(particles) * (u[j] - s.shift()[j]);
      if (denominator(total) != 1) {
        throw InputError("occupation_comparison: N * u is not an integer energy for N = " + std::to_string(particles));
      }
      e[j] = static_cast<long>(numerator(total));
    }
    energies.push_back(std::move(e));
  }

  const EnsembleSolution sol = solve_mean_energy(s, u);
  auto stats = parallel_map(particle_counts.size(), workers,
                            [&](std::size_t i) { return exact_stats(s, particle_counts[i], energies[i]); });

  std::vector<OccupationRow> rows;
  for (std::size_t i = 0; i < particle_counts.size(); ++i) {
    const RealVector predicted = occupations(s, sol, static_cast<double>(particle_counts[i]));
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double exact = to_double(stats[i].averages[k]);
      rows.push_back({particle_counts[i], k, stats[i].averages[k], predicted[k],
                      std::abs(exact - predicted[k]) / predicted[k]});
    }
  }
  return rows;
}

RationalPartition::RationalPartition(UnivariatePolynomial numerator, UnivariatePolynomial denominator)
    : num_(std::move(numerator)),
      den_(std::move(denominator)),
      dnum_(num_.derivative()),
      dden_(den_.derivative()) {
  if (num_.is_zero() || den_.is_zero()) throw InputError("RationalPartition: zero numerator or denominator");
}

RationalPartition::Tangent RationalPartition::tangent(double z) const {
  const double p = num_.evaluate(z).real();
  const double q = den_.evaluate(z).real();
  if (z == 0.0 || p == 0.0 || q == 0.0) throw DomainError("RationalPartition: tangent at a zero or pole");
  const double slope = z * (dnum_.evaluate(z).real() / p - dden_.evaluate(z).real() / q);
  const double height = std::log(std::abs(p / q));
  return {slope, height - slope * std::log(std::abs(z))};
}

double RationalPartition::solve_branch(double u, double t_lo, double t_hi) const {
  auto f = [&](double t) { return tangent(std::exp(t)).slope - u; };
  const double f_lo = f(t_lo), f_hi = f(t_hi);
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw NumericalError("RationalPartition: mean energy " + std::to_string(u) + " not bracketed on the branch");
  }
  std::uintmax_t iterations = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, t_lo, t_hi, f_lo, f_hi,
                                                  boost::math::tools::eps_tolerance<double>(52), iterations);
  return std::exp(0.5 * (a + b));
}

CommonTangent common_tangent(const RationalPartition& z, double first_lo, double first_hi, double second_lo,
                             double second_hi, double u_lo, double u_hi) {
  if (!(u_lo < u_hi)) throw InputError("common_tangent: empty slope interval");
  auto gap = [&](double u) {
    const double a = z.tangent(z.solve_branch(u, first_lo, first_hi)).intercept;
    const double b = z.tangent(z.solve_branch(u, second_lo, second_hi)).intercept;
    return a - b;
  };
  constexpr int scan = 64;
  double lo = u_lo, g_lo = gap(u_lo);
  for (int i = 1; i <= scan; ++i) {
    const double hi = u_lo + (u_hi - u_lo) * i / scan;
    const double g_hi = gap(hi);
    if (g_lo == 0.0) {
      const double z1 = z.solve_branch(lo, first_lo, first_hi);
      return {lo, z.tangent(z1).intercept, z1, z.solve_branch(lo, second_lo, second_hi)};
    }
    if ((g_lo > 0.0) != (g_hi > 0.0)) {
      std::uintmax_t iterations = 200;
      auto [a, b] = boost::math::tools::toms748_solve(gap, lo, hi, g_lo, g_hi,
                                                      boost::math::tools::eps_tolerance<double>(50), iterations);
      const double u = 0.5 * (a + b);
      const double z1 = z.solve_branch(u, first_lo, first_hi);
      return {u, z.tangent(z1).intercept, z1, z.solve_branch(u, second_lo, second_hi)};
    }
    lo = hi;
    g_lo = g_hi;
  }
  throw NumericalError("common_tangent: the branches share no tangent on the slope interval");
}

}  // namespace amoebas
