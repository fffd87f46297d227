#pragma once

#include "amoebas/laurent.hpp"
#include "amoebas/polytope.hpp"
#include "amoebas/rational.hpp"
#include "amoebas/univariate.hpp"

#include <optional>
#include <vector>

namespace amoebas {

/// Energy spectrum {shift + p : p in points}, with optional recession rays
/// describing the untruncated (infinite) spectrum the points were cut from.
///
/// The integer points carry all exact computations; the rational shift only
/// moves mean energies.
class Spectrum {
 public:
  /// Throws InputError for an empty or repeated point, or mismatched dimensions.
  Spectrum(std::vector<ExponentVector> points, RationalPoint shift = {}, std::vector<ExponentVector> recession = {});

  /// {0, 1}.
  static Spectrum fermi();
  /// 1/2 + {0, 1, ..., levels - 1}, recession ray 1.
  static Spectrum planck(long levels);

  std::size_t dimension() const noexcept { return n_; }
  const std::vector<ExponentVector>& points() const noexcept { return points_; }
  const RationalPoint& shift() const noexcept { return shift_; }
  const std::vector<ExponentVector>& recession() const noexcept { return recession_; }
  std::size_t size() const noexcept { return points_.size(); }
  /// Differences of the points generate Z^n.
  bool generates_lattice() const noexcept { return lattice_; }
  /// Points plus shift.
  std::vector<RationalPoint> energies() const;

 private:
  std::size_t n_;
  std::vector<ExponentVector> points_;
  RationalPoint shift_;
  std::vector<ExponentVector> recession_;
  bool lattice_;
};

/// sum_k z^{p_k} over the integer points (the shift is a monomial prefactor left out).
LaurentPolynomial partition_function(const Spectrum& s);

/// True iff u lies in the interior of conv(energies) + cone(recession).
bool admissible(const Spectrum& s, const RationalPoint& u);

struct EnsembleSolution {
  RealVector u;
  /// log z; the solver works in these coordinates.
  RealVector x;
  RealVector z;
  /// -log z.
  RealVector mu;
  /// -1 / log z_j, +infinity where z_j = 1.
  RealVector temperature;
  /// log Z(z) - <u, log z>.
  double entropy = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
};

struct SolveOptions {
  std::optional<RealVector> seed;
  double gradient_tol = 1e-10;
  int max_iterations = 200;
  /// ||x|| beyond this means the minimum is at infinity.
  double escape_radius = 50.0;
};

/// Minimizes the convex function x -> log Z(e^x) - <u, x> by damped Newton.
/// AdmissibilityError (before iterating) when u is outside the closed hull of
/// the truncated spectrum or the hull is not full-dimensional; BoundaryError
/// when the iterate escapes; NumericalError on stagnation.
EnsembleSolution solve_mean_energy(const Spectrum& s, const RationalPoint& u, const SolveOptions& options = {});

/// a_k = N z^{p_k} / Z(z), in the order of s.points().
RealVector occupations(const Spectrum& s, const EnsembleSolution& solution, double particles);

/// max_j |(S(u + h e_j) - S(u - h e_j)) / 2h - (-log z_j(u))|.
double entropy_gradient_check(const Spectrum& s, const RationalPoint& u, double h = 1e-4);

struct ExactStats {
  long particles = 0;
  ExponentVector energy;
  /// Number of states sum_a W(a).
  BigInt total_states;
  /// Average occupation of each point, in the order of s.points().
  std::vector<Rational> averages;
};

/// Coefficient route: total = [z^E] Z^N and
/// average_k = N [z^{E - p_k}] Z^{N-1} / total, with exact big integers.
/// E refers to the integer points (shift excluded). EmptyEnsembleError if
/// no collection has total energy E.
ExactStats exact_stats(const Spectrum& s, long particles, const ExponentVector& energy);

/// Enumerates every collection (a_k) with sum a_k = N and sum a_k p_k = E,
/// weighting each by N! / prod a_k!. Limited to N <= 12.
ExactStats enumerate_states(const Spectrum& s, long particles, const ExponentVector& energy);

struct OccupationRow {
  long particles = 0;
  std::size_t level = 0;
  Rational exact;
  double asymptotic = 0.0;
  /// |exact - asymptotic| / asymptotic.
  double relative_error = 0.0;
};

/// Exact average occupations against N z^{p_k}/Z at z = z(u) for each N.
/// Requires a lattice-generating spectrum and integral N (u - shift).
std::vector<OccupationRow> occupation_comparison(const Spectrum& s, const RationalPoint& u,
                                                 const std::vector<long>& particle_counts, unsigned workers = 1);

/// Univariate partition function given as a quotient of polynomials, e.g. an
/// infinite spectrum summed in closed form.
class RationalPartition {
 public:
  RationalPartition(UnivariatePolynomial numerator, UnivariatePolynomial denominator);

  /// Tangent x2 = slope * x1 + intercept to the curve (log|z|, log|Z(z)|) at
  /// real z: slope = z Z'/Z is the mean energy, intercept the entropy.
  struct Tangent {
    double slope;
    double intercept;
  };
  Tangent tangent(double z) const;

  /// Point of the real branch z = e^t, t in (t_lo, t_hi), where the mean
  /// energy equals u. The slope must change sign across the interval.
  double solve_branch(double u, double t_lo, double t_hi) const;

 private:
  UnivariatePolynomial num_, den_, dnum_, dden_;
};

struct CommonTangent {
  double slope;
  double intercept;
  double z_first;
  double z_second;
};

/// Mean energy u in (u_lo, u_hi) where the two branches have the same
/// tangent line, found by a sign change of the entropy difference on a
/// uniform scan followed by bracketed root finding.
CommonTangent common_tangent(const RationalPartition& z, double first_lo, double first_hi, double second_lo,
                             double second_hi, double u_lo, double u_hi);

}  // namespace amoebas
